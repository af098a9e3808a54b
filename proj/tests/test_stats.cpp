#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pso/errors.hpp"
#include "pso/rng.hpp"
#include "pso/stats.hpp"
#include "oracles.hpp"

using namespace pso;

namespace {

ResultTable make_table(std::size_t strategies, std::size_t problems, std::size_t runs,
                       std::uint64_t seed) {
  ResultTable t;
  RngStream rng(seed);
  for (std::size_t s = 0; s < strategies; ++s)
    for (std::size_t p = 0; p < problems; ++p)
      for (std::size_t r = 0; r < runs; ++r)
        t.add({"s" + std::to_string(100 + s), "p" + std::to_string(100 + p), 10, r},
              std::floor(rng.uniform() * 8.0) + 0.1 * static_cast<double>(s));
  return t;
}

}  // namespace

TEST_CASE("average ranks share ties") {
  REQUIRE(average_ranks(Vec{3, 1, 2}) == Vec{3, 1, 2});
  REQUIRE(average_ranks(Vec{5, 5, 1, 5}) == Vec{3, 3, 1, 3});
  RngStream rng(4);
  for (int k = 0; k < 200; ++k) {
    Vec v(9);
    for (auto& x : v) x = static_cast<double>(rng.index(4));
    REQUIRE(average_ranks(v) == oracle::ranks(v));
  }
}

TEST_CASE("wilcoxon exact p matches sign enumeration") {
  RngStream rng(21);
  for (std::size_t n = 1; n <= 10; ++n) {
    for (int k = 0; k < 30; ++k) {
      Vec a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        // Coarse values produce zero differences and tied magnitudes.
        a[i] = static_cast<double>(rng.index(5));
        b[i] = static_cast<double>(rng.index(5));
      }
      INFO("n " << n << " trial " << k);
      REQUIRE(std::fabs(wilcoxon_signed_rank(a, b).p_value - oracle::wilcoxon_p(a, b)) <= 1e-12);
    }
  }
}

TEST_CASE("wilcoxon worked example") {
  // Distinct magnitudes 1..8; positive ranks {1, 2} give W+ = 3.
  const Vec a{1, 2, 0, 0, 0, 0, 0, 0};
  const Vec b{0, 0, 3, 4, 5, 6, 7, 8};
  const auto res = wilcoxon_signed_rank(a, b);
  REQUIRE(res.n == 8);
  REQUIRE(res.w_plus == 3.0);
  REQUIRE(res.w_minus == 33.0);
  REQUIRE(res.statistic == 3.0);
  // Subsets of {1..8} summing to at most 3: {}, {1}, {2}, {3}, {1,2}.
  REQUIRE(res.p_value == Catch::Approx(10.0 / 256.0).margin(1e-15));
}

TEST_CASE("wilcoxon edge cases") {
  const Vec a{1, 2, 3, 4};
  REQUIRE(wilcoxon_signed_rank(a, a).p_value == 1.0);
  Vec x(25), y(25);
  for (std::size_t i = 0; i < 25; ++i) {
    y[i] = static_cast<double>(i) * 0.37;
    x[i] = y[i] + 1.0;
  }
  REQUIRE(wilcoxon_signed_rank(x, y).p_value < 1e-3);
  RngStream rng(6);
  for (std::size_t n : {5u, 20u, 40u}) {
    Vec p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.uniform();
      q[i] = rng.uniform();
    }
    REQUIRE(wilcoxon_signed_rank(p, q).p_value ==
            Catch::Approx(wilcoxon_signed_rank(q, p).p_value).margin(1e-15));
  }
  REQUIRE_THROWS_AS(wilcoxon_signed_rank(Vec{1, 2}, Vec{1}), std::invalid_argument);
}

TEST_CASE("friedman mean ranks against a reference") {
  const auto table = make_table(13, 13, 25, 99);
  const auto got = friedman_mean_ranks(table, 10);
  REQUIRE(got.size() == 13);
  std::map<std::string, double> ref;
  const auto strategies = table.strategies(10);
  for (const auto& p : table.problems(10)) {
    for (std::size_t r = 0; r < 25; ++r) {
      Vec block;
      for (const auto& s : strategies) block.push_back(*table.get({s, p, 10, r}));
      const Vec rk = oracle::ranks(block);
      for (std::size_t k = 0; k < strategies.size(); ++k) ref[strategies[k]] += rk[k];
    }
  }
  double total = 0;
  for (const auto& s : strategies) {
    REQUIRE(std::fabs(got.at(s) - ref[s] / (13.0 * 25.0)) <= 1e-9);
    total += got.at(s);
  }
  REQUIRE(total / 13.0 == Catch::Approx(7.0).margin(1e-12));
}

TEST_CASE("friedman on blocks and incomplete tables") {
  REQUIRE(friedman_mean_ranks(std::vector<Vec>{{1, 2}, {2, 1}, {0, 5}}) ==
          Vec{4.0 / 3.0, 5.0 / 3.0});
  auto table = make_table(3, 2, 2, 1);
  table.add({"extra", "p100", 10, 0}, 1.0);
  REQUIRE_FALSE(table.complete(10));
  REQUIRE_THROWS_AS(friedman_mean_ranks(table, 10), IncompleteDataError);
  REQUIRE_THROWS_AS(wdl_matrix(table, "s100", 10), IncompleteDataError);
}

TEST_CASE("win draw loss tallies") {
  ResultTable t;
  const std::vector<std::string> problems{"a", "b", "c"};
  for (std::size_t r = 0; r < 25; ++r) {
    const double base = static_cast<double>(r) * 0.11;
    for (const auto& p : problems) {
      t.add({"good", p, 5, r}, base);
      t.add({"bad", p, 5, r}, base + 1.0);
    }
    // "mixed" loses on a, wins on b, and is noise on c.
    t.add({"mixed", "a", 5, r}, base + 2.0);
    t.add({"mixed", "b", 5, r}, base - 2.0);
    t.add({"mixed", "c", 5, r}, base + (r % 2 ? 1e-3 : -1e-3));
  }
  const auto m = wdl_matrix(t, "good", 5);
  REQUIRE(m.at("good") == Wdl{0, 3, 0});
  REQUIRE(m.at("bad") == Wdl{3, 0, 0});
  REQUIRE(m.at("mixed") == Wdl{1, 1, 1});
  for (const auto& [s, w] : m) REQUIRE(w.wins + w.draws + w.losses == problems.size());
  REQUIRE(wdl_matrix(t, "bad", 5).at("good") == Wdl{0, 0, 3});
}

TEST_CASE("thirteen-problem dominance") {
  ResultTable t;
  for (std::size_t p = 0; p < 13; ++p)
    for (std::size_t r = 0; r < 25; ++r) {
      t.add({"x", "f" + std::to_string(p), 30, r}, static_cast<double>(r));
      t.add({"y", "f" + std::to_string(p), 30, r}, static_cast<double>(r) + 0.5);
    }
  REQUIRE(wdl_matrix(t, "x", 30).at("y") == Wdl{13, 0, 0});
  REQUIRE(median(Vec{3, 1, 2, 10}) == 2.5);
}
