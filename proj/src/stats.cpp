#include "pso/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pso/errors.hpp"

namespace pso {

Vec average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Vec ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

void ResultTable::add(const ResultKey& key, double best_f) { entries_[key] = best_f; }

std::optional<double> ResultTable::get(const ResultKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ResultTable::strategies(std::size_t dim) const {
  std::set<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k.dim == dim) out.insert(k.strategy);
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> ResultTable::problems(std::size_t dim) const {
  std::set<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k.dim == dim) out.insert(k.problem);
  }
  return {out.begin(), out.end()};
}

std::vector<std::size_t> ResultTable::runs(std::size_t dim) const {
  std::set<std::size_t> out;
  for (const auto& [k, v] : entries_) {
    if (k.dim == dim) out.insert(k.run);
  }
  return {out.begin(), out.end()};
}

std::vector<std::size_t> ResultTable::dims() const {
  std::set<std::size_t> out;
  for (const auto& [k, v] : entries_) out.insert(k.dim);
  return {out.begin(), out.end()};
}

std::vector<std::string> ResultTable::missing_cells(std::size_t dim) const {
  std::vector<std::string> missing;
  const auto runs_ = runs(dim);
  for (const auto& s : strategies(dim)) {
    for (const auto& p : problems(dim)) {
      for (auto r : runs_) {
        if (!entries_.contains({s, p, dim, r})) {
          missing.push_back(s + "/" + p + "/" + std::to_string(dim) + "/" + std::to_string(r));
        }
      }
    }
  }
  return missing;
}

Vec ResultTable::sample(const std::string& strategy, const std::string& problem,
                        std::size_t dim) const {
  Vec out;
  for (auto r : runs(dim)) {
    if (auto v = get({strategy, problem, dim, r})) out.push_back(*v);
  }
  return out;
}

namespace {

void require_complete(const ResultTable& table, std::size_t dim) {
  const auto missing = table.missing_cells(dim);
  if (table.strategies(dim).empty()) {
    throw IncompleteDataError("no results for dimension " + std::to_string(dim));
  }
  if (missing.empty()) return;
  std::string msg = "incomplete results for dimension " + std::to_string(dim) + "; missing:";
  for (const auto& m : missing) msg += " " + m;
  throw IncompleteDataError(msg);
}

}  // namespace

Vec friedman_mean_ranks(const std::vector<Vec>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("friedman: no blocks");
  const std::size_t s = blocks.front().size();
  Vec sum(s, 0.0);
  for (const auto& block : blocks) {
    if (block.size() != s) throw std::invalid_argument("friedman: ragged blocks");
    const Vec r = average_ranks(block);
    for (std::size_t k = 0; k < s; ++k) sum[k] += r[k];
  }
  for (auto& v : sum) v /= static_cast<double>(blocks.size());
  return sum;
}

std::map<std::string, double> friedman_mean_ranks(const ResultTable& table, std::size_t dim,
                                                  FriedmanBlocks mode) {
  require_complete(table, dim);
  const auto strategies = table.strategies(dim);
  const auto problems = table.problems(dim);
  const auto runs = table.runs(dim);
  std::vector<Vec> blocks;
  for (const auto& p : problems) {
    if (mode == FriedmanBlocks::per_run) {
      for (auto r : runs) {
        Vec block;
        for (const auto& s : strategies) block.push_back(*table.get({s, p, dim, r}));
        blocks.push_back(std::move(block));
      }
    } else {
      Vec block;
      for (const auto& s : strategies) {
        const Vec v = table.sample(s, p, dim);
        block.push_back(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
      }
      blocks.push_back(std::move(block));
    }
  }
  const Vec ranks = friedman_mean_ranks(blocks);
  std::map<std::string, double> out;
  for (std::size_t k = 0; k < strategies.size(); ++k) out[strategies[k]] = ranks[k];
  return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: samples differ in length");
  Vec diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }
  WilcoxonResult res;
  res.n = diff.size();
  if (res.n == 0) return res;

  Vec mags(res.n);
  for (std::size_t i = 0; i < res.n; ++i) mags[i] = std::fabs(diff[i]);
  const Vec ranks = average_ranks(mags);
  for (std::size_t i = 0; i < res.n; ++i) (diff[i] > 0 ? res.w_plus : res.w_minus) += ranks[i];
  res.statistic = std::min(res.w_plus, res.w_minus);

  if (res.n <= kWilcoxonExactMax) {
    // Doubled average ranks are integers; count sign assignments per sum.
    std::vector<long> doubled(res.n);
    long total = 0;
    for (std::size_t i = 0; i < res.n; ++i) {
      doubled[i] = std::lround(2.0 * ranks[i]);
      total += doubled[i];
    }
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    long reach = 0;
    for (long r : doubled) {
      for (long s = reach; s >= 0; --s) {
        if (ways[s] != 0.0) ways[s + r] += ways[s];
      }
      reach += r;
    }
    const long observed = std::lround(2.0 * res.w_plus);
    double lower = 0.0, upper = 0.0;
    for (long s = 0; s <= total; ++s) {
      if (s <= observed) lower += ways[s];
      if (s >= observed) upper += ways[s];
    }
    const double all = std::ldexp(1.0, static_cast<int>(res.n));
    res.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    res.exact = true;
    return res;
  }

  const double n = static_cast<double>(res.n);
  double tie_term = 0.0;
  {
    Vec sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i + 1;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double mean = n * (n + 1) / 4.0;
  const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
  res.exact = false;
  if (var <= 0.0) return res;
  const double z = (res.w_plus - mean) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
  return res;
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  Vec v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int compare_paired(std::span<const double> baseline, std::span<const double> other,
                   double alpha) {
  const auto test = wilcoxon_signed_rank(baseline, other);
  if (!(test.p_value < alpha)) return 0;
  const double mb = median(baseline), mo = median(other);
  if (mb != mo) return mb < mo ? 1 : -1;
  const double ab = std::accumulate(baseline.begin(), baseline.end(), 0.0);
  const double ao = std::accumulate(other.begin(), other.end(), 0.0);
  if (ab != ao) return ab < ao ? 1 : -1;
  return 0;
}

std::map<std::string, Wdl> wdl_matrix(const ResultTable& table, const std::string& baseline,
                                      std::size_t dim, double alpha) {
  require_complete(table, dim);
  const auto strategies = table.strategies(dim);
  if (std::find(strategies.begin(), strategies.end(), baseline) == strategies.end()) {
    throw IncompleteDataError("baseline '" + baseline + "' has no results for dimension " +
                              std::to_string(dim));
  }
  std::map<std::string, Wdl> out;
  for (const auto& s : strategies) {
    Wdl tally;
    for (const auto& p : table.problems(dim)) {
      const Vec base = table.sample(baseline, p, dim);
      const Vec other = table.sample(s, p, dim);
      switch (compare_paired(base, other, alpha)) {
        case 1: ++tally.wins; break;
        case -1: ++tally.losses; break;
        default: ++tally.draws; break;
      }
    }
    out[s] = tally;
  }
  return out;
}

}  // namespace pso
