#include "ocpg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ocpg/errors.hpp"

namespace ocpg {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n - 1)
  long n = 0;
};

Moments moments(std::span<const double> xs) {
  Moments m;
  m.n = static_cast<long>(xs.size());
  if (m.n == 0) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(m.n - 1);
  }
  return m;
}

// Common t-statistic handling when the scale estimate degenerates to zero:
// equal means report p = 1, unequal means are an infinitely strong rejection.
TestResult finish_t_test(double numerator, double scale, double dof, double alpha) {
  TestResult r;
  if (scale <= 0.0) {
    if (numerator == 0.0) {
      r.statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.statistic = numerator > 0.0 ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
  } else {
    r.statistic = numerator / scale;
    r.p_value = student_t_two_sided_p(r.statistic, dof);
  }
  r.reject = r.p_value < alpha;
  return r;
}

std::vector<double> midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

// Visits every n-subset of {0, ..., total-1} and reports its rank sum.
void for_each_subset_rank_sum(const std::vector<double>& ranks, std::size_t n,
                              const std::function<void(double)>& visit) {
  const std::size_t total = ranks.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    double sum = 0.0;
    for (std::size_t k : idx) sum += ranks[k];
    visit(sum);
    // next combination
    std::size_t i = n;
    while (i-- > 0) {
      if (idx[i] != i + total - n) {
        ++idx[i];
        for (std::size_t j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
  }
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ContractError("incomplete beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw ContractError("student t: dof must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double student_t_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw ContractError("student t quantile: p must be in (0,1)");
  double lo = -1.0, hi = 1.0;
  while (student_t_cdf(lo, dof) > p) lo *= 2.0;
  while (student_t_cdf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, dof) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double evaluate_policy(const Policy& policy, Environment& env, int n_episodes,
                       std::uint64_t eval_seed) {
  if (n_episodes < 1) throw ContractError("evaluate_policy: n_episodes must be >= 1");
  env.seed(eval_seed);
  const Vector& bound = env.spec().action_bound;
  double total = 0.0;
  for (int ep = 0; ep < n_episodes; ++ep) {
    Vector state = env.reset();
    bool done = false;
    while (!done) {
      const Vector action = policy(state).cwiseMax(-bound).cwiseMin(bound);
      auto step = env.step(action);
      total += step.reward;
      state = std::move(step.next_state);
      done = step.terminal;
    }
  }
  return total / static_cast<double>(n_episodes);
}

std::vector<double> converged_rewards(const EvalCurve& curve, int tail) {
  std::vector<double> out;
  out.reserve(curve.series.size());
  for (const auto& series : curve.series) {
    if (static_cast<int>(series.size()) < tail) {
      throw UsageError("converged_rewards: need at least " + std::to_string(tail) +
                       " evaluation points, have " + std::to_string(series.size()));
    }
    double sum = 0.0;
    for (std::size_t i = series.size() - static_cast<std::size_t>(tail); i < series.size(); ++i) {
      sum += series[i].reward;
    }
    out.push_back(sum / static_cast<double>(tail));
  }
  return out;
}

EvalSeries smooth_series(const EvalSeries& series) {
  const long n = static_cast<long>(series.size());
  if (n == 0) return {};
  const long window = std::max<long>(1, std::lround(0.05 * static_cast<double>(n)));
  EvalSeries out(series.size());
  double running = 0.0;
  for (long i = 0; i < n; ++i) {
    running += series[static_cast<std::size_t>(i)].reward;
    if (i >= window) running -= series[static_cast<std::size_t>(i - window)].reward;
    const long count = std::min(window, i + 1);
    out[static_cast<std::size_t>(i)] = {series[static_cast<std::size_t>(i)].step,
                                        running / static_cast<double>(count)};
  }
  return out;
}

Ci confidence_interval(std::span<const double> values, double level) {
  if (values.size() < 2) throw UsageError("confidence_interval: need at least 2 values");
  const Moments m = moments(values);
  const double q = student_t_quantile(0.5 + 0.5 * level, static_cast<double>(m.n - 1));
  return {m.mean, q * std::sqrt(m.variance / static_cast<double>(m.n))};
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() < 2 || b.size() < 2) throw UsageError("welch t: need n >= 2 per group");
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const double va = ma.variance / static_cast<double>(ma.n);
  const double vb = mb.variance / static_cast<double>(mb.n);
  const double scale = std::sqrt(va + vb);
  double dof = 1.0;
  if (va + vb > 0.0) {
    dof = (va + vb) * (va + vb) /
          (va * va / static_cast<double>(ma.n - 1) + vb * vb / static_cast<double>(mb.n - 1));
  }
  return finish_t_test(ma.mean - mb.mean, scale, dof, alpha);
}

TestResult student_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() < 2 || b.size() < 2) throw UsageError("student t: need n >= 2 per group");
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const double dof = static_cast<double>(ma.n + mb.n - 2);
  const double pooled = ((static_cast<double>(ma.n - 1)) * ma.variance +
                         (static_cast<double>(mb.n - 1)) * mb.variance) /
                        dof;
  const double scale =
      std::sqrt(pooled * (1.0 / static_cast<double>(ma.n) + 1.0 / static_cast<double>(mb.n)));
  return finish_t_test(ma.mean - mb.mean, scale, dof, alpha);
}

TestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) throw UsageError("paired t: groups must have equal length");
  if (a.size() < 2) throw UsageError("paired t: need n >= 2");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const Moments m = moments(diff);
  const double scale = std::sqrt(m.variance / static_cast<double>(m.n));
  return finish_t_test(m.mean, scale, static_cast<double>(m.n - 1), alpha);
}

TestResult wilcoxon_rank_sum_test(std::span<const double> a, std::span<const double> b,
                                  double alpha) {
  if (a.size() < 2 || b.size() < 2) throw UsageError("wilcoxon: need n >= 2 per group");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t total = n + m;
  std::vector<double> pooled;
  pooled.reserve(total);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);

  TestResult r;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) rank_sum += ranks[i];
  r.statistic = rank_sum;
  const double expected = static_cast<double>(n) * static_cast<double>(total + 1) / 2.0;

  if (std::max(n, m) <= 7) {
    // Exact two-sided tail by full enumeration of group assignments; handles
    // ties because enumeration runs over the observed midranks.
    const double observed_dev = std::abs(rank_sum - expected);
    long as_extreme = 0;
    long count = 0;
    for_each_subset_rank_sum(ranks, n, [&](double w) {
      ++count;
      if (std::abs(w - expected) >= observed_dev - 1e-12) ++as_extreme;
    });
    r.p_value = static_cast<double>(as_extreme) / static_cast<double>(count);
  } else {
    // Tie-corrected rank variance.
    double tie_term = 0.0;
    {
      std::vector<double> sorted(pooled);
      std::sort(sorted.begin(), sorted.end());
      std::size_t i = 0;
      while (i < total) {
        std::size_t j = i;
        while (j + 1 < total && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
      }
    }
    const double nm = static_cast<double>(n) * static_cast<double>(m);
    const double variance =
        nm / 12.0 *
        (static_cast<double>(total + 1) -
         tie_term / (static_cast<double>(total) * static_cast<double>(total - 1)));
    if (variance <= 0.0) {
      r.p_value = 1.0;  // all pooled values identical
    } else {
      const double z = (rank_sum - expected) / std::sqrt(variance);
      r.p_value = 2.0 * normal_cdf(-std::abs(z));
    }
  }
  r.reject = r.p_value < alpha;
  return r;
}

StatReport significance_tests(std::span<const double> a, std::span<const double> b, double alpha) {
  StatReport report;
  report.welch = welch_t_test(a, b, alpha);
  report.student = student_t_test(a, b, alpha);
  report.paired = paired_t_test(a, b, alpha);
  report.wilcoxon = wilcoxon_rank_sum_test(a, b, alpha);
  return report;
}

}  // namespace ocpg
