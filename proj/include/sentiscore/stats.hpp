#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "sentiscore/corpus.hpp"
#include "sentiscore/error.hpp"

namespace sentiscore {

// n, arithmetic mean and sample standard deviation (n-1 denominator;
// reported as 0 for a singleton).
struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

struct TestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

struct GroupComparison {
  SampleSummary a;
  SampleSummary b;
  TestResult pooled;
  TestResult welch;
};

namespace detail {

// Continued fraction for the regularized incomplete beta function,
// evaluated with the modified Lentz algorithm.
// https://en.wikipedia.org/wiki/Beta_function#Incomplete_beta_function
inline double incomplete_beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace detail

inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw RangeError("incomplete beta requires a > 0 and b > 0");
  }
  if (x < 0.0 || x > 1.0) {
    throw RangeError("incomplete beta requires x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  // Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) to keep the continued
  // fraction in its fast-converging region.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta);
    return front * detail::incomplete_beta_cf(a, b, x) / a;
  }
  const double front =
      std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta);
  return 1.0 - front * detail::incomplete_beta_cf(b, a, 1.0 - x) / b;
}

// Two-tailed p-value of Student's t via p = I_{df/(df+t^2)}(df/2, 1/2).
inline double t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) {
    throw RangeError("degrees of freedom must be positive");
  }
  if (!std::isfinite(t)) {
    return 0.0;
  }
  const double x = df / (df + t * t);
  double p = regularized_incomplete_beta(df / 2.0, 0.5, x);
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

inline SampleSummary describe(const std::vector<double>& samples) {
  if (samples.empty()) {
    throw EmptyInputError("describe: empty sample");
  }
  SampleSummary s;
  s.n = samples.size();
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n == 1) {
    s.sd = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double v : samples) {
    const double d = v - s.mean;
    ss += d * d;
  }
  s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  return s;
}

// Classic pooled-variance two-sample t-test, df = nA + nB - 2.
inline TestResult pooled_t_from_summary(const SampleSummary& a,
                                        const SampleSummary& b) {
  if (a.n < 2 || b.n < 2) {
    throw InsufficientDataError("pooled t-test needs n >= 2 in both groups");
  }
  TestResult r;
  r.df = static_cast<double>(a.n + b.n - 2);
  const double pooled_var =
      (static_cast<double>(a.n - 1) * a.sd * a.sd +
       static_cast<double>(b.n - 1) * b.sd * b.sd) /
      r.df;
  const double denom = std::sqrt(
      pooled_var * (1.0 / static_cast<double>(a.n) + 1.0 / static_cast<double>(b.n)));
  if (denom == 0.0) {
    if (a.mean == b.mean) {
      r.t = 0.0;
      r.p = 1.0;
      return r;
    }
    throw DegenerateVarianceError("pooled t-test: zero variance in both groups");
  }
  r.t = (a.mean - b.mean) / denom;
  r.p = t_two_tailed_p(r.t, r.df);
  return r;
}

// Welch's t-test with Welch-Satterthwaite degrees of freedom.
inline TestResult welch_t_from_summary(const SampleSummary& a,
                                       const SampleSummary& b) {
  if (a.n < 2 || b.n < 2) {
    throw InsufficientDataError("Welch t-test needs n >= 2 in both groups");
  }
  const double ra = a.sd * a.sd / static_cast<double>(a.n);
  const double rb = b.sd * b.sd / static_cast<double>(b.n);
  if (ra + rb == 0.0) {
    throw DegenerateVarianceError("Welch t-test: zero variance in both groups");
  }
  TestResult r;
  r.t = (a.mean - b.mean) / std::sqrt(ra + rb);
  r.df = (ra + rb) * (ra + rb) /
         (ra * ra / static_cast<double>(a.n - 1) +
          rb * rb / static_cast<double>(b.n - 1));
  r.p = t_two_tailed_p(r.t, r.df);
  return r;
}

inline GroupComparison compare_group_samples(const std::vector<double>& a,
                                             const std::vector<double>& b) {
  GroupComparison cmp;
  cmp.a = describe(a);
  cmp.b = describe(b);
  cmp.pooled = pooled_t_from_summary(cmp.a, cmp.b);
  cmp.welch = welch_t_from_summary(cmp.a, cmp.b);
  return cmp;
}

// ---------------------------------------------------------------------------
// Psychometric group splits.

using ParticipantSplit =
    std::pair<std::vector<ParticipantRecord>, std::vector<ParticipantRecord>>;

// CES-D cutoff is inclusive: cesd >= cutoff lands in the depressed group.
inline ParticipantSplit split_by_cesd(
    const std::vector<ParticipantRecord>& participants, int cutoff = 21) {
  ParticipantSplit split;
  for (const ParticipantRecord& p : participants) {
    (p.cesd >= cutoff ? split.first : split.second).push_back(p);
  }
  return split;
}

// PANAS grouping uses the combined positive + negative score; strictly
// above the threshold lands in the higher-affect group.
inline ParticipantSplit split_by_panas(
    const std::vector<ParticipantRecord>& participants,
    double threshold = 61.890) {
  ParticipantSplit split;
  for (const ParticipantRecord& p : participants) {
    const double combined = p.panas_positive + p.panas_negative;
    (combined > threshold ? split.first : split.second).push_back(p);
  }
  return split;
}

}  // namespace sentiscore
