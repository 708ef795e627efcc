#include "genjoin/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace genjoin {

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta function, modified Lentz.
double incbeta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double tol = 1e-12;
  constexpr int max_terms = 300;

  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double result = d;

  for (int m = 1; m <= max_terms; ++m) {
    double m_d = static_cast<double>(m);
    // even term
    double numer = m_d * (b - m_d) * x / ((a + 2.0 * m_d - 1.0) * (a + 2.0 * m_d));
    d = 1.0 + numer * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + numer / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    result *= d * c;
    // odd term
    numer = -(a + m_d) * (a + b + m_d) * x /
            ((a + 2.0 * m_d) * (a + 2.0 * m_d + 1.0));
    d = 1.0 + numer * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + numer / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    result *= delta;
    if (std::fabs(delta - 1.0) < tol) break;
  }
  return result;
}

double sample_var(const ExecutionSample& s) {
  double sd = s.stddev();
  return sd * sd;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a,b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
  // Use the convergent-fastest side of the symmetry relation.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * incbeta_cf(x, a, b) / a;
  return 1.0 - std::exp(b * std::log(1.0 - x) + a * std::log(x) - log_beta(b, a)) *
                   incbeta_cf(1.0 - x, b, a) / b;
}

double t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("t_cdf: df must be > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  if (t == 0.0) return 0.5;
  double x = df / (t * t + df);
  double tail = 0.5 * regularized_incomplete_beta(x, 0.5 * df, 0.5);
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult welch_t(const ExecutionSample& sample_i, const ExecutionSample& sample_j) {
  const std::size_t ni = sample_i.durations.size();
  const std::size_t nj = sample_j.durations.size();
  if (ni < 2 || nj < 2)
    throw std::invalid_argument("welch_t: both samples need >= 2 measurements");

  double mi = sample_i.mean(), mj = sample_j.mean();
  double vi = sample_var(sample_i) / static_cast<double>(ni);
  double vj = sample_var(sample_j) / static_cast<double>(nj);
  double denom2 = vi + vj;

  TTestResult r;
  if (denom2 == 0.0) {
    // degenerate: no spread at all
    r.degrees_of_freedom = static_cast<double>(ni + nj - 2);
    if (mi == mj) {
      r.t_statistic = 0.0;
      r.p_one_tailed = 0.5;
    } else {
      r.t_statistic = mi > mj ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
      r.p_one_tailed = mi > mj ? 0.0 : 1.0;
    }
    return r;
  }

  r.t_statistic = (mi - mj) / std::sqrt(denom2);
  r.degrees_of_freedom =
      denom2 * denom2 /
      (vi * vi / static_cast<double>(ni - 1) + vj * vj / static_cast<double>(nj - 1));
  r.p_one_tailed = 1.0 - t_cdf(r.t_statistic, r.degrees_of_freedom);
  return r;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p in (0,1)");
  // Acklam's rational approximation, then one Halley refinement on erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r2 = q * q;
    x = (((((a[0] * r2 + a[1]) * r2 + a[2]) * r2 + a[3]) * r2 + a[4]) * r2 + a[5]) * q /
        (((((b[0] * r2 + b[1]) * r2 + b[2]) * r2 + b[3]) * r2 + b[4]) * r2 + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step: e = Phi(x) - p
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

WorkloadDiff workload_difference(const std::vector<QuerySamplePair>& pairs,
                                 double confidence) {
  if (pairs.empty()) throw std::invalid_argument("workload_difference: empty pair list");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("workload_difference: confidence in (0,1)");

  WorkloadDiff diff;
  double variance = 0.0;
  for (const QuerySamplePair& p : pairs) {
    if (p.method.durations.size() < 2 || p.baseline.durations.size() < 2)
      throw std::invalid_argument("workload_difference: samples need >= 2 measurements");
    double md = p.baseline.mean() - p.method.mean();
    double pooled = sample_var(p.method) / static_cast<double>(p.method.durations.size()) +
                    sample_var(p.baseline) / static_cast<double>(p.baseline.durations.size());
    diff.total_difference += md;
    variance += pooled;
    diff.per_query.push_back({p.query_id, md, pooled});
  }
  diff.ci_half_width = normal_quantile(0.5 * (1.0 + confidence)) * std::sqrt(variance);
  return diff;
}

}  // namespace genjoin
