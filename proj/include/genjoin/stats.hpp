#pragma once

#include <string>
#include <vector>

#include "genjoin/engine.hpp"

namespace genjoin {

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_one_tailed = 0.5;  // small p <=> sample_i significantly slower
};

/// Welch's t-test for two independent samples:
///   t  = (mean_i - mean_j) / sqrt(s_i^2/n_i + s_j^2/n_j)
///   df by Welch-Satterthwaite
///   p  = 1 - CDF_t(t; df), one-tailed.
/// Both samples need >= 2 measurements. When both variances are zero and the
/// means are equal the statistic is undefined and p = 0.5 is returned.
TTestResult welch_t(const ExecutionSample& sample_i, const ExecutionSample& sample_j);

/// Student-t CDF via the regularized incomplete beta function (modified
/// Lentz continued fraction, tolerance 1e-10). df must be > 0.
double t_cdf(double t, double df);

/// Regularized incomplete beta I_x(a, b); exposed for the test oracles.
double regularized_incomplete_beta(double x, double a, double b);

/// Standard normal quantile (inverse CDF). p in (0, 1).
double normal_quantile(double p);

struct QuerySamplePair {
  std::string query_id;
  ExecutionSample method;
  ExecutionSample baseline;
};

struct WorkloadDiff {
  double total_difference = 0.0;  // ms; positive => method faster
  double ci_half_width = 0.0;     // ms
  struct PerQuery {
    std::string query_id;
    double mean_difference;   // baseline mean - method mean
    double pooled_variance;   // s_m^2/n_m + s_b^2/n_b
  };
  std::vector<PerQuery> per_query;
};

/// Unnormalized workload difference: total = sum(mean_base - mean_method),
/// variance of the sum = sum of per-query pooled variances, CI half width =
/// z_{(1+confidence)/2} * sqrt(variance).
WorkloadDiff workload_difference(const std::vector<QuerySamplePair>& pairs,
                                 double confidence = 0.95);

}  // namespace genjoin
