#include "asmc/tempering.hpp"

#include <algorithm>
#include <cmath>

namespace asmc {

namespace {

double log_sum_exp(const std::vector<double>& a) {
  double mx = *std::max_element(a.begin(), a.end());
  double s = 0.0;
  for (double x : a) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

double ess(std::span<const double> v_values, double lambda) {
  if (v_values.empty()) throw run_error("ess: empty value vector");
  if (lambda < 0.0) throw config_error("ess: negative lambda");
  for (double v : v_values)
    if (!std::isfinite(v)) throw run_error("ess: non-finite potential value");

  double mx = -std::numeric_limits<double>::infinity();
  for (double v : v_values) mx = std::max(mx, -lambda * v);
  double s1 = 0.0, s2 = 0.0;
  for (double v : v_values) {
    double a = -lambda * v - mx;
    s1 += std::exp(a);
    s2 += std::exp(2.0 * a);
  }
  return (s1 * s1) / (double(v_values.size()) * s2);
}

double ess_weighted(std::span<const double> weights,
                    std::span<const double> v_values, double lambda) {
  if (v_values.empty() || weights.size() != v_values.size())
    throw run_error("ess_weighted: bad input sizes");
  const std::size_t m = weights.size();
  std::vector<double> lp(m), l1(m), l2(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw run_error("ess_weighted: weights must be strictly positive");
    lp[i] = std::log(weights[i]);
    l1[i] = lp[i] - lambda * v_values[i];
    l2[i] = lp[i] - 2.0 * lambda * v_values[i];
  }
  // ESS = (sum p w)^2 / (sum p * sum p w^2), stable in log space.
  return std::exp(2.0 * log_sum_exp(l1) - log_sum_exp(lp) - log_sum_exp(l2));
}

double next_beta_from_values(std::span<const double> v_values,
                             double beta_current, double beta_star,
                             double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw config_error("next_beta: alpha must lie in (0,1)");
  if (beta_star < beta_current)
    throw config_error("next_beta: beta_star below the current rung");

  double lam_max = beta_star - beta_current;
  if (lam_max <= 0.0) return beta_star;
  if (ess(v_values, lam_max) >= alpha) return beta_star;

  // ESS is continuous and non-increasing in lambda, equals 1 at 0 and sits
  // below alpha at lam_max, so the root is bracketed.
  double lo = 0.0, hi = lam_max;
  for (int it = 0; it < 100 && (hi - lo) > 1e-10; ++it) {
    double mid = 0.5 * (lo + hi);
    if (ess(v_values, mid) >= alpha)
      lo = mid;
    else
      hi = mid;
  }
  return beta_current + 0.5 * (lo + hi);
}

}  // namespace asmc
