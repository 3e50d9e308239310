#include "asmc/adaptation.hpp"

#include <cmath>
#include <string>

namespace asmc {

int StatisticSpec::dimension() const {
  switch (kind) {
    case StatKind::RawMoments:
      return 2 * window_size;
    case StatKind::MeanAndCovariance:
      return window_size + window_size * (window_size + 1) / 2;
    case StatKind::SquaredCoordinates:
      return window_size;
    case StatKind::Constant:
      return static_cast<int>(constant.size());
  }
  return 0;
}

namespace {

void check_window(const StatisticSpec& spec, const Vec& x) {
  if (spec.window_begin < 0 || spec.window_size < 0 ||
      spec.window_begin + spec.window_size > x.size())
    throw model_error("statistic window [" + std::to_string(spec.window_begin) +
                      ", +" + std::to_string(spec.window_size) +
                      ") exceeds state dimension " + std::to_string(x.size()));
}

}  // namespace

Vec eval_statistic_point(const StatisticSpec& spec, const Vec& x) {
  switch (spec.kind) {
    case StatKind::RawMoments: {
      check_window(spec, x);
      Vec out(2 * spec.window_size);
      for (int j = 0; j < spec.window_size; ++j) {
        double v = x[spec.window_begin + j];
        out[j] = v;
        out[spec.window_size + j] = v * v;
      }
      return out;
    }
    case StatKind::SquaredCoordinates: {
      StatisticSpec w = spec;
      w.window_begin = 0;  // always the leading coordinates
      check_window(w, x);
      Vec out(spec.window_size);
      for (int j = 0; j < spec.window_size; ++j) out[j] = x[j] * x[j];
      return out;
    }
    case StatKind::Constant:
      return spec.constant;
    case StatKind::MeanAndCovariance:
      throw config_error(
          "mean-and-covariance statistic has no pointwise form; use "
          "eval_statistic on a cloud");
  }
  throw config_error("unknown statistic kind");
}

Vec eval_statistic(const StatisticSpec& spec, const Cloud<Vec>& cloud) {
  const int N = cloud.size();
  if (N == 0) throw run_error("eval_statistic: empty cloud");

  if (spec.kind != StatKind::MeanAndCovariance) {
    Vec acc = Vec::Zero(spec.dimension());
    for (const Vec& x : cloud.particles) acc += eval_statistic_point(spec, x);
    return acc / double(N);
  }

  if (N < 2)
    throw run_error("eval_statistic: sample covariance needs at least two "
                    "particles");
  check_window(spec, cloud.particles.front());
  const int w = spec.window_size;
  Vec mean = Vec::Zero(w);
  for (const Vec& x : cloud.particles) mean += x.segment(spec.window_begin, w);
  mean /= double(N);
  Mat cov = Mat::Zero(w, w);
  for (const Vec& x : cloud.particles) {
    Vec c = x.segment(spec.window_begin, w) - mean;
    cov += c * c.transpose();
  }
  cov /= double(N - 1);

  Vec out(spec.dimension());
  out.head(w) = mean;
  int k = w;
  for (int i = 0; i < w; ++i)
    for (int j = i; j < w; ++j) out[k++] = cov(i, j);
  return out;
}

Vec rwm_scaled_step(const KernelSpec& spec, const Vec& xi,
                    const std::function<double(const Vec&)>& target_logdensity,
                    const Vec& x, Rng& rng) {
  if (xi.size() != x.size())
    throw model_error("rwm_scaled_step: scale vector has dimension " +
                      std::to_string(xi.size()) + ", state has " +
                      std::to_string(x.size()));
  double ld0 = target_logdensity(x);
  if (!std::isfinite(ld0))
    throw run_error("rwm_scaled_step: target log density not finite at the "
                    "current point");

  Vec y(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double sigma = std::sqrt(std::max(spec.floor, xi[j]));
    y[j] = x[j] + sigma * rng.normal();
  }
  double ld1 = target_logdensity(y);
  double log_u = std::log(rng.uniform_pos());  // always consumed
  if (std::isfinite(ld1) && log_u <= ld1 - ld0) return y;
  return x;
}

double rwm_proposal_logdensity(const KernelSpec& spec, const Vec& xi,
                               const Vec& u) {
  if (xi.size() != u.size())
    throw model_error("rwm_proposal_logdensity: dimension mismatch");
  constexpr double log_two_pi = 1.83787706640934548356065947281;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    double var = std::max(spec.floor, xi[j]);
    acc += -0.5 * (log_two_pi + std::log(var) + u[j] * u[j] / var);
  }
  return acc;
}

Vec pcn_coordinate_step(const KernelSpec& spec, const Vec& xi,
                        const Vec& prior_variances,
                        const std::function<double(const Vec&)>& target_logratio,
                        const Vec& x, Rng& rng) {
  const int d = static_cast<int>(xi.size());
  const int dim = static_cast<int>(x.size());
  if (prior_variances.size() != dim)
    throw model_error("pcn_coordinate_step: prior variance vector has "
                      "dimension " + std::to_string(prior_variances.size()) +
                      ", state has " + std::to_string(dim));
  if (d > dim)
    throw model_error("pcn_coordinate_step: more adapted variances than state "
                      "coordinates");
  const double rho = spec.rho;
  if (!(rho > 0.0 && rho < 1.0))
    throw config_error("pcn_coordinate_step: rho must lie in (0,1)");
  const double comp = std::sqrt(1.0 - rho * rho);

  Vec y(dim);
  double log_alpha = 0.0;
  for (int j = 0; j < dim; ++j) {
    double var = j < d ? std::max(spec.floor, xi[j]) : prior_variances[j];
    y[j] = rho * x[j] + comp * std::sqrt(var) * rng.normal();
    if (j < d) {
      // Metropolis-Hastings correction for refreshing with the adapted
      // variance while targeting the prior one; exact zero when they agree.
      double inv_diff = 1.0 / var - 1.0 / prior_variances[j];
      log_alpha += -0.5 * inv_diff * (x[j] * x[j] - y[j] * y[j]);
    }
  }
  if (target_logratio) log_alpha += target_logratio(y) - target_logratio(x);

  double log_u = std::log(rng.uniform_pos());  // always consumed
  if (std::isfinite(log_alpha) && log_u <= log_alpha) return y;
  return x;
}

}  // namespace asmc
