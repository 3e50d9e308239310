#pragma once

#include <functional>

#include "asmc/errors.hpp"
#include "asmc/rng.hpp"
#include "asmc/types.hpp"

namespace asmc {

// Summary-statistic families used for kernel and weight adaptation.
enum class StatKind {
  RawMoments,         // per-coordinate first and second raw moments
  MeanAndCovariance,  // window mean and sample covariance (1/(N-1))
  SquaredCoordinates, // second raw moments of the first `window_size` coords
  Constant,           // fixed vector; disables adaptation
};

struct StatisticSpec {
  StatKind kind = StatKind::Constant;
  int window_begin = 0;  // first coordinate the statistic looks at
  int window_size = 0;
  Vec constant;          // payload for StatKind::Constant

  // Flattened output size.
  int dimension() const;
};

// Pointwise evaluation for the kinds that are plain averages of a
// per-particle map (everything except MeanAndCovariance).
Vec eval_statistic_point(const StatisticSpec& spec, const Vec& x);

// Cloud-level evaluation. For MeanAndCovariance the covariance block uses the
// 1/(N-1) normalization and is packed as mean, then the upper triangle of the
// covariance row by row (diagonal included).
Vec eval_statistic(const StatisticSpec& spec, const Cloud<Vec>& cloud);

// Mutation kernel families. `floor` acts as a variance floor: adapted second
// moments below it are clamped before the proposal spread is formed.
struct KernelSpec {
  enum class Kind { RwmScaled, PcnCoordinate, Identity, CustomFinite };
  Kind kind = Kind::RwmScaled;
  double rho = 0.5;      // autoregression coefficient, in (0,1)
  double floor = 1e-8;   // minimum variance fed to a proposal
};

// Symmetric Gaussian random-walk Metropolis step whose per-coordinate scale
// is sqrt of the adapted second moment in xi (clamped at the floor). The
// acceptance uniform is consumed even when the move is sure to be accepted,
// keeping paired streams aligned. Consumes dim(x) normals + 1 uniform.
Vec rwm_scaled_step(const KernelSpec& spec, const Vec& xi,
                    const std::function<double(const Vec&)>& target_logdensity,
                    const Vec& x, Rng& rng);

// Log density of the random-walk proposal increment; the proposal is
// symmetric in u by construction, which tests check directly.
double rwm_proposal_logdensity(const KernelSpec& spec, const Vec& xi,
                               const Vec& u);

// Autoregressive coordinate proposal: coordinates j < dim(xi) are refreshed
// with the adapted variances xi_j, the rest with prior_variances_j, and the
// whole vector is accepted or rejected in one Metropolis-Hastings decision
// against the product-Gaussian target with prior_variances. An optional
// log-density ratio tilts the target away from that product reference.
// Consumes dim(x) normals + 1 uniform.
Vec pcn_coordinate_step(const KernelSpec& spec, const Vec& xi,
                        const Vec& prior_variances,
                        const std::function<double(const Vec&)>& target_logratio,
                        const Vec& x, Rng& rng);

}  // namespace asmc
