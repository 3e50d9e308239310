#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asmc/errors.hpp"
#include "asmc/model.hpp"
#include "asmc/rng.hpp"
#include "asmc/types.hpp"

namespace asmc {

// Multinomial resampling: n_out independent categorical draws proportional to
// the weights, implemented as a cumulative sum plus one binary search per
// draw. Weights must be strictly positive and finite.
std::vector<std::int32_t> multinomial_resample(std::span<const double> weights,
                                               int n_out, Rng& rng);

// Normalized weights obtained from log weights with a max shift, plus the
// plain average of the original-scale weights (the per-step mass factor).
struct WeightSet {
  std::vector<double> shifted;  // exp(logw - max), in (0, 1]
  double mean_weight = 0.0;     // (1/N) sum exp(logw)
};
WeightSet weights_from_log(std::span<const double> logw, int generation);

template <class State>
Cloud<State> init_cloud(const Model<State>& model, int n_particles, Rng& rng) {
  if (n_particles < 1) throw config_error("init_cloud: need at least one particle");
  Cloud<State> c;
  c.generation = 0;
  c.particles.reserve(n_particles);
  c.parent_index.resize(n_particles);
  for (int i = 0; i < n_particles; ++i) {
    c.particles.push_back(model.init_sampler(rng));
    c.parent_index[i] = i;
  }
  return c;
}

// Cloud average of the statistic feeding the step into generation n.
template <class State>
Vec cloud_statistic_mean(const Model<State>& model, const Cloud<State>& cloud,
                         int n) {
  const int d = model.statistic_dim(n);
  Vec acc = Vec::Zero(d);
  for (const State& x : cloud.particles) {
    Vec s = model.statistic(n, x);
    if (s.size() != d)
      throw model_error("statistic at generation " + std::to_string(n) +
                        " returned dimension " + std::to_string(s.size()) +
                        ", declared " + std::to_string(d));
    if (!s.allFinite())
      throw run_error("generation " + std::to_string(n) +
                      ": non-finite summary statistic");
    acc += s;
  }
  return acc / double(cloud.size());
}

namespace detail {

template <class State>
struct StepResult {
  Cloud<State> cloud;
  double mean_weight = 0.0;  // cloud average of the potential at xi
};

// One step at a pinned summary value: weight, resample, mutate.
template <class State>
StepResult<State> step_with_param(const Model<State>& model,
                                  const Cloud<State>& cloud, const Vec& xi,
                                  Rng& rng) {
  const int n = cloud.generation + 1;
  const int N = cloud.size();
  if (xi.size() != model.statistic_dim(n))
    throw model_error("step into generation " + std::to_string(n) +
                      ": summary value has dimension " +
                      std::to_string(xi.size()) + ", declared " +
                      std::to_string(model.statistic_dim(n)));

  std::vector<double> logw(N);
  for (int i = 0; i < N; ++i)
    logw[i] = model.log_potential(n - 1, xi, cloud.particles[i]);
  WeightSet ws = weights_from_log(logw, n);

  std::vector<std::int32_t> parents = multinomial_resample(ws.shifted, N, rng);

  StepResult<State> out;
  out.mean_weight = ws.mean_weight;
  out.cloud.generation = n;
  out.cloud.adapted_param = xi;
  out.cloud.parent_index = std::move(parents);
  out.cloud.particles.reserve(N);
  for (int j = 0; j < N; ++j)
    out.cloud.particles.push_back(model.kernel_sampler(
        n, xi, cloud.particles[out.cloud.parent_index[j]], rng));
  return out;
}

}  // namespace detail

// One adaptive step: the summary value is the average of the statistic over
// the incoming (pre-resampling) cloud.
template <class State>
Cloud<State> smc_step(const Model<State>& model, const Cloud<State>& cloud,
                      Rng& rng) {
  Vec xi = cloud_statistic_mean(model, cloud, cloud.generation + 1);
  return detail::step_with_param(model, cloud, xi, rng).cloud;
}

namespace detail {

template <class State, class XiFn>
RunRecord<State> run_with(const Model<State>& model, int n_particles,
                          std::uint64_t seed, XiFn&& xi_for) {
  Rng rng(seed);
  RunRecord<State> rec;
  rec.seed = seed;
  rec.clouds.push_back(init_cloud(model, n_particles, rng));
  rec.weight_products.push_back(1.0);
  rec.adapted_params.emplace_back();
  for (int n = 1; n <= model.horizon; ++n) {
    Vec xi = xi_for(rec.clouds.back(), n);
    StepResult<State> st = step_with_param(model, rec.clouds.back(), xi, rng);
    double mass = rec.weight_products.back() * st.mean_weight;
    if (!std::isfinite(mass) || mass <= 0.0)
      throw run_error("generation " + std::to_string(n) +
                      ": unnormalized mass became " + std::to_string(mass));
    rec.weight_products.push_back(mass);
    rec.adapted_params.push_back(std::move(xi));
    rec.clouds.push_back(std::move(st.cloud));
  }
  return rec;
}

}  // namespace detail

// Practical algorithm: summary values are estimated from the particles.
template <class State>
RunRecord<State> run_adaptive(const Model<State>& model, int n_particles,
                              std::uint64_t seed) {
  return detail::run_with(model, n_particles, seed,
                          [&](const Cloud<State>& c, int n) {
                            return cloud_statistic_mean(model, c, n);
                          });
}

// Perfect algorithm: summary values are the exact limiting means. Consumes
// randomness in exactly the same order as run_adaptive, so runs sharing a
// seed stay paired draw for draw.
template <class State>
RunRecord<State> run_perfect(const Model<State>& model, int n_particles,
                             std::uint64_t seed) {
  if (!model.exact_statistic_mean)
    throw config_error("run_perfect: model supplies no exact statistic means");
  return detail::run_with(model, n_particles, seed,
                          [&](const Cloud<State>&, int n) {
                            return model.exact_statistic_mean(n);
                          });
}

// Cloud average of a scalar test function.
template <class State, class Fn>
double estimate_normalized(const Cloud<State>& cloud, Fn&& phi) {
  if (cloud.size() == 0) throw run_error("estimate on empty cloud");
  double acc = 0.0;
  for (const State& x : cloud.particles) {
    double v = phi(x);
    if (!std::isfinite(v))
      throw run_error("generation " + std::to_string(cloud.generation) +
                      ": non-finite test function value");
    acc += v;
  }
  return acc / double(cloud.size());
}

// Unnormalized estimate at generation n: running mass times the cloud mean.
template <class State, class Fn>
double estimate_unnormalized(const RunRecord<State>& rec, int n, Fn&& phi) {
  if (n < 0 || n >= static_cast<int>(rec.clouds.size()))
    throw config_error("estimate_unnormalized: generation out of range");
  return rec.weight_products[n] * estimate_normalized(rec.clouds[n], phi);
}

}  // namespace asmc
