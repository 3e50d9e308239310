#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "asmc/engine.hpp"
#include "asmc/errors.hpp"
#include "asmc/rng.hpp"
#include "asmc/types.hpp"

namespace asmc {

// Effective sample size of the reweighting e^{-lambda V} over an
// equally-weighted cloud of V values: (mean w)^2 / mean w^2, in (0, 1].
// Exactly 1 at lambda = 0 and for constant V.
double ess(std::span<const double> v_values, double lambda);

// Same functional on an explicitly weighted finite measure; used by the
// exact-ladder computations.
double ess_weighted(std::span<const double> weights,
                    std::span<const double> v_values, double lambda);

// Smallest beta in (beta_current, beta_star] at which the ESS of the
// incremental reweighting drops to alpha. If even the full remaining gap
// keeps the ESS at or above alpha, returns beta_star (the inf over an empty
// set). Interior solutions come from bisection with a 1e-10 absolute
// tolerance on beta and a 100-iteration cap.
double next_beta_from_values(std::span<const double> v_values,
                             double beta_current, double beta_star,
                             double alpha);

// Annealing problem description. The kernel family must leave the tempered
// law at inverse temperature beta invariant for every admissible summary
// value; that is the model author's contract, and the finite-state oracle
// verifies it for the catalog models.
template <class State>
struct TemperingProblem {
  std::function<double(const State&)> potential;  // V, bounded on the support
  double beta0 = 0.0;
  double beta_star = 1.0;
  double alpha = 0.5;  // ESS target in (0,1)

  std::function<State(const Vec& xi, double beta, const State& x, Rng&)> kernel;
  std::function<Vec(const State&)> statistic;
  int statistic_dim = 0;
  std::function<State(Rng&)> init_sampler;  // samples the beta0 tempered law

  int extra_after_cap = 3;   // generations run at beta_star once reached
  int max_generations = 200; // hard safety cap on ladder length
  int mutations_per_temperature = 1;
};

template <class State>
struct TemperingState {
  double beta_current = 0.0;
  std::vector<double> potential_values;  // V over the current cloud
  int generation = 0;
};

template <class State>
double next_beta(const TemperingState<State>& st,
                 const TemperingProblem<State>& problem) {
  return next_beta_from_values(st.potential_values, st.beta_current,
                               problem.beta_star, problem.alpha);
}

template <class State>
struct TemperedRun {
  RunRecord<State> record;
  std::vector<double> ladder;  // beta per generation; ladder[0] == beta0
};

// Adaptive-tempering driver. Each generation: choose the next rung from the
// current cloud, weight by e^{-(gap) V}, resample, mutate at the new rung.
// The summary value handed to the kernel is the cloud average of the
// statistic before resampling. Once the ladder reaches beta_star the run
// continues with zero gaps (weights exactly one) for extra_after_cap more
// generations.
template <class State>
TemperedRun<State> tempered_run(const TemperingProblem<State>& problem,
                                int n_particles, std::uint64_t seed) {
  if (n_particles < 2)
    throw config_error("tempered_run: need at least two particles");
  if (!(problem.alpha > 0.0 && problem.alpha < 1.0))
    throw config_error("tempered_run: alpha must lie in (0,1)");
  if (problem.beta_star < problem.beta0)
    throw config_error("tempered_run: beta_star below beta0");

  Rng rng(seed);
  TemperedRun<State> out;
  out.record.seed = seed;
  out.record.clouds.push_back(Cloud<State>{});
  Cloud<State>& c0 = out.record.clouds.back();
  c0.generation = 0;
  c0.particles.reserve(n_particles);
  c0.parent_index.resize(n_particles);
  for (int i = 0; i < n_particles; ++i) {
    c0.particles.push_back(problem.init_sampler(rng));
    c0.parent_index[i] = i;
  }
  out.record.weight_products.push_back(1.0);
  out.record.adapted_params.emplace_back();
  out.ladder.push_back(problem.beta0);

  int at_cap = 0;
  while (static_cast<int>(out.ladder.size()) - 1 < problem.max_generations) {
    const Cloud<State>& cur = out.record.clouds.back();
    double beta_cur = out.ladder.back();
    if (beta_cur >= problem.beta_star) {
      if (at_cap >= problem.extra_after_cap) break;
      ++at_cap;
    }

    const int n = cur.generation + 1;
    std::vector<double> v(n_particles);
    for (int i = 0; i < n_particles; ++i) {
      v[i] = problem.potential(cur.particles[i]);
      if (!std::isfinite(v[i]))
        throw run_error("generation " + std::to_string(n) +
                        ": non-finite potential value");
    }
    double beta_next =
        beta_cur >= problem.beta_star
            ? problem.beta_star
            : next_beta_from_values(v, beta_cur, problem.beta_star,
                                    problem.alpha);
    double gap = beta_next - beta_cur;

    Vec xi = Vec::Zero(problem.statistic_dim);
    for (int i = 0; i < n_particles; ++i) {
      Vec s = problem.statistic(cur.particles[i]);
      if (s.size() != problem.statistic_dim)
        throw model_error("tempering statistic dimension mismatch");
      xi += s;
    }
    xi /= double(n_particles);

    std::vector<double> logw(n_particles);
    for (int i = 0; i < n_particles; ++i) logw[i] = -gap * v[i];
    WeightSet ws = weights_from_log(logw, n);
    out.record.weight_products.push_back(out.record.weight_products.back() *
                                         ws.mean_weight);

    std::vector<std::int32_t> parents =
        multinomial_resample(ws.shifted, n_particles, rng);
    Cloud<State> next;
    next.generation = n;
    next.adapted_param = xi;
    next.parent_index = std::move(parents);
    next.particles.reserve(n_particles);
    for (int j = 0; j < n_particles; ++j) {
      State s = cur.particles[next.parent_index[j]];
      for (int k = 0; k < problem.mutations_per_temperature; ++k)
        s = problem.kernel(xi, beta_next, s, rng);
      next.particles.push_back(std::move(s));
    }
    out.record.clouds.push_back(std::move(next));
    out.record.adapted_params.push_back(std::move(xi));
    out.ladder.push_back(beta_next);
  }
  return out;
}

}  // namespace asmc
