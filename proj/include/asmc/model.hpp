#pragma once

#include <functional>

#include "asmc/rng.hpp"
#include "asmc/types.hpp"

namespace asmc {

// Problem definition consumed by the particle engine.
//
// Indexing convention: the step that produces generation n (n >= 1) evaluates
// the summary statistic of index n on the generation n-1 cloud, weights with
// the potential of index n-1, and mutates with the kernel of index n. The
// potential is supplied in log form and must be finite everywhere, which is
// the same thing as requiring a strictly positive potential.
template <class State>
struct Model {
  int horizon = 0;

  std::function<State(Rng&)> init_sampler;

  // log G_{p}(x) at summary value xi; p runs over 0 .. horizon-1.
  std::function<double(int p, const Vec& xi, const State& x)> log_potential;

  // One draw from the mutation kernel of index n at summary value xi.
  std::function<State(int n, const Vec& xi, const State& x, Rng&)> kernel_sampler;

  // Summary statistic of index n evaluated at a single point; the engine
  // averages it over the cloud. n runs over 1 .. horizon.
  std::function<Vec(int n, const State& x)> statistic;
  std::function<int(int n)> statistic_dim;
  std::function<Box(int n)> statistic_domain;

  // Exact mean of statistic n under the limiting generation-(n-1) law.
  // Optional; required only to run the perfect (non-adaptive) variant.
  std::function<Vec(int n)> exact_statistic_mean;
};

}  // namespace asmc
