#pragma once

#include <string>

#include "asmc/model.hpp"
#include "asmc/oracle.hpp"
#include "asmc/tempering.hpp"

// Catalog of benchmark problems. Every finite-state entry carries an exactly
// computable twin of the sampler-facing model, so estimator laws can be
// compared against closed-form limits; the continuous entries are exact
// through other routes (product-Gaussian targets and the Gaussian annealing
// family have closed-form moments).
namespace asmc::models {

// A finite problem in both guises plus the default scalar test function
// (per-state values; the default is the indicator of the last state).
struct FiniteBundle {
  Model<int> adaptive;
  oracle::FiniteModel finite;
  Vec phi;
  std::string name;
};

// Two states, weights (1,2), frozen moves. The flow has a one-line closed
// form, which makes this の canonical smoke-test model.
FiniteBundle two_state(int horizon = 3);

// Three states with summary-coupled weights and mixture moves; adaptation
// genuinely shifts the limiting flow, so every variance term is exercised.
FiniteBundle three_state(int horizon = 5);

// Two states with summary-coupled moves designed to violate the stability
// condition: the practical and perfect algorithms separate at generation 2.
FiniteBundle two_state_drift(int horizon = 4);

// Independence moves into a fixed law: the flow is stationary and the
// relative variance of the mass estimate grows exactly linearly.
FiniteBundle homogeneous_chain(int horizon = 20);

// Posterior over a regular grid updated one likelihood factor at a time;
// moves are grid Metropolis steps whose reach adapts to the posterior
// spread. Kernels preserve the exact posterior for every summary value.
struct GridBayesConfig {
  int m = 3;
  int observations = 5;
};
FiniteBundle grid_bayes(const GridBayesConfig& cfg = {});

// Product-Gaussian target refreshed by autoregressive proposals whose first
// adapted_dim variances are estimated from the cloud. The weights are
// identically one; the perfect variant is an exact sampler.
struct ProductGaussianConfig {
  int adapted_dim = 4;
  int total_dim = 5;  // must exceed adapted_dim; the probe coordinate is free
  double rho = 0.7;
  double sigma2 = 1.0;
  int horizon = 1;
};
Model<Vec> product_gaussian(const ProductGaussianConfig& cfg);

// Default probe: indicator of a positive unadapted coordinate; mean 1/2.
double product_gaussian_phi(const Vec& x, int adapted_dim);

// Annealing problems over finite state spaces.
struct FiniteTemperingBundle {
  TemperingProblem<int> problem;
  oracle::FiniteTemperingModel finite;
  Vec phi;
  std::string name;
};

// Two states with potential (0,1): the rung recursion is solvable by hand.
FiniteTemperingBundle tempered_two_state(double beta0, double beta_star,
                                         double alpha);

// Discretized symmetric double well V(t) = t^2/2 + separation * exp(-t^2/2)
// on [-half_width, half_width]; separation 0 is a pure Gaussian potential.
struct BimodalGridConfig {
  double separation = 2.0;
  int m = 201;
  double half_width = 4.0;
  double beta0 = 0.0;
  double beta_star = 1.0;
  double alpha = 0.5;
};
FiniteTemperingBundle tempered_bimodal_grid(const BimodalGridConfig& cfg);

// Continuous Gaussian annealing: V(x) = x^2/2 over a unit-Gaussian base, so
// the mass ratio at beta is (1+beta)^{-1/2} and the limiting ladder solves
// a closed-form quadratic per rung.
struct GaussianTemperingConfig {
  double beta0 = 0.0;
  double beta_star = 1.0;
  double alpha = 0.5;
  double rho = 0.7;
  int extra_after_cap = 3;
};
TemperingProblem<double> tempered_gaussian(const GaussianTemperingConfig& cfg);

// Exact next rung of the Gaussian ladder above, used as an independent check.
double gaussian_ladder_next(double beta, double beta_star, double alpha);

}  // namespace asmc::models
