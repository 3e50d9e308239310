#pragma once

#include <functional>
#include <vector>

#include "asmc/errors.hpp"
#include "asmc/types.hpp"

// Exact computations on finite state spaces: limiting flows, the backward
// semigroup driving the asymptotic variances of the adaptive algorithm, the
// limiting annealing ladder, and the joint rung/estimate covariance for
// adaptive tempering. Everything here is deterministic dense linear algebra,
// intended for state counts up to a few thousand.
namespace asmc::oracle {

struct FiniteModel {
  int state_count = 0;
  int horizon = 0;
  Vec eta0;  // initial probability vector

  // G_{p}(.) at summary value xi, strictly positive; p in 0 .. horizon-1.
  std::function<Vec(int p, const Vec& xi)> potential;
  // Row-stochastic transition matrix of index n at summary value xi.
  std::function<Mat(int n, const Vec& xi)> kernel;
  // Per-state values of the summary statistic of index n (m x d_n).
  std::function<Mat(int n)> statistic;
  std::function<Box(int n)> statistic_domain;

  // Optional analytic derivative of xi |-> Q_n(phi) in direction j, used to
  // cross-check the finite-difference path.
  std::function<Mat(int n, const Vec& xi, int j, const Mat& phi)> analytic_dq;
};

struct FlowResult {
  std::vector<Vec> eta;      // [0..horizon]
  std::vector<double> gamma; // unnormalized masses; gamma[0] == 1
  std::vector<double> mass;  // mass[n] = gamma[n]/gamma[n-1]; mass[0] == 1
  std::vector<Vec> xi_bar;   // [n] = exact summary mean driving step n
};

struct FdOptions {
  double step = 1e-5;               // relative central-difference step
  bool zero_adaptation_term = false;  // drop the summary-derivative term
};

// Exact limiting flow of the adaptive algorithm.
FlowResult exact_flow(const FiniteModel& model, int horizon);

// Covariance of the columns of phi (m x r) under the probability vector eta.
Mat cov_under(const Vec& eta, const Mat& phi);

// One application of the step-p backward transport: the summary-derivative
// coupling plus the plain two-step operator.
Mat semigroup_L(const FiniteModel& model, const FlowResult& flow, int p,
                const Mat& phi, const FdOptions& opt = {});

// Asymptotic covariance of the unnormalized estimates at generation n.
Mat asymp_var_unnormalized(const FiniteModel& model, const FlowResult& flow,
                           int n, const Mat& phi, const FdOptions& opt = {});

// Asymptotic covariance of the self-normalized estimates, computed by the
// one-step recursion; the direct-sum form is kept as an independent route
// for cross-checks.
Mat asymp_var_normalized(const FiniteModel& model, const FlowResult& flow,
                         int n, const Mat& phi, const FdOptions& opt = {});
Mat asymp_var_normalized_direct(const FiniteModel& model,
                                const FlowResult& flow, int n, const Mat& phi,
                                const FdOptions& opt = {});

// Asymptotic relative variance of the mass estimate at generation n.
double nc_relative_variance(const FiniteModel& model, const FlowResult& flow,
                            int n, const FdOptions& opt = {});

// Max-norm of the mean summary-derivative coupling at step n; zero exactly
// when adaptation cannot move the limiting flow at that step.
double stability_check(const FiniteModel& model, const FlowResult& flow, int n,
                       const Mat& phi, const FdOptions& opt = {});

// Finite-state annealing problem with exactly tempered laws.
struct FiniteTemperingModel {
  int state_count = 0;
  Vec v;     // potential values per state
  Vec base;  // strictly positive dominating weights
  double beta0 = 0.0;
  double beta_star = 1.0;
  double alpha = 0.5;

  // Transition matrix preserving the tempered law at inverse temperature
  // beta, for every admissible summary value.
  std::function<Mat(const Vec& xi, double beta)> kernel;
  Mat statistic;  // m x d, shared by all generations

  int extra_after_cap = 3;
  int max_generations = 200;
};

struct LadderResult {
  std::vector<double> beta;     // rung per generation; beta[0] == beta0
  std::vector<Vec> eta;         // tempered law at each rung
  std::vector<double> gamma;    // mass ratios Z(beta_n)/Z(beta0); gamma[0]==1
  std::vector<double> mass;     // per-step factors; mass[0] == 1
  std::vector<Vec> xi_bar;      // summary mean driving the step into rung n
  std::vector<bool> interior;   // rung n found by the ESS root (vs the cap)
};

// Exact limiting ladder; verifies kernel invariance at every rung to 1e-10.
LadderResult limit_ladder(const FiniteTemperingModel& model);

// Probability vector proportional to base .* exp(-beta v).
Vec tempered_law(const FiniteTemperingModel& model, double beta);

// Transfer matrix of the rung-n step of the joint CLT recursion, with the
// first row/column belonging to the rung coordinate; (r+1) x (r+3).
Mat tempering_clt_transfer(const FiniteTemperingModel& model,
                           const LadderResult& ladder, int n, const Mat& phi,
                           double fd_step = 1e-5);

// Joint asymptotic covariance of (rung n, unnormalized estimates at n);
// (r+1) x (r+1), first coordinate is the rung.
Mat tempering_clt_cov(const FiniteTemperingModel& model,
                      const LadderResult& ladder, int n, const Mat& phi,
                      double fd_step = 1e-5);

}  // namespace asmc::oracle
