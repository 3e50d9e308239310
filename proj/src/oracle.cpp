#include "asmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asmc/tempering.hpp"

namespace asmc::oracle {

namespace {

void check_probability(const Vec& eta, const std::string& what) {
  if (eta.size() == 0) throw model_error(what + ": empty");
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (!(eta[i] >= 0.0) || !std::isfinite(eta[i]))
      throw model_error(what + ": entries must be finite and nonnegative");
    s += eta[i];
  }
  if (std::abs(s - 1.0) > 1e-10)
    throw model_error(what + ": entries sum to " + std::to_string(s));
}

void check_stochastic(const Mat& k, int generation) {
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      if (!(k(i, j) >= -1e-14) || !std::isfinite(k(i, j)))
        throw model_error("generation " + std::to_string(generation) +
                          ": kernel entries must be finite and nonnegative");
      s += k(i, j);
    }
    if (std::abs(s - 1.0) > 1e-10)
      throw model_error("generation " + std::to_string(generation) +
                        ": kernel row " + std::to_string(i) + " sums to " +
                        std::to_string(s));
  }
}

Vec checked_potential(const FiniteModel& model, int p, const Vec& xi) {
  Vec g = model.potential(p, xi);
  if (g.size() != model.state_count)
    throw model_error("potential " + std::to_string(p) + ": wrong size");
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (!(g[i] > 0.0) || !std::isfinite(g[i]))
      throw model_error("potential " + std::to_string(p) +
                        ": values must be strictly positive and finite");
  return g;
}

// Two-step operator at a pinned summary value: diag(G_{n-1}) K_n phi.
Mat q_apply(const FiniteModel& model, int n, const Vec& xi, const Mat& phi) {
  Vec g = checked_potential(model, n - 1, xi);
  Mat k = model.kernel(n, xi);
  check_stochastic(k, n);
  return g.asDiagonal() * (k * phi);
}

// Mean summary-derivative coupling: rows j = eta_{n-1}^T d/dxi_j [Q_n phi]
// at the limiting summary value, by central differences shrunk to stay
// inside the declared box.
Mat dq_mean(const FiniteModel& model, const FlowResult& flow, int n,
            const Mat& phi, const FdOptions& opt) {
  const Vec& xi = flow.xi_bar[n];
  const Vec& eta = flow.eta[n - 1];
  const int d = static_cast<int>(xi.size());
  const Box box = model.statistic_domain(n);
  Mat out(d, phi.cols());
  for (int j = 0; j < d; ++j) {
    if (model.analytic_dq) {
      out.row(j) = eta.transpose() * model.analytic_dq(n, xi, j, phi);
      continue;
    }
    double h = std::max(opt.step, opt.step * std::abs(xi[j]));
    Vec hi = xi, lo = xi;
    hi[j] = xi[j] + h;
    lo[j] = xi[j] - h;
    while (!box.contains(hi) || !box.contains(lo)) {
      h *= 0.5;
      if (h < 1e-9)
        throw model_error("generation " + std::to_string(n) +
                          ": no room for a finite-difference step in summary "
                          "direction " + std::to_string(j));
      hi[j] = xi[j] + h;
      lo[j] = xi[j] - h;
    }
    out.row(j) = eta.transpose() *
                 ((q_apply(model, n, hi, phi) - q_apply(model, n, lo, phi)) /
                  (2.0 * h));
  }
  return out;
}

}  // namespace

FlowResult exact_flow(const FiniteModel& model, int horizon) {
  if (horizon < 0 || horizon > model.horizon)
    throw config_error("exact_flow: horizon out of range");
  check_probability(model.eta0, "initial law");
  if (model.eta0.size() != model.state_count)
    throw model_error("initial law size differs from state_count");

  FlowResult flow;
  flow.eta.push_back(model.eta0);
  flow.gamma.push_back(1.0);
  flow.mass.push_back(1.0);
  flow.xi_bar.emplace_back();
  for (int n = 1; n <= horizon; ++n) {
    const Vec& prev = flow.eta.back();
    Mat stat = model.statistic(n);
    if (stat.rows() != model.state_count)
      throw model_error("statistic " + std::to_string(n) + ": wrong row count");
    Vec xi = stat.transpose() * prev;
    if (!model.statistic_domain(n).contains(xi))
      throw model_error("generation " + std::to_string(n) +
                        ": limiting summary value escapes its declared box");

    Vec g = checked_potential(model, n - 1, xi);
    Mat k = model.kernel(n, xi);
    check_stochastic(k, n);
    double mass = prev.dot(g);
    Vec next = (k.transpose() * prev.cwiseProduct(g)) / mass;
    flow.eta.push_back(next);
    flow.mass.push_back(mass);
    flow.gamma.push_back(flow.gamma.back() * mass);
    flow.xi_bar.push_back(xi);
  }
  return flow;
}

Mat cov_under(const Vec& eta, const Mat& phi) {
  Vec mean = phi.transpose() * eta;
  Mat second = phi.transpose() * eta.asDiagonal() * phi;
  return second - mean * mean.transpose();
}

Mat semigroup_L(const FiniteModel& model, const FlowResult& flow, int p,
                const Mat& phi, const FdOptions& opt) {
  if (p < 1 || p >= static_cast<int>(flow.eta.size()))
    throw config_error("semigroup_L: step index out of range");
  Mat q = q_apply(model, p, flow.xi_bar[p], phi);
  if (opt.zero_adaptation_term) return q;
  Mat coupling = dq_mean(model, flow, p, phi, opt);       // d x r
  Mat centered = model.statistic(p).rowwise() -
                 flow.xi_bar[p].transpose();              // m x d
  return centered * coupling + q;
}

Mat asymp_var_unnormalized(const FiniteModel& model, const FlowResult& flow,
                           int n, const Mat& phi, const FdOptions& opt) {
  if (n < 0 || n >= static_cast<int>(flow.eta.size()))
    throw config_error("asymp_var_unnormalized: generation out of range");
  Mat transported = phi;
  Mat acc = flow.gamma[n] * flow.gamma[n] * cov_under(flow.eta[n], transported);
  for (int p = n; p >= 1; --p) {
    transported = semigroup_L(model, flow, p, transported, opt);
    acc += flow.gamma[p - 1] * flow.gamma[p - 1] *
           cov_under(flow.eta[p - 1], transported);
  }
  return acc;
}

Mat asymp_var_normalized(const FiniteModel& model, const FlowResult& flow,
                         int n, const Mat& phi, const FdOptions& opt) {
  if (n < 0 || n >= static_cast<int>(flow.eta.size()))
    throw config_error("asymp_var_normalized: generation out of range");
  if (n == 0) return cov_under(flow.eta[0], phi);
  Mat centered = phi.rowwise() - (phi.transpose() * flow.eta[n]).transpose();
  Mat pushed = semigroup_L(model, flow, n, centered, opt);
  double mass = flow.mass[n];
  return cov_under(flow.eta[n], phi) +
         asymp_var_normalized(model, flow, n - 1, pushed, opt) / (mass * mass);
}

Mat asymp_var_normalized_direct(const FiniteModel& model,
                                const FlowResult& flow, int n, const Mat& phi,
                                const FdOptions& opt) {
  if (n < 0 || n >= static_cast<int>(flow.eta.size()))
    throw config_error("asymp_var_normalized_direct: generation out of range");
  Mat transported = phi.rowwise() - (phi.transpose() * flow.eta[n]).transpose();
  double g2 = flow.gamma[n] * flow.gamma[n];
  Mat acc = cov_under(flow.eta[n], transported);
  for (int p = n; p >= 1; --p) {
    transported = semigroup_L(model, flow, p, transported, opt);
    acc += (flow.gamma[p - 1] * flow.gamma[p - 1] / g2) *
           cov_under(flow.eta[p - 1], transported);
  }
  return acc;
}

double nc_relative_variance(const FiniteModel& model, const FlowResult& flow,
                            int n, const FdOptions& opt) {
  if (n < 0 || n >= static_cast<int>(flow.eta.size()))
    throw config_error("nc_relative_variance: generation out of range");
  Mat one = Mat::Ones(model.state_count, 1);
  Mat transported = one;
  double acc = 0.0;  // p == n term vanishes: the constant has no variance
  for (int p = n; p >= 1; --p) {
    transported = semigroup_L(model, flow, p, transported, opt);
    double denom = flow.gamma[n] / flow.gamma[p - 1];
    acc += cov_under(flow.eta[p - 1], transported)(0, 0) / (denom * denom);
  }
  return acc;
}

double stability_check(const FiniteModel& model, const FlowResult& flow, int n,
                       const Mat& phi, const FdOptions& opt) {
  if (n < 1 || n >= static_cast<int>(flow.eta.size()))
    throw config_error("stability_check: generation out of range");
  Mat coupling = dq_mean(model, flow, n, phi, opt);
  return coupling.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Adaptive tempering.

Vec tempered_law(const FiniteTemperingModel& model, double beta) {
  if (model.base.size() != model.state_count ||
      model.v.size() != model.state_count)
    throw model_error("tempering model: inconsistent sizes");
  Vec log_unnorm(model.state_count);
  for (int i = 0; i < model.state_count; ++i) {
    if (!(model.base[i] > 0.0) || !std::isfinite(model.base[i]))
      throw model_error("tempering model: base weights must be positive");
    if (!std::isfinite(model.v[i]))
      throw model_error("tempering model: potential values must be finite");
    log_unnorm[i] = std::log(model.base[i]) - beta * model.v[i];
  }
  double mx = log_unnorm.maxCoeff();
  Vec w = (log_unnorm.array() - mx).exp();
  return w / w.sum();
}

namespace {

void check_invariance(const FiniteTemperingModel& model, const Mat& k,
                      const Vec& eta, int generation) {
  check_stochastic(k, generation);
  double dev = ((eta.transpose() * k).transpose() - eta).cwiseAbs().maxCoeff();
  if (dev > 1e-10)
    throw model_error("generation " + std::to_string(generation) +
                      ": kernel does not preserve the tempered law "
                      "(deviation " + std::to_string(dev) + ")");
}

}  // namespace

LadderResult limit_ladder(const FiniteTemperingModel& model) {
  if (!(model.alpha > 0.0 && model.alpha < 1.0))
    throw config_error("limit_ladder: alpha must lie in (0,1)");
  if (model.beta_star < model.beta0)
    throw config_error("limit_ladder: beta_star below beta0");

  LadderResult lad;
  lad.beta.push_back(model.beta0);
  lad.eta.push_back(tempered_law(model, model.beta0));
  lad.gamma.push_back(1.0);
  lad.mass.push_back(1.0);
  lad.xi_bar.emplace_back();
  lad.interior.push_back(false);

  std::vector<double> v(model.v.data(), model.v.data() + model.state_count);
  int at_cap = 0;
  while (static_cast<int>(lad.beta.size()) - 1 < model.max_generations) {
    double beta_cur = lad.beta.back();
    const Vec& eta_cur = lad.eta.back();
    if (beta_cur >= model.beta_star) {
      if (at_cap >= model.extra_after_cap) break;
      ++at_cap;
    }
    const int n = static_cast<int>(lad.beta.size());

    std::vector<double> w(eta_cur.data(), eta_cur.data() + eta_cur.size());
    double beta_next = model.beta_star;
    bool interior = false;
    if (beta_cur < model.beta_star) {
      double lam_max = model.beta_star - beta_cur;
      if (ess_weighted(w, v, lam_max) < model.alpha) {
        double lo = 0.0, hi = lam_max;
        for (int it = 0; it < 100 && (hi - lo) > 1e-10; ++it) {
          double mid = 0.5 * (lo + hi);
          if (ess_weighted(w, v, mid) >= model.alpha)
            lo = mid;
          else
            hi = mid;
        }
        beta_next = beta_cur + 0.5 * (lo + hi);
        interior = true;
      }
    }

    double gap = beta_next - beta_cur;
    double mass = eta_cur.dot((-gap * model.v.array()).exp().matrix());
    Vec eta_next = tempered_law(model, beta_next);
    Vec xi = model.statistic.transpose() * eta_cur;
    Mat k = model.kernel(xi, beta_next);
    check_invariance(model, k, eta_next, n);

    lad.beta.push_back(beta_next);
    lad.eta.push_back(eta_next);
    lad.mass.push_back(mass);
    lad.gamma.push_back(lad.gamma.back() * mass);
    lad.xi_bar.push_back(xi);
    lad.interior.push_back(interior);
  }
  return lad;
}

namespace {

// Q_n phi for the tempering flow, with both rungs free: the weight part uses
// the gap beta_to - beta_from, the kernel sits at beta_to.
Mat q_tempering(const FiniteTemperingModel& model, const Vec& xi,
                double beta_from, double beta_to, const Mat& phi) {
  Vec g = (-(beta_to - beta_from) * model.v.array()).exp().matrix();
  Mat k = model.kernel(xi, beta_to);
  return g.asDiagonal() * (k * phi);
}

}  // namespace

Mat tempering_clt_transfer(const FiniteTemperingModel& model,
                           const LadderResult& ladder, int n, const Mat& phi,
                           double fd_step) {
  if (n < 1 || n >= static_cast<int>(ladder.beta.size()))
    throw config_error("tempering_clt_transfer: rung out of range");
  const int r = static_cast<int>(phi.cols());
  const Vec& eta = ladder.eta[n - 1];
  const Vec& xi = ladder.xi_bar[n];
  const double bp = ladder.beta[n - 1];
  const double bn = ladder.beta[n];
  const double gamma_prev = ladder.gamma[n - 1];
  const double h = fd_step;

  Mat a = Mat::Zero(r + 1, r + 3);
  a.block(1, 3, r, r) = Mat::Identity(r, r);

  // Sensitivity of the estimates to the previous rung, through the weight
  // exponent: central difference in beta_{n-1} with the kernel pinned.
  Vec dprev = ((q_tempering(model, xi, bp + h, bn, phi) -
                q_tempering(model, xi, bp - h, bn, phi)) /
               (2.0 * h))
                  .transpose() *
              eta;

  if (!ladder.interior[n]) {
    // The rung hit the final temperature with ESS slack: its fluctuation is
    // degenerate and the estimates only feel the previous rung.
    a.block(1, 0, r, 1) = gamma_prev * dprev;
    return a;
  }

  const double gap = bn - bp;
  Vec g = (-gap * model.v.array()).exp().matrix();
  double m1 = eta.dot(g);
  double m2 = eta.dot(g.cwiseProduct(g));

  // Slope of the ESS profile delta |-> eta(e^{-delta V})^2 / eta(e^{-2 delta V})
  // at the limiting gap.
  double hh = std::min(h, gap > 2.0 * h ? h : gap / 2.0);
  auto profile = [&](double delta) {
    Vec gg = (-delta * model.v.array()).exp().matrix();
    double a1 = eta.dot(gg);
    double a2 = eta.dot(gg.cwiseProduct(gg));
    return a1 * a1 / a2;
  };
  double dess = (profile(gap + hh) - profile(gap - hh)) / (2.0 * hh);
  if (std::abs(dess) < 1e-8)
    throw model_error("rung " + std::to_string(n) +
                      ": degenerate ESS profile (potential nearly constant)");

  a(0, 0) = 1.0;
  a(0, 1) = -2.0 / gamma_prev * (m1 / m2) / dess;
  a(0, 2) = 1.0 / gamma_prev * (m1 * m1 / (m2 * m2)) / dess;

  // Sensitivity to the current rung: the gap and the kernel both move.
  Vec dcur = ((q_tempering(model, xi, bp, bn + h, phi) -
               q_tempering(model, xi, bp, bn - h, phi)) /
              (2.0 * h))
                 .transpose() *
             eta;

  a.block(1, 0, r, 1) = gamma_prev * (dprev + dcur);
  a.block(1, 1, r, 1) = gamma_prev * dcur * a(0, 1);
  a.block(1, 2, r, 1) = gamma_prev * dcur * a(0, 2);
  return a;
}

Mat tempering_clt_cov(const FiniteTemperingModel& model,
                      const LadderResult& ladder, int n, const Mat& phi,
                      double fd_step) {
  if (n < 0 || n >= static_cast<int>(ladder.beta.size()))
    throw config_error("tempering_clt_cov: rung out of range");
  const int r = static_cast<int>(phi.cols());
  if (n == 0) {
    Mat s = Mat::Zero(r + 1, r + 1);
    s.block(1, 1, r, r) = cov_under(ladder.eta[0], phi);
    return s;
  }

  // Extended test function at the previous level: centered weight, centered
  // squared weight, then the transported columns.
  const Vec& eta = ladder.eta[n - 1];
  double gap = ladder.beta[n] - ladder.beta[n - 1];
  Vec g = (-gap * model.v.array()).exp().matrix();
  Vec g2 = g.cwiseProduct(g);
  Mat q = q_tempering(model, ladder.xi_bar[n], ladder.beta[n - 1],
                      ladder.beta[n], phi);
  Mat ext(model.state_count, r + 2);
  ext.col(0) = (g.array() - eta.dot(g)).matrix();
  ext.col(1) = (g2.array() - eta.dot(g2)).matrix();
  ext.rightCols(r) = q;

  Mat prev = tempering_clt_cov(model, ladder, n - 1, ext, fd_step);
  Mat a = tempering_clt_transfer(model, ladder, n, phi, fd_step);
  Mat local = Mat::Zero(r + 1, r + 1);
  local.block(1, 1, r, r) =
      ladder.gamma[n] * ladder.gamma[n] * cov_under(ladder.eta[n], phi);
  return a * prev * a.transpose() + local;
}

}  // namespace asmc::oracle
