#include "asmc/engine.hpp"

#include <algorithm>
#include <cmath>

namespace asmc {

std::vector<std::int32_t> multinomial_resample(std::span<const double> weights,
                                               int n_out, Rng& rng) {
  if (weights.empty()) throw run_error("resample: empty weight vector");
  if (n_out < 1) throw config_error("resample: need at least one draw");

  std::vector<double> cum(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double w = weights[i];
    if (!std::isfinite(w) || w <= 0.0)
      throw run_error("resample: weight " + std::to_string(i) +
                      " is not strictly positive and finite");
    total += w;
    cum[i] = total;
  }

  std::vector<std::int32_t> idx(n_out);
  for (int j = 0; j < n_out; ++j) {
    double target = rng.uniform() * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    if (it == cum.end()) --it;  // guards target == total
    idx[j] = static_cast<std::int32_t>(it - cum.begin());
  }
  return idx;
}

WeightSet weights_from_log(std::span<const double> logw, int generation) {
  WeightSet ws;
  ws.shifted.resize(logw.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (double lw : logw) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity())
      throw run_error("generation " + std::to_string(generation) +
                      ": non-finite log weight");
    mx = std::max(mx, lw);
  }
  if (!std::isfinite(mx))
    throw run_error("generation " + std::to_string(generation) +
                    ": all potentials vanished");
  double sum = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    ws.shifted[i] = std::exp(logw[i] - mx);
    sum += ws.shifted[i];
  }
  ws.mean_weight = std::exp(mx) * (sum / double(logw.size()));
  if (!std::isfinite(ws.mean_weight) || ws.mean_weight <= 0.0)
    throw run_error("generation " + std::to_string(generation) +
                    ": mean weight is not strictly positive and finite");
  return ws;
}

}  // namespace asmc
