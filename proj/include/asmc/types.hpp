#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace asmc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Axis-aligned box bounding the values a summary statistic may take.
struct Box {
  Vec lo, hi;

  bool contains(const Vec& x) const {
    if (x.size() != lo.size()) return false;
    for (Eigen::Index j = 0; j < x.size(); ++j)
      if (x[j] < lo[j] || x[j] > hi[j]) return false;
    return true;
  }

  static Box whole(int d, double half_width = 1e30) {
    Box b;
    b.lo = Vec::Constant(d, -half_width);
    b.hi = Vec::Constant(d, half_width);
    return b;
  }
};

// One generation of the particle system.
template <class State>
struct Cloud {
  int generation = 0;
  std::vector<State> particles;
  std::vector<std::int32_t> parent_index;  // ancestry of the resampling step
  std::optional<Vec> adapted_param;        // summary value used to build this
                                           // generation; absent at n = 0
  int size() const { return static_cast<int>(particles.size()); }
};

// Full trajectory of a run. weight_products[n] is the running product of the
// per-generation mean weights, i.e. the unnormalized-mass estimate at n;
// weight_products[0] == 1.
template <class State>
struct RunRecord {
  std::vector<Cloud<State>> clouds;
  std::vector<double> weight_products;
  std::vector<Vec> adapted_params;  // [n] drove the step into generation n
  std::uint64_t seed = 0;

  int generations() const { return static_cast<int>(clouds.size()) - 1; }
};

}  // namespace asmc
