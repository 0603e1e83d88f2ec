#pragma once

#include <array>

namespace bstab::detail {

/// Lagrange weights for nodes 0,1,2,3 evaluated at t.
[[nodiscard]] inline std::array<double, 4> cubic_weights(double t) noexcept {
  return {-(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0, t * (t - 2.0) * (t - 3.0) / 2.0,
          -t * (t - 1.0) * (t - 3.0) / 2.0, t * (t - 1.0) * (t - 2.0) / 6.0};
}

}  // namespace bstab::detail
