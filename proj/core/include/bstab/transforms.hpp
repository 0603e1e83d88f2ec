#pragma once

#include <vector>

#include "bstab/kernel.hpp"
#include "bstab/profile.hpp"

namespace bstab {

/// A kernel sampled on a profile grid: k(x_a, y_b) for b <= a and k_x(1, y_b).
/// Nodal kernel values are used when the kernel grid contains the profile grid,
/// cubic interpolation otherwise.
class SampledKernel {
 public:
  SampledKernel() = default;
  SampledKernel(const KernelGrid& k, int grid_m);

  [[nodiscard]] int grid_m() const noexcept { return grid_m_; }
  [[nodiscard]] double spacing() const noexcept { return 1.0 / (grid_m_ - 1); }
  [[nodiscard]] double operator()(int a, int b) const noexcept {
    return values_[static_cast<std::size_t>(a) * (a + 1) / 2 + b];
  }
  [[nodiscard]] double k11() const noexcept { return (*this)(grid_m_ - 1, grid_m_ - 1); }
  [[nodiscard]] const std::vector<double>& kx1() const noexcept { return kx1_; }
  /// True when the samples are nodal values rather than interpolants.
  [[nodiscard]] bool exact() const noexcept { return exact_; }

 private:
  int grid_m_ = 0;
  bool exact_ = false;
  std::vector<double> values_;
  std::vector<double> kx1_;
};

/// u(x) = w(x) + int_0^x k(x,y) w(y) dy (trapezoid).
[[nodiscard]] Profile forward_transform(const Profile& w, const SampledKernel& k);
[[nodiscard]] Profile forward_transform(const Profile& w, const KernelGrid& k);

/// w(x) = u(x) - int_0^x l(x,y) u(y) dy (trapezoid).
[[nodiscard]] Profile inverse_transform(const Profile& u, const SampledKernel& l);
[[nodiscard]] Profile inverse_transform(const Profile& u, const KernelGrid& l);

/// U = -k(1,1) w(1) - int_0^1 k_x(1,y) w(y) dy (trapezoid).
[[nodiscard]] double control_input(const Profile& w, const SampledKernel& k);
[[nodiscard]] double control_input(const Profile& w, const KernelGrid& k);

/// u0 = forward_transform(w0, k).
[[nodiscard]] Profile initial_target_data(const Profile& w0, const KernelGrid& k);

}  // namespace bstab
