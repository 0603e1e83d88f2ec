#include "bstab/transforms.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bstab/errors.hpp"

namespace bstab {

namespace {

void require_grid(const Profile& v, const SampledKernel& k) {
  if (v.grid_m() != k.grid_m()) {
    throw InputError(fmt::format("profile has {} nodes but the sampled kernel has {}", v.grid_m(),
                                 k.grid_m()));
  }
}

Profile volterra(const Profile& v, const SampledKernel& k, double sign) {
  require_grid(v, k);
  const int m = v.grid_m();
  const double h = v.spacing();
  Profile out = v;
  for (int a = 1; a < m; ++a) {
    double acc = 0.5 * (k(a, 0) * v[0] + k(a, a) * v[static_cast<std::size_t>(a)]);
    for (int b = 1; b < a; ++b) acc += k(a, b) * v[static_cast<std::size_t>(b)];
    out[static_cast<std::size_t>(a)] += sign * h * acc;
  }
  return out;
}

}  // namespace

SampledKernel::SampledKernel(const KernelGrid& k, int grid_m) : grid_m_(grid_m) {
  if (grid_m < 3) throw InputError("sampled kernel needs grid_m >= 3");
  if (k.values_xy.empty()) throw InputError("sampled kernel: kernel grid is empty");
  if (k.trace_kx1.empty()) throw StateError("sampled kernel: kernel has no k_x(1,.) trace");
  const int n = k.xy_points() - 1;
  const int intervals = grid_m - 1;
  exact_ = n % intervals == 0;
  const int stride = exact_ ? n / intervals : 0;
  values_.resize(static_cast<std::size_t>(grid_m) * (grid_m + 1) / 2);
  kx1_.resize(static_cast<std::size_t>(grid_m));
  for (int a = 0; a < grid_m; ++a) {
    for (int b = 0; b <= a; ++b) {
      const double v = exact_ ? k.at_node(a * stride, b * stride)
                              : k.at(static_cast<double>(a) / intervals,
                                     static_cast<double>(b) / intervals);
      values_[static_cast<std::size_t>(a) * (a + 1) / 2 + b] = v;
    }
    kx1_[static_cast<std::size_t>(a)] = exact_ ? k.trace_kx1[static_cast<std::size_t>(a * stride)]
                                               : k.kx1_at(static_cast<double>(a) / intervals);
  }
}

Profile forward_transform(const Profile& w, const SampledKernel& k) { return volterra(w, k, 1.0); }

Profile forward_transform(const Profile& w, const KernelGrid& k) {
  return forward_transform(w, SampledKernel(k, w.grid_m()));
}

Profile inverse_transform(const Profile& u, const SampledKernel& l) { return volterra(u, l, -1.0); }

Profile inverse_transform(const Profile& u, const KernelGrid& l) {
  return inverse_transform(u, SampledKernel(l, u.grid_m()));
}

double control_input(const Profile& w, const SampledKernel& k) {
  require_grid(w, k);
  const int m = w.grid_m();
  const auto& kx = k.kx1();
  double acc = 0.5 * (kx[0] * w[0] + kx[static_cast<std::size_t>(m - 1)] * w[static_cast<std::size_t>(m - 1)]);
  for (int b = 1; b < m - 1; ++b) acc += kx[static_cast<std::size_t>(b)] * w[static_cast<std::size_t>(b)];
  return -k.k11() * w[static_cast<std::size_t>(m - 1)] - w.spacing() * acc;
}

double control_input(const Profile& w, const KernelGrid& k) {
  return control_input(w, SampledKernel(k, w.grid_m()));
}

Profile initial_target_data(const Profile& w0, const KernelGrid& k) {
  return forward_transform(w0, k);
}

}  // namespace bstab
