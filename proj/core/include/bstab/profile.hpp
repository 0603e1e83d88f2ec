#pragma once

#include <cstddef>
#include <vector>

#include "bstab/errors.hpp"

namespace bstab {

/// Field sampled on the uniform grid x_i = i h, h = 1/(grid_m - 1), of [0,1].
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 3) throw InputError("a profile needs at least 3 grid points");
  }
  Profile(int grid_m, double fill) : Profile(std::vector<double>(checked(grid_m), fill)) {}

  template <class F>
  [[nodiscard]] static Profile from_function(int grid_m, F&& f) {
    std::vector<double> v(checked(grid_m));
    for (int i = 0; i < grid_m; ++i) v[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / (grid_m - 1));
    return Profile(std::move(v));
  }

  [[nodiscard]] int grid_m() const noexcept { return static_cast<int>(values_.size()); }
  [[nodiscard]] double spacing() const noexcept { return 1.0 / (grid_m() - 1); }
  [[nodiscard]] double x(int i) const noexcept { return i * spacing(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  [[nodiscard]] double& operator[](std::size_t i) noexcept { return values_[i]; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] std::vector<double>& values() noexcept { return values_; }

 private:
  static std::size_t checked(int grid_m) {
    if (grid_m < 3) throw InputError("a profile needs at least 3 grid points");
    return static_cast<std::size_t>(grid_m);
  }

  std::vector<double> values_;
};

}  // namespace bstab
