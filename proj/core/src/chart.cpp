#include "bstab/chart.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bstab/errors.hpp"
#include "interp.hpp"

namespace bstab {

ChartLattice::ChartLattice(int n_xi) {
  if (n_xi < 3 || n_xi % 2 == 0) {
    throw InputError(fmt::format("chart lattice needs odd n_xi >= 3 (got {})", n_xi));
  }
  half_ = (n_xi - 1) / 2;
  h_ = 1.0 / half_;
  offsets_.resize(static_cast<std::size_t>(half_) + 1);
  std::size_t offset = 0;
  for (int j = 0; j <= half_; ++j) {
    offsets_[static_cast<std::size_t>(j)] = offset;
    offset += static_cast<std::size_t>(2 * (half_ - j) + 1);
  }
  size_ = offset;
}

double ChartGrid::interpolate(double xi, double eta) const {
  const int n = lattice.half();
  const double h = lattice.spacing();
  constexpr double slack = 1e-12;
  if (!(eta >= -slack && eta <= 1.0 + slack && xi >= eta - slack && xi <= 2.0 - eta + slack)) {
    throw InputError(fmt::format("(xi, eta) = ({}, {}) outside the chart region", xi, eta));
  }
  if (n < 5) throw InputError("chart lattice too coarse for cubic interpolation (need n_xi >= 11)");

  const double fj = eta / h;
  const double fi = xi / h;
  // Rows j0..j0+3 must each hold at least four nodes, i.e. j0 + 3 <= N - 2.
  const int j0 = std::clamp(static_cast<int>(std::floor(fj)) - 1, 0, n - 5);
  const auto wj = detail::cubic_weights(fj - j0);
  double acc = 0.0;
  for (int r = 0; r < 4; ++r) {
    const int j = j0 + r;
    const int i0 = std::clamp(static_cast<int>(std::floor(fi)) - 1, j, 2 * n - j - 3);
    const auto wi = detail::cubic_weights(fi - i0);
    double row = 0.0;
    for (int c = 0; c < 4; ++c) row += wi[static_cast<std::size_t>(c)] * (*this)(i0 + c, j);
    acc += wj[static_cast<std::size_t>(r)] * row;
  }
  return acc;
}

}  // namespace bstab
