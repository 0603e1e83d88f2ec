#pragma once

#include <cstddef>
#include <vector>

namespace bstab {

/// Uniform lattice on the characteristic chart xi = x + y, eta = x - y, covering
/// eta in [0,1], xi in [eta, 2 - eta]. Spacing h = 1/N with N = (n_xi - 1)/2; row j
/// (eta = j h) holds the nodes i = j .. 2N - j (xi = i h). The (x,y) grid of spacing h
/// maps onto the lattice nodes with i + j even: x = a h, y = b h <-> i = a + b, j = a - b.
class ChartLattice {
 public:
  ChartLattice() = default;
  /// n_xi odd, >= 3.
  explicit ChartLattice(int n_xi);

  [[nodiscard]] int n_xi() const noexcept { return 2 * half_ + 1; }
  [[nodiscard]] int half() const noexcept { return half_; }
  [[nodiscard]] int rows() const noexcept { return half_ + 1; }
  [[nodiscard]] double spacing() const noexcept { return h_; }
  [[nodiscard]] int row_first(int j) const noexcept { return j; }
  [[nodiscard]] int row_last(int j) const noexcept { return 2 * half_ - j; }
  [[nodiscard]] bool contains(int i, int j) const noexcept {
    return j >= 0 && j <= half_ && i >= j && i <= 2 * half_ - j;
  }
  [[nodiscard]] std::size_t index(int i, int j) const noexcept {
    return offsets_[static_cast<std::size_t>(j)] + static_cast<std::size_t>(i - j);
  }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] double xi(int i) const noexcept { return i * h_; }
  [[nodiscard]] double eta(int j) const noexcept { return j * h_; }

  friend bool operator==(const ChartLattice& a, const ChartLattice& b) noexcept {
    return a.half_ == b.half_;
  }

 private:
  int half_ = 0;
  double h_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
};

/// Values on a ChartLattice.
struct ChartGrid {
  ChartLattice lattice;
  std::vector<double> values;

  ChartGrid() = default;
  explicit ChartGrid(const ChartLattice& l, double fill = 0.0) : lattice(l), values(l.size(), fill) {}

  [[nodiscard]] double operator()(int i, int j) const noexcept { return values[lattice.index(i, j)]; }
  [[nodiscard]] double& operator()(int i, int j) noexcept { return values[lattice.index(i, j)]; }

  /// Tensor-product cubic Lagrange interpolation at an arbitrary (xi, eta) in the
  /// region; stencils are clamped into the lattice near the slanted edges.
  [[nodiscard]] double interpolate(double xi, double eta) const;
};

}  // namespace bstab
