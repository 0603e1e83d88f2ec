#pragma once

#include <span>
#include <vector>

#include "bstab/chart.hpp"
#include "bstab/kernel.hpp"

namespace bstab::detail {

/// Discrete pieces of the kernel integral equation on one chart lattice.
class LatticeOps {
 public:
  LatticeOps(const GoursatProblem& problem, const ChartLattice& lattice);

  [[nodiscard]] const ChartLattice& lattice() const noexcept { return lattice_; }
  /// f~ at every node.
  [[nodiscard]] const std::vector<double>& forcing() const noexcept { return forcing_; }

  /// S = reaction * G + sign * N[G], N the convolution term evaluated along the lattice.
  void reaction_and_nonlocal(std::span<const double> G, std::span<double> S) const;

  /// P(i,j) = int_0^{eta_j} S(xi_i, s) ds (trapezoid, cumulative along columns).
  void inner_integral(std::span<const double> S, std::span<double> P) const;

  /// out = (1/4) int_eta^xi P(tau,eta) dtau + (1/2) int_0^eta P(tau,tau) dtau.
  void integrate(std::span<const double> S, std::span<double> out, std::vector<double>& P) const;

 private:
  double f_half(int p, int q) const noexcept {
    return f_half_[static_cast<std::size_t>(p) * static_cast<std::size_t>(2 * lattice_.half() + 1) +
                   static_cast<std::size_t>(q)];
  }

  ChartLattice lattice_;
  Orientation orientation_;
  std::vector<double> reaction_;
  std::vector<double> forcing_;
  /// f(p h/2, q h/2) for p, q in [0, 2N]; empty when f = 0.
  std::vector<double> f_half_;
};

}  // namespace bstab::detail
