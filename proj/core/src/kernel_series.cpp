#include <cmath>

#include <fmt/format.h>

#include "bstab/errors.hpp"
#include "bstab/kernel.hpp"

namespace bstab {

namespace {

double c_coeff(int m) { return 1.0 / (static_cast<double>(m) * (m + 1)); }

}  // namespace

SeriesCoefficients series_coefficients(int n_max, double r) {
  if (n_max < 1) throw InputError("series_coefficients: n_max must be >= 1");
  if (!(r >= 0.0)) throw InputError("series_coefficients: r must be >= 0");
  SeriesCoefficients s;
  s.r = r;
  s.n_max = n_max;
  s.A.resize(static_cast<std::size_t>(n_max) + 1);
  s.A[0] = {1.0};
  for (int n = 1; n <= n_max; ++n) {
    const auto& prev = s.A[static_cast<std::size_t>(n - 1)];
    auto& row = s.A[static_cast<std::size_t>(n)];
    row.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
      const double from_reaction = i >= 1 ? prev[static_cast<std::size_t>(i - 1)] : 0.0;
      const double from_quadratic = i <= n - 1 ? prev[static_cast<std::size_t>(i)] : 0.0;
      row[static_cast<std::size_t>(i)] = (from_reaction - r * from_quadratic) * c_coeff(2 * n - i);
    }
  }
  return s;
}

double series_oracle(const SeriesCoefficients& coeffs, double lambda0, double xi, double eta,
                     int n_trunc, Orientation o) {
  if (n_trunc < 1) throw InputError("series_oracle: n_trunc must be >= 1");
  if (n_trunc > coeffs.n_max) {
    throw InputError(fmt::format("series_oracle: n_trunc = {} exceeds table size {}", n_trunc,
                                 coeffs.n_max));
  }
  const double rho = o == Orientation::direct ? lambda0 : -lambda0;
  const double p = xi * eta;
  double sum = 0.0;
  double quarter = 1.0;
  for (int n = 1; n <= n_trunc; ++n) {
    quarter *= 0.25;
    double inner = 0.0;
    double rho_pow = 1.0;
    for (int i = 0; i <= n; ++i) {
      // T_k = (xi eta)^k (xi + eta)
      const double t = std::pow(p, 2 * n - i) * (xi + eta);
      inner += rho_pow * coeffs.A[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] * t;
      rho_pow *= rho;
    }
    sum += quarter * inner;
  }
  return 0.25 * lambda0 * (xi + eta) + 0.25 * lambda0 * sum;
}

double series_oracle(double lambda0, double r, double xi, double eta, int n_trunc, Orientation o) {
  return series_oracle(series_coefficients(n_trunc, r), lambda0, xi, eta, n_trunc, o);
}

double series_tail_bound(double lambda0, double r, double xi, double eta, int n_trunc) {
  const double m1 = r + std::abs(lambda0);
  if (m1 == 0.0 || xi * eta == 0.0) return 0.0;
  double total = 0.0;
  for (int n = n_trunc + 1; n <= n_trunc + 400; ++n) {
    const double log_common = (n + 1) * std::log(m1) - std::lgamma(n + 2.0) + n * std::log(xi * eta);
    const double term = std::exp(log_common) * (xi + eta);
    total += term;
    if (term < 1e-300 || term < 1e-18 * total) break;
  }
  return total;
}

}  // namespace bstab
