#pragma once

#include <span>
#include <vector>

namespace bstab {

/// Univariate polynomial with coefficients in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  [[nodiscard]] static Polynomial constant(double value) { return Polynomial({value}); }

  [[nodiscard]] double operator()(double x) const noexcept;
  [[nodiscard]] Polynomial derivative() const;
  [[nodiscard]] std::span<const double> coefficients() const noexcept { return coeffs_; }
  [[nodiscard]] int degree() const noexcept;
  [[nodiscard]] bool is_zero() const noexcept;

 private:
  std::vector<double> coeffs_;
};

struct Extrema {
  double min = 0.0;
  double max = 0.0;
  double argmin = 0.0;
  double argmax = 0.0;
};

/// Minimum and maximum of p on [lo, hi]: endpoints plus critical points located by
/// bracketing sign changes of p' on a dense grid and refining them.
[[nodiscard]] Extrema extrema_on(const Polynomial& p, double lo, double hi);

/// Bivariate polynomial sum_{i,j} c[i][j] x^i y^j.
class BivariatePolynomial {
 public:
  BivariatePolynomial() = default;
  explicit BivariatePolynomial(std::vector<std::vector<double>> coefficients);

  [[nodiscard]] static BivariatePolynomial constant(double value) {
    return BivariatePolynomial(std::vector<std::vector<double>>{{value}});
  }

  [[nodiscard]] double operator()(double x, double y) const noexcept;
  [[nodiscard]] const std::vector<std::vector<double>>& coefficients() const noexcept {
    return coeffs_;
  }
  [[nodiscard]] bool is_zero() const noexcept;

  /// max |f| over an n x n sample of [0,1]^2.
  [[nodiscard]] double max_abs_sampled(int n) const;

 private:
  std::vector<std::vector<double>> coeffs_;
};

}  // namespace bstab
