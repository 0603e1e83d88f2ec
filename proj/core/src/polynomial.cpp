#include "bstab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/roots.hpp>

#include "bstab/errors.hpp"

namespace bstab {

namespace {

void trim_trailing_zeros(std::vector<double>& c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw InputError("polynomial coefficient is not finite");
  }
  trim_trailing_zeros(coeffs_);
}

double Polynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial{};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
  return Polynomial(std::move(d));
}

int Polynomial::degree() const noexcept {
  return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1;
}

bool Polynomial::is_zero() const noexcept { return coeffs_.empty(); }

Extrema extrema_on(const Polynomial& p, double lo, double hi) {
  if (!(lo <= hi)) throw InputError("extrema_on: empty interval");
  Extrema e{p(lo), p(lo), lo, lo};
  auto consider = [&](double x) {
    const double v = p(x);
    if (v < e.min) e = {v, e.max, x, e.argmax};
    if (v > e.max) e = {e.min, v, e.argmin, x};
  };
  consider(hi);
  if (p.degree() < 2 || hi == lo) return e;

  const Polynomial dp = p.derivative();
  constexpr int samples = 4096;
  const double step = (hi - lo) / samples;
  double a = lo;
  double fa = dp(a);
  for (int k = 1; k <= samples; ++k) {
    const double b = (k == samples) ? hi : lo + k * step;
    const double fb = dp(b);
    if (fa == 0.0) {
      consider(a);
    } else if (fa * fb < 0.0) {
      std::uintmax_t iters = 100;
      const auto tol = boost::math::tools::eps_tolerance<double>(52);
      const auto root = boost::math::tools::toms748_solve(
          [&](double x) { return dp(x); }, a, b, fa, fb, tol, iters);
      consider(0.5 * (root.first + root.second));
    }
    a = b;
    fa = fb;
  }
  return e;
}

BivariatePolynomial::BivariatePolynomial(std::vector<std::vector<double>> coefficients)
    : coeffs_(std::move(coefficients)) {
  for (auto& row : coeffs_) {
    for (double c : row) {
      if (!std::isfinite(c)) throw InputError("polynomial coefficient is not finite");
    }
    trim_trailing_zeros(row);
  }
  while (!coeffs_.empty() && coeffs_.back().empty()) coeffs_.pop_back();
}

double BivariatePolynomial::operator()(double x, double y) const noexcept {
  double acc = 0.0;
  for (auto row = coeffs_.rbegin(); row != coeffs_.rend(); ++row) {
    double inner = 0.0;
    for (auto it = row->rbegin(); it != row->rend(); ++it) inner = inner * y + *it;
    acc = acc * x + inner;
  }
  return acc;
}

bool BivariatePolynomial::is_zero() const noexcept { return coeffs_.empty(); }

double BivariatePolynomial::max_abs_sampled(int n) const {
  if (n < 2) throw InputError("max_abs_sampled: need at least 2 samples per axis");
  if (is_zero()) return 0.0;
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    for (int j = 0; j < n; ++j) {
      m = std::max(m, std::abs((*this)(x, static_cast<double>(j) / (n - 1))));
    }
  }
  return m;
}

}  // namespace bstab
