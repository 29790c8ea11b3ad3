#pragma once

#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace voipqoe {

/// Exponent pair (i, j) of the monomial x^i * y^j.
struct Monomial {
  int x_power = 0;
  int y_power = 0;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Ordered set of bivariate monomials. The order fixes the coefficient layout.
class TermSet {
 public:
  TermSet() = default;
  TermSet(std::string name, std::vector<Monomial> terms);

  const std::string& name() const { return name_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool has_intercept() const;

  /// Human-readable term label, e.g. "x^2*y".
  std::string term_label(std::size_t k) const;

  friend bool operator==(const TermSet& a, const TermSet& b) { return a.terms_ == b.terms_; }

  /// 1, x, y, x^2, xy, x^3, x^2y
  static TermSet poly31();
  /// 1, x, y, x^2, xy, y^2, x^2y, xy^2, y^3
  static TermSet poly23();
  /// 1, x, y, x^2, xy, y^2, x^3, x^2y, xy^2
  static TermSet poly32();
  /// Every monomial of total degree <= 3 (10 terms).
  static TermSet poly33();

  /// Looks up a preset by name ("poly31", "poly23", "poly32", "poly33").
  static TermSet from_name(const std::string& name);

 private:
  std::string name_;
  std::vector<Monomial> terms_;
};

template <typename Scalar>
Scalar monomial_value(const Monomial& m, const Scalar& x, const Scalar& y) {
  Scalar v(1);
  for (int i = 0; i < m.x_power; ++i) v *= x;
  for (int j = 0; j < m.y_power; ++j) v *= y;
  return v;
}

/// Sum of c_k * x^i_k * y^j_k. Throws std::invalid_argument on a coefficient
/// count mismatch.
template <typename Scalar, typename Derived>
Scalar evaluate_surface(const TermSet& termset, const Eigen::MatrixBase<Derived>& coefficients,
                        const Scalar& x, const Scalar& y) {
  if (static_cast<std::size_t>(coefficients.size()) != termset.size()) {
    throw std::invalid_argument("coefficient count " + std::to_string(coefficients.size()) +
                                " does not match term count " + std::to_string(termset.size()));
  }
  Scalar sum(0);
  for (std::size_t k = 0; k < termset.size(); ++k) {
    sum += Scalar(coefficients(static_cast<Eigen::Index>(k))) * monomial_value(termset.terms()[k], x, y);
  }
  return sum;
}

template <typename Scalar>
Scalar evaluate_surface(const TermSet& termset, std::span<const Scalar> coefficients, const Scalar& x,
                        const Scalar& y) {
  return evaluate_surface(termset,
                          Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
                              coefficients.data(), static_cast<Eigen::Index>(coefficients.size())),
                          x, y);
}

}  // namespace voipqoe
