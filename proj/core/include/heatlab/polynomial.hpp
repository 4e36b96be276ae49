#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace heatlab {

using Rational = boost::multiprecision::cpp_rational;

/// Homogeneous polynomial over Q with exact multi-index -> coefficient terms.
/// All stored exponent vectors have total degree exactly `degree`; zero
/// coefficients are never stored.
class HomogeneousPolynomial {
 public:
  using Terms = std::map<std::vector<int>, Rational>;

  HomogeneousPolynomial(int num_vars, int degree);
  static HomogeneousPolynomial monomial(int num_vars, std::vector<int> exponents, Rational coeff);
  /// (x_1^2 + ... + x_n^2)^k, degree 2k.
  static HomogeneousPolynomial radius_power(int num_vars, int k);

  int num_vars() const { return num_vars_; }
  int degree() const { return degree_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(std::vector<int> exponents, const Rational& coeff);

  HomogeneousPolynomial operator+(const HomogeneousPolynomial& o) const;
  HomogeneousPolynomial operator-(const HomogeneousPolynomial& o) const;
  HomogeneousPolynomial operator*(const HomogeneousPolynomial& o) const;
  HomogeneousPolynomial scaled(const Rational& c) const;
  HomogeneousPolynomial derivative(int var) const;
  /// Flat coordinate Laplacian (sum of plain second derivatives).
  HomogeneousPolynomial laplacian() const;

  double evaluate(const std::vector<double>& x) const;

  /// One term per line: "num/den e_1 e_2 ... e_{n+1}".  '#' lines are
  /// comments.
  void write(std::ostream& os) const;
  static HomogeneousPolynomial read(std::istream& is);

 private:
  int num_vars_;
  int degree_;
  Terms terms_;
};

struct MunznerVerdict {
  int g = 0;
  Rational c;                // Laplacian constant (0 for odd g)
  bool gradient_ok = false;  // |grad F|^2 = g^2 |x|^{2g-2}
  bool laplacian_ok = false; // Delta F = c |x|^{g-2}
  bool c_differs_from_bound = false; // c != (n-1) g, the foliation condition
  // First offending monomial (graded-lex least term of the defect), if any.
  std::optional<std::pair<std::vector<int>, Rational>> witness;

  bool pass() const { return gradient_ok && laplacian_ok; }
};

/// Exact verification of the two defining identities.  Odd degrees require a
/// harmonic polynomial (c = 0); even degrees solve for the unique rational c.
MunznerVerdict munzner_verify(const HomogeneousPolynomial& F);

/// Signature quadric of the product-of-spheres family:
/// sum_{i <= p+1} x_i^2 - sum_{j > p+1} x_j^2 in p+q+2 variables.
HomogeneousPolynomial clifford_quadric(int p, int q);

} // namespace heatlab
