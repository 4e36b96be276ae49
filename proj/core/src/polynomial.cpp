#include "heatlab/polynomial.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace heatlab {

HomogeneousPolynomial::HomogeneousPolynomial(int num_vars, int degree)
    : num_vars_(num_vars), degree_(degree) {
  if (num_vars < 1) throw std::invalid_argument("polynomial needs at least one variable");
  if (degree < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
}

HomogeneousPolynomial HomogeneousPolynomial::monomial(int num_vars, std::vector<int> exponents,
                                                      Rational coeff) {
  const int deg = std::accumulate(exponents.begin(), exponents.end(), 0);
  HomogeneousPolynomial p(num_vars, deg);
  p.add_term(std::move(exponents), coeff);
  return p;
}

HomogeneousPolynomial HomogeneousPolynomial::radius_power(int num_vars, int k) {
  HomogeneousPolynomial acc(num_vars, 0);
  acc.add_term(std::vector<int>(num_vars, 0), 1);
  if (k == 0) return acc;
  HomogeneousPolynomial r2(num_vars, 2);
  for (int i = 0; i < num_vars; ++i) {
    std::vector<int> e(num_vars, 0);
    e[i] = 2;
    r2.add_term(std::move(e), 1);
  }
  for (int i = 0; i < k; ++i) acc = acc * r2;
  return acc;
}

void HomogeneousPolynomial::add_term(std::vector<int> exponents, const Rational& coeff) {
  if (static_cast<int>(exponents.size()) != num_vars_)
    throw std::invalid_argument("exponent vector length mismatch");
  int deg = 0;
  for (int e : exponents) {
    if (e < 0) throw std::invalid_argument("negative exponent");
    deg += e;
  }
  if (deg != degree_)
    throw std::invalid_argument("term degree " + std::to_string(deg) +
                                " does not match polynomial degree " + std::to_string(degree_));
  if (coeff == 0) return;
  auto [it, inserted] = terms_.emplace(std::move(exponents), coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

HomogeneousPolynomial HomogeneousPolynomial::operator+(const HomogeneousPolynomial& o) const {
  if (num_vars_ != o.num_vars_ || degree_ != o.degree_)
    throw std::invalid_argument("polynomial shape mismatch in +");
  HomogeneousPolynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

HomogeneousPolynomial HomogeneousPolynomial::operator-(const HomogeneousPolynomial& o) const {
  if (num_vars_ != o.num_vars_ || degree_ != o.degree_)
    throw std::invalid_argument("polynomial shape mismatch in -");
  HomogeneousPolynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
  return out;
}

HomogeneousPolynomial HomogeneousPolynomial::operator*(const HomogeneousPolynomial& o) const {
  if (num_vars_ != o.num_vars_) throw std::invalid_argument("polynomial variables mismatch in *");
  HomogeneousPolynomial out(num_vars_, degree_ + o.degree_);
  std::vector<int> e(num_vars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (int i = 0; i < num_vars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

HomogeneousPolynomial HomogeneousPolynomial::scaled(const Rational& c) const {
  HomogeneousPolynomial out(num_vars_, degree_);
  if (c == 0) return out;
  for (const auto& [e, v] : terms_) out.add_term(e, v * c);
  return out;
}

HomogeneousPolynomial HomogeneousPolynomial::derivative(int var) const {
  if (var < 0 || var >= num_vars_) throw std::invalid_argument("derivative variable out of range");
  HomogeneousPolynomial out(num_vars_, std::max(degree_ - 1, 0));
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    std::vector<int> d = e;
    d[var] -= 1;
    out.add_term(std::move(d), c * e[var]);
  }
  return out;
}

HomogeneousPolynomial HomogeneousPolynomial::laplacian() const {
  HomogeneousPolynomial out(num_vars_, std::max(degree_ - 2, 0));
  for (const auto& [e, c] : terms_)
    for (int i = 0; i < num_vars_; ++i) {
      if (e[i] < 2) continue;
      std::vector<int> d = e;
      d[i] -= 2;
      out.add_term(std::move(d), c * e[i] * (e[i] - 1));
    }
  return out;
}

double HomogeneousPolynomial::evaluate(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != num_vars_)
    throw std::invalid_argument("evaluation point dimension mismatch");
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = static_cast<double>(c);
    for (int i = 0; i < num_vars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

void HomogeneousPolynomial::write(std::ostream& os) const {
  os << "# homogeneous polynomial: " << num_vars_ << " variables, degree " << degree_ << "\n";
  for (const auto& [e, c] : terms_) {
    os << numerator(c) << "/" << denominator(c);
    for (int k : e) os << " " << k;
    os << "\n";
  }
}

HomogeneousPolynomial HomogeneousPolynomial::read(std::istream& is) {
  std::vector<std::pair<std::vector<int>, Rational>> parsed;
  int nv = -1;
  std::string line;
  while (std::getline(is, line)) {
    const auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string coeff_tok;
    if (!(ls >> coeff_tok)) continue;
    Rational c;
    const auto slash = coeff_tok.find('/');
    if (slash == std::string::npos)
      c = Rational(boost::multiprecision::cpp_int(coeff_tok));
    else
      c = Rational(boost::multiprecision::cpp_int(coeff_tok.substr(0, slash)),
                   boost::multiprecision::cpp_int(coeff_tok.substr(slash + 1)));
    std::vector<int> e;
    int k;
    while (ls >> k) e.push_back(k);
    if (e.empty()) throw std::runtime_error("polynomial term without exponents: " + line);
    if (nv < 0) nv = static_cast<int>(e.size());
    if (static_cast<int>(e.size()) != nv)
      throw std::runtime_error("inconsistent variable count in polynomial file");
    parsed.emplace_back(std::move(e), c);
  }
  if (parsed.empty()) throw std::runtime_error("empty polynomial file");
  const int deg = std::accumulate(parsed.front().first.begin(), parsed.front().first.end(), 0);
  HomogeneousPolynomial p(nv, deg);
  for (auto& [e, c] : parsed) p.add_term(std::move(e), c);
  return p;
}

MunznerVerdict munzner_verify(const HomogeneousPolynomial& F) {
  MunznerVerdict v;
  v.g = F.degree();
  if (v.g < 1) throw std::invalid_argument("degree must be >= 1");
  const int nv = F.num_vars();

  // |grad F|^2 - g^2 |x|^{2g-2} must vanish identically.
  HomogeneousPolynomial grad2(nv, 2 * v.g - 2);
  for (int i = 0; i < nv; ++i) {
    const HomogeneousPolynomial d = F.derivative(i);
    grad2 = grad2 + d * d;
  }
  const HomogeneousPolynomial defect =
      grad2 - HomogeneousPolynomial::radius_power(nv, v.g - 1).scaled(Rational(v.g) * v.g);
  v.gradient_ok = defect.is_zero();
  if (!v.gradient_ok) v.witness = *defect.terms().begin();

  const HomogeneousPolynomial lap = F.laplacian();
  if (v.g % 2 == 1) {
    // |x|^{g-2} is not a polynomial for odd g: the identity forces c = 0.
    v.c = 0;
    v.laplacian_ok = lap.is_zero();
    if (!v.laplacian_ok && !v.witness) v.witness = *lap.terms().begin();
  } else {
    const HomogeneousPolynomial rp = HomogeneousPolynomial::radius_power(nv, (v.g - 2) / 2);
    // c is the coefficient of any pure power x_i^{g-2} (1 in rp).
    std::vector<int> probe(nv, 0);
    probe[0] = v.g - 2;
    const auto it = lap.terms().find(probe);
    v.c = it == lap.terms().end() ? Rational(0) : it->second;
    const HomogeneousPolynomial lap_defect = lap - rp.scaled(v.c);
    v.laplacian_ok = lap_defect.is_zero();
    if (!v.laplacian_ok && !v.witness) v.witness = *lap_defect.terms().begin();
  }
  v.c_differs_from_bound = (v.c != Rational(nv - 1) * v.g);
  return v;
}

HomogeneousPolynomial clifford_quadric(int p, int q) {
  if (p < 1 || q < 1) throw std::invalid_argument("clifford_quadric needs p, q >= 1");
  const int nv = p + q + 2;
  HomogeneousPolynomial F(nv, 2);
  for (int i = 0; i < nv; ++i) {
    std::vector<int> e(nv, 0);
    e[i] = 2;
    F.add_term(std::move(e), i <= p ? 1 : -1);
  }
  return F;
}

} // namespace heatlab
