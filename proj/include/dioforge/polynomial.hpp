#pragma once

// Dense univariate integer polynomials (coefficients constant-first) with the
// exact algebra needed for curve work: pseudo-division, primitive-PRS gcd,
// resultants by two independent routes (polynomial remainder sequence and
// Sylvester/Bareiss determinant), discriminants, and integer-root isolation
// via Sturm-guided bisection inside the Cauchy bound.

#include <gmpxx.h>

#include <algorithm>
#include <cassert>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dioforge::poly {

class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) { normalize(); }
  IntPolynomial(std::initializer_list<long> coeffs) {
    for (long v : coeffs) c_.emplace_back(v);
    normalize();
  }

  static IntPolynomial monomial(const mpz_class& coeff, std::size_t power) {
    std::vector<mpz_class> c(power + 1, mpz_class(0));
    c[power] = coeff;
    return IntPolynomial(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  // Degree of the zero polynomial is -1 by convention.
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  const mpz_class& coeff(std::size_t i) const {
    static const mpz_class kZero = 0;
    return i < c_.size() ? c_[i] : kZero;
  }
  const std::vector<mpz_class>& coefficients() const { return c_; }
  const mpz_class& leading() const {
    if (c_.empty()) throw std::invalid_argument("leading(): zero polynomial");
    return c_.back();
  }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) { return a.c_ == b.c_; }
  friend bool operator!=(const IntPolynomial& a, const IntPolynomial& b) { return !(a == b); }

  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
    std::vector<mpz_class> c(std::max(a.c_.size(), b.c_.size()), mpz_class(0));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
    return IntPolynomial(std::move(c));
  }
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
    std::vector<mpz_class> c(std::max(a.c_.size(), b.c_.size()), mpz_class(0));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
    return IntPolynomial(std::move(c));
  }
  friend IntPolynomial operator-(const IntPolynomial& a) {
    std::vector<mpz_class> c = a.c_;
    for (auto& v : c) v = -v;
    return IntPolynomial(std::move(c));
  }
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpz_class> c(a.c_.size() + b.c_.size() - 1, mpz_class(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return IntPolynomial(std::move(c));
  }
  friend IntPolynomial operator*(const mpz_class& s, const IntPolynomial& a) {
    if (s == 0) return {};
    std::vector<mpz_class> c = a.c_;
    for (auto& v : c) v *= s;
    return IntPolynomial(std::move(c));
  }

  mpz_class eval(const mpz_class& x) const {  // Horner
    mpz_class acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  mpq_class eval(const mpq_class& x) const {
    mpq_class acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + mpq_class(*it);
    return acc;
  }

  // Human form, descending powers: "X^3 + X^2 - 9".
  std::string to_string(const std::string& var = "X") const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
      const mpz_class& c = coeff(static_cast<std::size_t>(i));
      if (c == 0) continue;
      const mpz_class mag = abs(c);
      if (first) {
        if (c < 0) os << "-";
        first = false;
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      if (mag != 1 || i == 0) os << mag.get_str();
      if (i > 0) {
        os << var;
        if (i > 1) os << "^" << i;
      }
    }
    return os.str();
  }

 private:
  void normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<mpz_class> c_;  // constant-first; empty <=> zero polynomial
};

inline IntPolynomial derivative(const IntPolynomial& p) {
  if (p.degree() < 1) return {};
  std::vector<mpz_class> c(static_cast<std::size_t>(p.degree()));
  for (std::size_t i = 1; i <= static_cast<std::size_t>(p.degree()); ++i)
    c[i - 1] = mpz_class(static_cast<unsigned long>(i)) * p.coeff(i);
  return IntPolynomial(std::move(c));
}

inline mpz_class content(const IntPolynomial& p) {  // nonnegative
  mpz_class g = 0;
  for (const auto& c : p.coefficients()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

inline IntPolynomial primitive_part(const IntPolynomial& p) {
  if (p.is_zero()) return {};
  const mpz_class g = content(p);
  std::vector<mpz_class> c(p.coefficients());
  for (auto& v : c) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
  return IntPolynomial(std::move(c));
}

// Pseudo-remainder: remainder of lc(B)^(deg A - deg B + 1) * A under division
// by B.  Requires deg A >= deg B >= 0.
inline IntPolynomial pseudo_remainder(IntPolynomial A, const IntPolynomial& B) {
  if (B.is_zero()) throw std::invalid_argument("pseudo_remainder: division by zero polynomial");
  const int dB = B.degree();
  const mpz_class& b = B.leading();
  int e = A.degree() - dB + 1;
  if (e < 0) throw std::invalid_argument("pseudo_remainder: deg A < deg B");
  while (!A.is_zero() && A.degree() >= dB) {
    const IntPolynomial shifted = IntPolynomial::monomial(A.leading(), A.degree() - dB) * B;
    A = b * A - shifted;
    --e;
  }
  if (e > 0) {
    mpz_class be;
    mpz_pow_ui(be.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
    A = be * A;
  }
  return A;
}

// Exact division: returns Q with A == B*Q, throwing if B does not divide A.
inline IntPolynomial divide_exact(IntPolynomial A, const IntPolynomial& B) {
  if (B.is_zero()) throw std::invalid_argument("divide_exact: division by zero polynomial");
  if (A.is_zero()) return {};
  if (A.degree() < B.degree()) throw std::invalid_argument("divide_exact: not divisible");
  std::vector<mpz_class> q(static_cast<std::size_t>(A.degree() - B.degree()) + 1, mpz_class(0));
  while (!A.is_zero() && A.degree() >= B.degree()) {
    if (!mpz_divisible_p(A.leading().get_mpz_t(), B.leading().get_mpz_t()))
      throw std::invalid_argument("divide_exact: not divisible");
    mpz_class qc;
    mpz_divexact(qc.get_mpz_t(), A.leading().get_mpz_t(), B.leading().get_mpz_t());
    const std::size_t k = static_cast<std::size_t>(A.degree() - B.degree());
    q[k] = qc;
    A = A - IntPolynomial::monomial(qc, k) * B;
  }
  if (!A.is_zero()) throw std::invalid_argument("divide_exact: nonzero remainder");
  return IntPolynomial(std::move(q));
}

// Primitive-PRS gcd: the positive-leading-coefficient primitive generator of
// the rational gcd.  gcd(f, 0) = +-primitive(f).
inline IntPolynomial gcd(IntPolynomial A, IntPolynomial B) {
  auto normalize_sign = [](IntPolynomial p) {
    if (!p.is_zero() && p.leading() < 0) p = -p;
    return p;
  };
  if (A.is_zero()) return normalize_sign(primitive_part(B));
  if (B.is_zero()) return normalize_sign(primitive_part(A));
  A = primitive_part(A);
  B = primitive_part(B);
  if (A.degree() < B.degree()) std::swap(A, B);
  while (!B.is_zero()) {
    IntPolynomial R = pseudo_remainder(A, B);
    A = std::move(B);
    B = R.is_zero() ? IntPolynomial{} : primitive_part(R);
  }
  return normalize_sign(std::move(A));
}

inline IntPolynomial squarefree_part(const IntPolynomial& p) {
  if (p.is_zero()) throw std::invalid_argument("squarefree_part: zero polynomial");
  const IntPolynomial pp = primitive_part(p);
  if (pp.degree() == 0) return pp;
  return divide_exact(pp, gcd(pp, derivative(pp)));
}

namespace detail {

// Classical resultant res(A, B) = lc(A)^deg(B) * prod B(alpha) over the roots
// of A, computed through a pseudo-remainder sequence with content stripping.
inline mpz_class resultant_classical(IntPolynomial A, IntPolynomial B) {
  if (A.is_zero() || B.is_zero()) return 0;
  mpq_class acc = 1;
  auto pow_q = [](const mpz_class& base, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return mpq_class(r);
  };
  while (B.degree() > 0) {
    if (A.degree() < B.degree()) {
      if ((A.degree() & 1) && (B.degree() & 1)) acc = -acc;
      std::swap(A, B);
      continue;
    }
    const int m = A.degree(), n = B.degree();
    IntPolynomial R = pseudo_remainder(A, B);
    if (R.is_zero()) return 0;  // positive-degree common factor
    if ((m & 1) && (n & 1)) acc = -acc;
    const int r = R.degree();
    acc *= pow_q(B.leading(), static_cast<unsigned long>(m - r));
    acc /= pow_q(B.leading(), static_cast<unsigned long>((m - n + 1) * n));
    const mpz_class cont = content(R);
    R = primitive_part(R);
    acc *= pow_q(cont, static_cast<unsigned long>(n));
    A = std::move(B);
    B = std::move(R);
  }
  // Here B is a nonzero constant: res(A, b) = b^deg(A).
  acc *= pow_q(B.coeff(0), static_cast<unsigned long>(A.degree()));
  acc.canonicalize();
  if (acc.get_den() != 1)
    throw std::logic_error("resultant_classical: non-integral accumulator");
  return acc.get_num();
}

// Fraction-free (Bareiss) determinant of an integer matrix.
inline mpz_class bareiss_determinant(std::vector<std::vector<mpz_class>> M) {
  const std::size_t n = M.size();
  if (n == 0) return 1;
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (M[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && M[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(M[k], M[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class t = M[k][k] * M[i][j] - M[i][k] * M[k][j];
        mpz_divexact(M[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = M[k][k];
  }
  return sign * M[n - 1][n - 1];
}

// Sylvester matrix of (A, B) in the classical orientation (deg B rows of A's
// descending coefficients, then deg A rows of B's).
inline std::vector<std::vector<mpz_class>> sylvester_matrix(const IntPolynomial& A,
                                                            const IntPolynomial& B) {
  const int m = A.degree(), n = B.degree();
  const std::size_t dim = static_cast<std::size_t>(m + n);
  std::vector<std::vector<mpz_class>> M(dim, std::vector<mpz_class>(dim, mpz_class(0)));
  for (int row = 0; row < n; ++row)
    for (int i = 0; i <= m; ++i) M[row][row + i] = A.coeff(static_cast<std::size_t>(m - i));
  for (int row = 0; row < m; ++row)
    for (int i = 0; i <= n; ++i) M[n + row][row + i] = B.coeff(static_cast<std::size_t>(n - i));
  return M;
}

}  // namespace detail

// Resultant normalized so that res(X - a, X - b) = b - a, i.e. the product of
// f evaluated at the roots of g (times lc(g)^deg f).  Primary route: PRS.
inline mpz_class resultant(const IntPolynomial& f, const IntPolynomial& g) {
  if (f.is_zero() || g.is_zero()) return 0;
  return detail::resultant_classical(g, f);
}

// Independent route: Sylvester-matrix determinant via Bareiss elimination.
// Same normalization as resultant().
inline mpz_class resultant_sylvester(const IntPolynomial& f, const IntPolynomial& g) {
  if (f.is_zero() || g.is_zero()) return 0;
  if (f.degree() == 0 && g.degree() == 0) return 1;
  return detail::bareiss_determinant(detail::sylvester_matrix(g, f));
}

// disc(f) = (-1)^(n(n-1)/2) * res(f, f') for monic f of degree n >= 1.
inline mpz_class discriminant(const IntPolynomial& f) {
  if (f.degree() < 1) throw std::invalid_argument("discriminant: degree must be >= 1");
  if (!f.is_monic()) throw std::invalid_argument("discriminant: polynomial must be monic");
  const unsigned long n = static_cast<unsigned long>(f.degree());
  mpz_class res = resultant(f, derivative(f));
  if ((n * (n - 1) / 2) % 2 == 1) res = -res;
  return res;
}

inline bool is_squarefree(const IntPolynomial& f) {
  if (f.is_zero()) return false;
  if (f.degree() <= 1) return true;
  return gcd(f, derivative(f)).degree() == 0;
}

namespace detail {

// Sign of p at the rational t, using the homogenized integer form to avoid
// rational normalization in the hot path.
inline int sign_at(const IntPolynomial& p, const mpq_class& t) {
  if (p.is_zero()) return 0;
  const mpz_class& num = t.get_num();
  const mpz_class& den = t.get_den();  // canonical: den > 0
  mpz_class acc = p.leading();
  mpz_class dpow = 1;
  for (int i = p.degree() - 1; i >= 0; --i) {
    dpow *= den;
    acc = acc * num + p.coeff(static_cast<std::size_t>(i)) * dpow;
  }
  return sgn(acc);
}

// Sturm machinery for a squarefree polynomial.
struct SturmChain {
  std::vector<IntPolynomial> chain;

  explicit SturmChain(const IntPolynomial& h) {
    chain.push_back(h);
    chain.push_back(derivative(h));
    while (chain.back().degree() > 0) {
      const IntPolynomial& a = chain[chain.size() - 2];
      const IntPolynomial& b = chain.back();
      IntPolynomial r = pseudo_remainder(a, b);
      if (r.is_zero()) break;  // cannot happen for squarefree h, kept defensive
      // prem scales by lc(b)^(delta+1); undo a negative scale so the chain
      // keeps true Sturm signs, then negate and strip content.
      const int delta = a.degree() - b.degree();
      const bool flipped = b.leading() < 0 && ((delta + 1) & 1);
      r = primitive_part(r);
      chain.push_back(flipped ? std::move(r) : -r);
    }
  }

  int variations(const mpq_class& t) const {
    int count = 0, prev = 0;
    for (const auto& p : chain) {
      const int s = sign_at(p, t);
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++count;
      prev = s;
    }
    return count;
  }

  // Number of roots of h in the open interval (a, b); endpoints must not be
  // roots of h.
  int count(const mpq_class& a, const mpq_class& b) const { return variations(a) - variations(b); }
};

struct RootIsolator {
  const IntPolynomial& h;  // squarefree
  SturmChain sturm;
  std::vector<std::pair<mpq_class, mpq_class>> intervals;  // width < 1, one root each
  long guard = 0;

  explicit RootIsolator(const IntPolynomial& sf) : h(sf), sturm(sf) {}

  // A split point in (a, b) that is not a root of h.  The midpoint nearly
  // always works; finer grids guarantee success (h has finitely many roots).
  mpq_class pick_split(const mpq_class& a, const mpq_class& b) {
    const mpq_class width = b - a;
    for (int den : {2, 16, 64, 256}) {
      for (int num = 1; num < den; num += 2) {
        mpq_class t = a + width * num / den;
        t.canonicalize();
        if (sign_at(h, t) != 0) return t;
      }
    }
    throw std::logic_error("RootIsolator: could not find a non-root split point");
  }

  void isolate(const mpq_class& a, const mpq_class& b, int nroots) {
    if (++guard > 200000) throw std::logic_error("RootIsolator: bisection guard tripped");
    if (nroots == 0) return;
    if (nroots == 1 && b - a < 1) {
      intervals.emplace_back(a, b);
      return;
    }
    const mpq_class mid = pick_split(a, b);
    const int left = sturm.count(a, mid);
    isolate(a, mid, left);
    isolate(mid, b, nroots - left);
  }
};

}  // namespace detail

// All integer roots of g, in ascending order.  Real roots of the squarefree
// part are isolated by Sturm sign-change counts under bisection within the
// Cauchy bound, each interval is narrowed below width 1, and the adjacent
// integers are then tested by exact evaluation.  The constant term is never
// factored.
inline std::vector<mpz_class> integer_roots(const IntPolynomial& g) {
  if (g.is_zero()) throw std::invalid_argument("integer_roots: zero polynomial");
  if (g.degree() == 0) return {};
  const IntPolynomial h = squarefree_part(g);

  // Cauchy bound for h: every real root has |x| < 1 + max|c_i| / |lc|.
  mpz_class maxabs = 0;
  for (int i = 0; i < h.degree(); ++i) {
    const mpz_class m = abs(h.coeff(static_cast<std::size_t>(i)));
    if (m > maxabs) maxabs = m;
  }
  const mpz_class lead_abs = abs(h.leading());
  mpz_class bound;
  mpz_cdiv_q(bound.get_mpz_t(), maxabs.get_mpz_t(), lead_abs.get_mpz_t());
  bound += 1;

  detail::RootIsolator iso(h);
  const mpq_class lo(-bound), hi(bound);
  iso.isolate(lo, hi, iso.sturm.count(lo, hi));

  std::vector<mpz_class> roots;
  for (const auto& [a, b] : iso.intervals) {
    mpz_class lo_int, hi_int;
    mpz_cdiv_q(lo_int.get_mpz_t(), a.get_num().get_mpz_t(), a.get_den().get_mpz_t());
    mpz_fdiv_q(hi_int.get_mpz_t(), b.get_num().get_mpz_t(), b.get_den().get_mpz_t());
    for (mpz_class x = lo_int; x <= hi_int; ++x)
      if (g.eval(x) == 0) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

}  // namespace dioforge::poly
