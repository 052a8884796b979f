#pragma once

// The equation family  a*x^d - y^2 - z^2 + x*y*z - b = 0  with derived
// constant b = 2^d * a - 3^r.  Fixing x makes the equation quadratic in y,
// which turns the integer search into a discriminant perfect-square test:
//   y^2 - (x*z)*y + (z^2 + b - a*x^d) = 0,
//   D(x, z) = (x^2 - 4)*z^2 + 4*(a*x^d - b).

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "dioforge/intmath.hpp"

namespace dioforge::diophantine {

enum class Validation { strict, exploratory };

// Parameter rejection that names the violated hypothesis.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(const std::string& hypothesis, const std::string& message)
      : std::invalid_argument(hypothesis + ": " + message), hypothesis_(hypothesis) {}
  const std::string& hypothesis() const { return hypothesis_; }

 private:
  std::string hypothesis_;
};

struct EquationParams {
  mpz_class a;
  int d = 3;
  int r = 1;
  mpz_class b;  // always derived: 2^d * a - 3^r
  Validation validation = Validation::strict;
};

inline mpz_class derive_b(const mpz_class& a, int d, int r) {
  mpz_class b = (mpz_class(1) << static_cast<unsigned>(d)) * a;
  mpz_class p3;
  mpz_ui_pow_ui(p3.get_mpz_t(), 3, static_cast<unsigned long>(r));
  return b - p3;
}

// Strict mode enforces the full insolvability hypotheses; exploratory mode
// only needs the equation to make sense (d >= 1), so solvable relatives of
// the family can be probed too.
inline EquationParams make_params(const mpz_class& a, int d, int r,
                                  Validation validation = Validation::strict) {
  if (d < 1) throw ValidationError("d-positivity", "d must be a positive integer");
  if (r < 1) throw ValidationError("r-positivity", "r must be a positive integer");
  if (validation == Validation::strict) {
    if (mpz_fdiv_ui(a.get_mpz_t(), 12) != 1)
      throw ValidationError("a-class", "strict validation requires a == 1 (mod 12); got a = " +
                                            a.get_str());
    if (d % 2 == 0)
      throw ValidationError("d-parity",
                            "strict validation requires odd d; got d = " + std::to_string(d));
    if (d % 3 != 0)
      throw ValidationError(
          "d-divisibility",
          "strict validation requires d divisible by 3; got d = " + std::to_string(d));
    if (r % 2 == 0)
      throw ValidationError("r-parity",
                            "strict validation requires odd r; got r = " + std::to_string(r));
  }
  return EquationParams{a, d, r, derive_b(a, d, r), validation};
}

struct SolutionTriple {
  mpz_class x, y, z;

  friend bool operator==(const SolutionTriple& p, const SolutionTriple& q) {
    return p.x == q.x && p.y == q.y && p.z == q.z;
  }
  // Search output order: lexicographic by (x, z, y).
  friend bool operator<(const SolutionTriple& p, const SolutionTriple& q) {
    if (int c = cmp(p.x, q.x); c != 0) return c < 0;
    if (int c = cmp(p.z, q.z); c != 0) return c < 0;
    return cmp(p.y, q.y) < 0;
  }
};

inline mpz_class eval_residual(const EquationParams& params, const mpz_class& x,
                               const mpz_class& y, const mpz_class& z) {
  mpz_class xd;
  mpz_pow_ui(xd.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(params.d));
  return params.a * xd - y * y - z * z + x * y * z - params.b;
}

// Rational evaluation (used by the curve correspondence, which maps curve
// points to rational triples).
inline mpq_class eval_residual(const EquationParams& params, const mpq_class& x,
                               const mpq_class& y, const mpq_class& z) {
  mpq_class xd = 1;
  for (int i = 0; i < params.d; ++i) xd *= x;
  return mpq_class(params.a) * xd - y * y - z * z + x * y * z - mpq_class(params.b);
}

inline mpz_class y_discriminant(const EquationParams& params, const mpz_class& x,
                                const mpz_class& z) {
  mpz_class xd;
  mpz_pow_ui(xd.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(params.d));
  return (x * x - 4) * z * z + 4 * (params.a * xd - params.b);
}

// All integer y with eval_residual(x, y, z) == 0, ascending.  Roots are
// (x*z +- sqrt(D))/2 when D is a perfect square and the parity works out;
// each candidate is re-verified by substitution before being returned.
inline std::vector<mpz_class> solve_y(const EquationParams& params, const mpz_class& x,
                                      const mpz_class& z) {
  std::vector<mpz_class> out;
  const mpz_class D = y_discriminant(params, x, z);
  if (D < 0) return out;
  const std::optional<mpz_class> s = intmath::is_perfect_square(D);
  if (!s) return out;
  const mpz_class u = x * z;
  if (mpz_odd_p(mpz_class(u + *s).get_mpz_t())) return out;  // u - s has the same parity
  for (const mpz_class& t : {mpz_class(u - *s), mpz_class(u + *s)}) {
    const mpz_class y = t / 2;
    if (!out.empty() && out.back() == y) continue;  // double root when D == 0
    if (eval_residual(params, x, y, z) != 0)
      throw std::logic_error("solve_y: candidate failed re-substitution");
    out.push_back(y);
  }
  return out;
}

// Congruence sieve: the insolvability arguments eliminate every residue of x
// mod 12 except 5 (even x fall mod 4, x == 3 (mod 4) falls mod 4, x == 1
// (mod 3) falls mod 3, x == 9 (mod 12) falls to a prime factor of x - 2).
// Only justified under the strict hypotheses.
inline bool sieve_admits(const EquationParams& params, const mpz_class& x) {
  if (params.validation != Validation::strict)
    throw std::invalid_argument("sieve_admits: the sieve is only proven for strict parameters");
  return mpz_fdiv_ui(x.get_mpz_t(), 12) == 5;
}

struct SearchConfig {
  std::int64_t x_min = -200, x_max = 200;
  std::int64_t z_min = -2000, z_max = 2000;
  bool sieve_enabled = true;
  unsigned worker_count = 0;  // 0 = use available parallelism
};

namespace detail {

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Scan one x column over the z range; results arrive sorted by (z, y).
inline void scan_column(const EquationParams& params, std::int64_t x, std::int64_t z_min,
                        std::int64_t z_max, std::vector<SolutionTriple>& out) {
  const mpz_class X(static_cast<long>(x));
  mpz_class xd;
  mpz_pow_ui(xd.get_mpz_t(), X.get_mpz_t(), static_cast<unsigned long>(params.d));
  const mpz_class P = 4 * (params.a * xd - params.b);
  const mpz_class Q = X * X - 4;
  for (std::int64_t z = z_min; z <= z_max; ++z) {
    const mpz_class Z(static_cast<long>(z));
    const mpz_class D = Q * (Z * Z) + P;
    if (D < 0) continue;
    const std::optional<mpz_class> s = intmath::is_perfect_square(D);
    if (!s) continue;
    const mpz_class u = X * Z;
    if (mpz_odd_p(mpz_class(u + *s).get_mpz_t())) continue;
    for (const mpz_class& t : {mpz_class(u - *s), mpz_class(u + *s)}) {
      const mpz_class y = t / 2;
      if (!out.empty() && out.back().x == X && out.back().z == Z && out.back().y == y) continue;
      if (params.a * xd - y * y - Z * Z + X * y * Z - params.b != 0)
        throw std::logic_error("search: candidate failed re-substitution");
      out.push_back(SolutionTriple{X, y, Z});
    }
  }
}

}  // namespace detail

// Exhaustive scan over the rectangle, optionally sieved (strict params only).
// The x columns are partitioned across workers in contiguous blocks, so
// results are independent of worker_count; a final sort enforces (x, z, y).
inline std::vector<SolutionTriple> search(const EquationParams& params, const SearchConfig& cfg) {
  if (cfg.x_min > cfg.x_max || cfg.z_min > cfg.z_max)
    throw std::invalid_argument("search: ranges must be nonempty");

  std::vector<std::int64_t> columns;
  const bool sieve = cfg.sieve_enabled && params.validation == Validation::strict;
  for (std::int64_t x = cfg.x_min; x <= cfg.x_max; ++x)
    if (!sieve || sieve_admits(params, mpz_class(static_cast<long>(x)))) columns.push_back(x);

  const unsigned workers =
      std::min<std::size_t>(detail::resolve_workers(cfg.worker_count), std::max<std::size_t>(columns.size(), 1));
  std::vector<std::vector<SolutionTriple>> partial(workers);
  std::vector<std::thread> pool;
  const std::size_t per = (columns.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * per;
    const std::size_t hi = std::min(columns.size(), lo + per);
    if (lo >= hi) continue;
    pool.emplace_back([&, lo, hi, w] {
      for (std::size_t i = lo; i < hi; ++i)
        detail::scan_column(params, columns[i], cfg.z_min, cfg.z_max, partial[w]);
    });
  }
  for (auto& t : pool) t.join();

  std::vector<SolutionTriple> out;
  for (auto& block : partial)
    out.insert(out.end(), std::make_move_iterator(block.begin()),
               std::make_move_iterator(block.end()));
  std::sort(out.begin(), out.end());
  return out;
}

// Pretty form matching the reference-table style: "13x^3-y^2-z^2+xyz-77=0".
inline std::string format_equation(const EquationParams& params) {
  std::string s;
  if (params.a != 1) s += params.a.get_str();
  s += "x^" + std::to_string(params.d) + "-y^2-z^2+xyz";
  if (params.b >= 0)
    s += "-" + params.b.get_str();
  else
    s += "+" + mpz_class(-params.b).get_str();
  s += "=0";
  return s;
}

}  // namespace dioforge::diophantine
