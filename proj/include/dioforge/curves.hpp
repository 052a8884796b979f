#pragma once

// Hyperelliptic models attached to the equation family.  Fixing z = m and
// completing the square in y turns  a*x^d - y^2 - z^2 + x*y*z - b = 0  into
// Y^2 = f(X) for a monic integer f of degree d (genus (d-1)/2):
//
//   m even:  f(X) = X^d + a^(d-3)*(m^2/4)*X^2 - (m^2 + b)*a^(d-1)
//            via X = a*x,  Y = a^((d-1)/2)*(y - m*x/2)
//   m odd:   f(X) = X^d + (4a)^(d-3)*m^2*X^2 - (m^2 + b)*a^(d-1)*4^d
//            via X = 4*a*x, Y = a^((d-1)/2)*2^d*(y - m*x/2)
//
// A Nagell-Lutz-style check then enumerates integral points whose Y is 0 or
// has Y^2 dividing disc(f): if every such point fails to map back to an
// integral solution of the base equation, no integral point can be torsion.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dioforge/diophantine.hpp"
#include "dioforge/intmath.hpp"
#include "dioforge/polynomial.hpp"

namespace dioforge::curves {

enum class ParityBranch { even, odd };

inline std::string to_string(ParityBranch p) {
  return p == ParityBranch::even ? "even" : "odd";
}

// A curve built from family parameters remembers them (enabling the reverse
// point map); a synthetic curve made from a bare polynomial does not.
struct CurveModel {
  poly::IntPolynomial f;  // monic, degree d
  int genus = 0;
  mpz_class discriminant;
  bool squarefree = false;
  long m = 0;  // family parameter (z-slice); meaningful only with provenance
  ParityBranch parity_branch = ParityBranch::even;
  std::optional<diophantine::EquationParams> family;

  static CurveModel from_polynomial(poly::IntPolynomial f) {
    if (f.degree() < 3 || !f.is_monic())
      throw std::invalid_argument("CurveModel: f must be monic of degree >= 3");
    CurveModel c;
    c.discriminant = poly::discriminant(f);
    c.squarefree = c.discriminant != 0;
    c.genus = (static_cast<int>(f.degree()) - 1) / 2;
    c.f = std::move(f);
    return c;
  }
};

class SingularModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CurveModel build_curve(const diophantine::EquationParams& params, long m) {
  if (params.validation != diophantine::Validation::strict)
    throw std::invalid_argument("build_curve: curve models require strict parameters");
  if (m < 1) throw std::invalid_argument("build_curve: m must be >= 1");
  const int d = params.d;  // strict => d odd, divisible by 3, so d >= 3
  const mpz_class M(m);
  mpz_class quad, cnst;  // f(X) = X^d + quad*X^2 - cnst
  ParityBranch branch;
  mpz_class a_dm1;
  mpz_pow_ui(a_dm1.get_mpz_t(), params.a.get_mpz_t(), static_cast<unsigned long>(d - 1));
  if (m % 2 == 0) {
    branch = ParityBranch::even;
    mpz_class a_dm3;
    mpz_pow_ui(a_dm3.get_mpz_t(), params.a.get_mpz_t(), static_cast<unsigned long>(d - 3));
    const mpz_class half(m / 2);
    quad = a_dm3 * half * half;
    cnst = (M * M + params.b) * a_dm1;
  } else {
    branch = ParityBranch::odd;
    mpz_class fa_dm3;
    mpz_class four_a = 4 * params.a;
    mpz_pow_ui(fa_dm3.get_mpz_t(), four_a.get_mpz_t(), static_cast<unsigned long>(d - 3));
    quad = fa_dm3 * M * M;
    cnst = (M * M + params.b) * a_dm1 * (mpz_class(1) << static_cast<unsigned>(2 * d));
  }

  poly::IntPolynomial f = poly::IntPolynomial::monomial(mpz_class(1), static_cast<std::size_t>(d)) +
                          poly::IntPolynomial::monomial(quad, 2) +
                          poly::IntPolynomial::monomial(-cnst, 0);
  CurveModel c;
  c.discriminant = poly::discriminant(f);
  c.squarefree = c.discriminant != 0;
  if (!c.squarefree)
    throw SingularModelError("build_curve: singular model (repeated root of f) for m = " +
                             std::to_string(m));
  c.genus = (d - 1) / 2;
  c.f = std::move(f);
  c.m = m;
  c.parity_branch = branch;
  c.family = params;
  return c;
}

// Integral X with f(X) = y_abs^2, ascending.
inline std::vector<mpz_class> integral_points_at_height(const poly::IntPolynomial& f,
                                                        const mpz_class& y_abs) {
  if (f.degree() < 1) throw std::invalid_argument("integral_points_at_height: constant f");
  if (y_abs < 0) throw std::invalid_argument("integral_points_at_height: y_abs must be >= 0");
  return poly::integer_roots(f + poly::IntPolynomial::monomial(-y_abs * y_abs, 0));
}

struct IntegralPoint {
  mpz_class X, Y;

  friend bool operator==(const IntegralPoint& p, const IntegralPoint& q) {
    return p.X == q.X && p.Y == q.Y;
  }
};

struct CandidateSet {
  std::vector<IntegralPoint> points;       // sorted by (|Y|, X, Y)
  std::vector<mpz_class> y_values;         // 0, then +-s for each divisor s of S
  intmath::Factorization disc_factorization;
  bool exhaustive = true;  // false when the factorization was incomplete
};

namespace detail {

// Divisors of prod p_i^{h_i} with h_i = floor(e_i / 2), ascending.
inline std::vector<mpz_class> square_part_divisors(const intmath::Factorization& fact,
                                                   std::size_t cap = 100000) {
  std::vector<mpz_class> divisors{1};
  for (const auto& [p, e] : fact.factors) {
    const unsigned h = e / 2;
    if (h == 0) continue;
    const std::size_t base = divisors.size();
    mpz_class pk = 1;
    for (unsigned k = 1; k <= h; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) divisors.push_back(divisors[i] * pk);
      if (divisors.size() > cap)
        throw std::runtime_error("square_part_divisors: divisor count exceeds cap");
    }
  }
  std::sort(divisors.begin(), divisors.end());
  return divisors;
}

}  // namespace detail

// Enumerate the Nagell-Lutz candidate set: integral points with Y = 0 or
// Y^2 | disc(f).  With an incomplete factorization the set may be a proper
// subset, flagged via `exhaustive = false`.
inline CandidateSet torsion_candidates(const CurveModel& curve,
                                       const intmath::FactorBudget& budget = {}) {
  if (!curve.squarefree)
    throw std::invalid_argument("torsion_candidates: curve model must be squarefree");
  CandidateSet out;
  out.disc_factorization = intmath::factorize(abs(curve.discriminant), budget);
  out.exhaustive = out.disc_factorization.complete;

  const std::vector<mpz_class> divisors =
      detail::square_part_divisors(out.disc_factorization);
  out.y_values.push_back(0);
  for (const mpz_class& s : divisors) {
    out.y_values.push_back(s);
    out.y_values.push_back(-s);
  }

  for (const mpz_class& s : divisors) {
    // s == divisors[0] == 1 handles |Y| = 1; Y = 0 handled separately below.
    for (const mpz_class& X : integral_points_at_height(curve.f, s)) {
      out.points.push_back(IntegralPoint{X, s});
      out.points.push_back(IntegralPoint{X, mpz_class(-s)});
    }
  }
  for (const mpz_class& X : integral_points_at_height(curve.f, 0))
    out.points.push_back(IntegralPoint{X, 0});

  std::sort(out.points.begin(), out.points.end(),
            [](const IntegralPoint& p, const IntegralPoint& q) {
              const mpz_class ap = abs(p.Y), aq = abs(q.Y);
              if (int c = cmp(ap, aq); c != 0) return c < 0;
              if (int c = cmp(p.X, q.X); c != 0) return c < 0;
              return cmp(q.Y, p.Y) < 0;  // +Y before -Y
            });
  return out;
}

// Reverse the substitution: a curve point (X, Y) corresponds to the rational
// triple (x, y, z) below; the triple solves the base equation exactly when
// (X, Y) lies on Y^2 = f(X).  The rational overload supports the residual
// correspondence identity
//   scale * eval_residual(mapped) = -(Y^2 - f(X)),
// scale = a^(d-1) on the even branch and a^(d-1)*4^d on the odd branch.
inline std::array<mpq_class, 3> map_point_to_triple(const CurveModel& curve, const mpq_class& X,
                                                    const mpq_class& Y) {
  if (!curve.family)
    throw std::invalid_argument("map_point_to_triple: curve has no family provenance");
  const diophantine::EquationParams& params = *curve.family;
  const int d = params.d;
  mpz_class a_half;  // a^((d-1)/2)
  mpz_pow_ui(a_half.get_mpz_t(), params.a.get_mpz_t(), static_cast<unsigned long>((d - 1) / 2));
  const mpq_class M(static_cast<long>(curve.m));
  mpq_class x, y;
  if (curve.parity_branch == ParityBranch::even) {
    x = X / mpq_class(params.a);
    y = Y / mpq_class(a_half) + M * X / mpq_class(2 * params.a);
  } else {
    x = X / mpq_class(4 * params.a);
    y = Y / mpq_class(a_half * (mpz_class(1) << static_cast<unsigned>(d))) +
        M * X / mpq_class(8 * params.a);
  }
  return {x, y, M};
}

inline std::array<mpq_class, 3> map_point_to_triple(const CurveModel& curve, const mpz_class& X,
                                                    const mpz_class& Y) {
  return map_point_to_triple(curve, mpq_class(X), mpq_class(Y));
}

// The exact multiplier in the residual correspondence identity above.
inline mpz_class residual_scale(const CurveModel& curve) {
  if (!curve.family)
    throw std::invalid_argument("residual_scale: curve has no family provenance");
  const diophantine::EquationParams& params = *curve.family;
  mpz_class scale;
  mpz_pow_ui(scale.get_mpz_t(), params.a.get_mpz_t(),
             static_cast<unsigned long>(params.d - 1));
  if (curve.parity_branch == ParityBranch::odd)
    scale <<= static_cast<unsigned>(2 * params.d);  // * 4^d
  return scale;
}

enum class TorsionVerdict { torsion_free, candidate_found, inconclusive };

inline std::string to_string(TorsionVerdict v) {
  switch (v) {
    case TorsionVerdict::torsion_free: return "torsion_free";
    case TorsionVerdict::candidate_found: return "candidate_found";
    case TorsionVerdict::inconclusive: return "inconclusive";
  }
  throw std::logic_error("to_string(TorsionVerdict): unknown verdict");
}

struct CandidateRecord {
  mpz_class X, Y;
  std::array<mpq_class, 3> mapped{};  // meaningful only when the curve has provenance
  bool integral = false;
  std::string disposition;
};

struct TorsionReport {
  TorsionVerdict verdict = TorsionVerdict::inconclusive;
  std::vector<CandidateRecord> candidates;
  std::vector<mpz_class> y_values_checked;
  intmath::Factorization disc_factorization;
  std::string notes;
};

// Verdict rules:
//   candidate_found  -- some candidate survives (maps to an integral triple,
//                       or the curve has no family map to reject against);
//   inconclusive     -- nothing survived but the candidate set may be
//                       incomplete (disc factorization hit its budget);
//   torsion_free     -- exhaustive candidate set, every point rejected.
inline TorsionReport check_torsion_free(const CurveModel& curve,
                                        const intmath::FactorBudget& budget = {}) {
  const CandidateSet set = torsion_candidates(curve, budget);
  TorsionReport report;
  report.y_values_checked = set.y_values;
  report.disc_factorization = set.disc_factorization;

  bool found = false;
  for (const IntegralPoint& pt : set.points) {
    CandidateRecord rec;
    rec.X = pt.X;
    rec.Y = pt.Y;
    if (!curve.family) {
      rec.disposition = "curve point with Y = 0 or Y^2 | disc; no family map to reject against";
      found = true;
    } else {
      rec.mapped = map_point_to_triple(curve, pt.X, pt.Y);
      const bool integral = rec.mapped[0].get_den() == 1 && rec.mapped[1].get_den() == 1 &&
                            rec.mapped[2].get_den() == 1;
      rec.integral = integral;
      if (!integral) {
        rec.disposition = "rejected: mapped triple is non-integral";
      } else {
        const mpq_class residual =
            diophantine::eval_residual(*curve.family, rec.mapped[0], rec.mapped[1], rec.mapped[2]);
        if (residual == 0) {
          rec.disposition = "integral solution of the base equation";
          found = true;
        } else {
          rec.disposition = "rejected: residual " + residual.get_str() + " != 0";
        }
      }
    }
    report.candidates.push_back(std::move(rec));
  }

  if (found)
    report.verdict = TorsionVerdict::candidate_found;
  else if (!set.exhaustive)
    report.verdict = TorsionVerdict::inconclusive;
  else
    report.verdict = TorsionVerdict::torsion_free;

  report.notes = "checked " + std::to_string(report.y_values_checked.size()) +
                 " candidate Y-values against disc = " + curve.discriminant.get_str();
  if (!set.exhaustive)
    report.notes += "; discriminant factorization incomplete (cofactor " +
                    set.disc_factorization.cofactor.get_str() + ")";
  switch (report.verdict) {
    case TorsionVerdict::torsion_free:
      report.notes += "; every candidate rejected, so no integral point is torsion";
      break;
    case TorsionVerdict::candidate_found:
      report.notes += "; at least one candidate survived";
      break;
    case TorsionVerdict::inconclusive:
      report.notes += "; no candidate survived but the set may be incomplete";
      break;
  }
  return report;
}

}  // namespace dioforge::curves
