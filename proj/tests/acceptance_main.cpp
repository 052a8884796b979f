// Acceptance harness: end-to-end checks of the shipped behavior, one
// [PASS]/[FAIL] line per criterion, nonzero exit if anything fails.  These
// deliberately re-derive expectations through independent routes (brute-force
// loops, classical formulas, a second resultant algorithm) rather than
// trusting the code paths under test.

#include <gmpxx.h>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dioforge/cli.hpp"
#include "dioforge/curves.hpp"
#include "dioforge/diophantine.hpp"
#include "dioforge/intmath.hpp"
#include "dioforge/obstruction.hpp"
#include "dioforge/polynomial.hpp"

using namespace dioforge;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& info) {
    if (detail.empty()) detail = info;
  }
};

// ---------------------------------------------------------------------------
// 1. The built-in reference table re-derives: verified rows, the erratum, and
//    the derived b values.
// ---------------------------------------------------------------------------
Outcome criterion_reference_table() {
  Outcome res;
  std::ostringstream out, err;
  const int code = cli::run({"table"}, out, err);
  if (code != 0) {
    res.fail("table exited " + std::to_string(code));
    return res;
  }
  const json rows = json::parse(out.str());
  if (rows.size() != 8) {
    res.fail("expected 8 rows, got " + std::to_string(rows.size()));
    return res;
  }
  const std::vector<std::string> expect_b = {"-19", "-235", "-2179", "-19675",
                                             "77",  "-139", "-2083", "173"};
  int verified = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row["b"] != expect_b[i])
      res.fail("row " + std::to_string(i) + ": b = " + row["b"].get<std::string>() +
               ", expected " + expect_b[i]);
    const std::string status = row["status"].get<std::string>();
    if (status == "verified") {
      ++verified;
      if (row["residual"] != "0") res.fail("verified row with nonzero residual");
      if (row.contains("search_confirmed") && row["search_confirmed"] != true)
        res.fail("verified claim not re-found by search");
    }
  }
  if (verified != 6) res.fail("expected 6 verified rows, got " + std::to_string(verified));
  const auto& erratum = rows[7];  // (25, 3, 3)
  if (erratum["status"] != "erratum" || erratum["residual"] != "1188")
    res.fail("(25,3,3) row must be an erratum with residual 1188");
  if (rows[6]["status"] != "open" && rows[6]["status"] != "resolved")
    res.fail("(13,3,7) row must be open or resolved, got " +
             rows[6]["status"].get<std::string>());
  res.note("8 rows, 6 verified, erratum residual 1188, (13,3,7) " +
           rows[6]["status"].get<std::string>());
  return res;
}

// ---------------------------------------------------------------------------
// 2. Desk check: the four r = 1 parameter sets have no solutions in the
//    standard window |x| <= 200, |z| <= 2000.
// ---------------------------------------------------------------------------
Outcome criterion_desk_check() {
  Outcome res;
  long long cells = 0;
  for (const auto& [a, d] : std::vector<std::pair<long, int>>{{1, 3}, {13, 3}, {25, 3}, {1, 9}}) {
    const auto params = diophantine::make_params(a, d, 1);
    diophantine::SearchConfig cfg;  // defaults: x in [-200,200], z in [-2000,2000], sieve on
    const auto found = diophantine::search(params, cfg);
    if (!found.empty())
      res.fail("a=" + std::to_string(a) + ", d=" + std::to_string(d) + ": found " +
               std::to_string(found.size()) + " solution(s)");
    cells += 34LL * 4001LL;  // 34 admissible x columns after the sieve
  }
  // Unsieved spot check on one set: the sieve must not be load-bearing.
  {
    const auto params = diophantine::make_params(1, 3, 1);
    diophantine::SearchConfig cfg;
    cfg.sieve_enabled = false;
    if (!diophantine::search(params, cfg).empty())
      res.fail("(1,3,1) unsieved search found a solution");
    cells += 401LL * 4001LL;
  }
  res.note("4 sieved windows + 1 unsieved window empty (" + std::to_string(cells) + " cells)");
  return res;
}

// ---------------------------------------------------------------------------
// 3. Obstruction sweeps: every x-value in [-1000, 1000] carries a verified
//    certificate for (1,3,1) and (13,3,1); even alpha lands in the mod-4 case.
// ---------------------------------------------------------------------------
Outcome criterion_obstruction_sweeps() {
  Outcome res;
  for (long a : {1L, 13L}) {
    const auto params = diophantine::make_params(a, 3, 1);
    const auto summary = obstruction::sweep(params, -1000, 1000, 2);
    if (summary.certified != 2001 || !summary.failures.empty())
      res.fail("a=" + std::to_string(a) + ": certified=" + std::to_string(summary.certified) +
               ", failures=" + std::to_string(summary.failures.size()));
  }
  const auto params = diophantine::make_params(1, 3, 1);
  for (long alpha = -1000; alpha <= 1000; alpha += 2) {
    const auto cert = obstruction::generate_certificate(params, alpha);
    if (cert.modulus != 4 || cert.case_tag != obstruction::CaseTag::EvenMod4) {
      res.fail("even alpha=" + std::to_string(alpha) + " not certified mod 4");
      break;
    }
  }
  res.note("2 x 2001 alphas certified and verified; even alphas all mod 4");
  return res;
}

// ---------------------------------------------------------------------------
// 4. Number-theory kernel vs. first principles: jacobi(3, p) = 1 exactly for
//    p == +-1 (mod 12), and the Jacobi symbol matches brute-force quadratic
//    residues for every odd prime p < 500.
// ---------------------------------------------------------------------------
Outcome criterion_jacobi() {
  Outcome res;
  int primes = 0;
  for (long p = 5; p < 10000; p += 2) {
    if (!intmath::is_prime(mpz_class(p))) continue;
    ++primes;
    const int sym = intmath::jacobi_symbol(mpz_class(3), mpz_class(p));
    const long m = p % 12;
    const int expect = (m == 1 || m == 11) ? 1 : (p == 3 ? 0 : -1);
    if (sym != expect) {
      res.fail("jacobi(3," + std::to_string(p) + ") = " + std::to_string(sym));
      break;
    }
  }
  for (long p = 3; p < 500; p += 2) {
    if (!intmath::is_prime(mpz_class(p))) continue;
    std::vector<bool> is_qr(static_cast<std::size_t>(p), false);
    for (long t = 0; t < p; ++t) is_qr[static_cast<std::size_t>((t * t) % p)] = true;
    for (long x = 0; x < p; ++x) {
      const int sym = intmath::jacobi_symbol(mpz_class(x), mpz_class(p));
      const int expect = (x % p == 0) ? 0 : (is_qr[static_cast<std::size_t>(x)] ? 1 : -1);
      if (sym != expect) {
        res.fail("jacobi(" + std::to_string(x) + "," + std::to_string(p) + ") = " +
                 std::to_string(sym) + ", brute force says " + std::to_string(expect));
        return res;
      }
    }
  }
  res.note(std::to_string(primes) + " primes < 10^4 against the mod-12 law; all p < 500 brute-forced");
  return res;
}

// ---------------------------------------------------------------------------
// 5. Polynomial engines against classical formulas and against each other.
// ---------------------------------------------------------------------------
Outcome criterion_polynomial_engines() {
  Outcome res;
  std::mt19937_64 rng(987654321);
  std::uniform_int_distribution<long> coeff(-50, 50);

  for (int i = 0; i < 100; ++i) {
    const long p = coeff(rng), q = coeff(rng);
    const poly::IntPolynomial f({q, p, 0, 1});  // X^3 + pX + q
    const mpz_class expect = mpz_class(-4) * p * p * p - mpz_class(27) * q * q;
    if (poly::discriminant(f) != expect) {
      res.fail("disc(X^3 + " + std::to_string(p) + "X + " + std::to_string(q) + ") mismatch");
      break;
    }
  }
  if (poly::discriminant(poly::IntPolynomial({0, -1, 0, 1})) != 4)
    res.fail("disc(X^3 - X) != 4");

  auto random_poly = [&](int max_deg) {
    std::uniform_int_distribution<int> deg(1, max_deg);
    const int n = deg(rng);
    std::vector<mpz_class> c(static_cast<std::size_t>(n) + 1);
    for (auto& v : c) v = coeff(rng);
    if (c.back() == 0) c.back() = 1;
    return poly::IntPolynomial(c);
  };
  for (int i = 0; i < 100; ++i) {
    const poly::IntPolynomial f = random_poly(9), g = random_poly(9);
    if (poly::resultant(f, g) != poly::resultant_sylvester(f, g)) {
      res.fail("resultant route disagreement at trial " + std::to_string(i));
      break;
    }
  }
  res.note("100 cubic discriminants vs formula; 100 resultants vs Sylvester/Bareiss");
  return res;
}

// ---------------------------------------------------------------------------
// 6. Frozen torsion fixture for the (1,3,1), m = 2 model.
// ---------------------------------------------------------------------------
Outcome criterion_torsion_fixture() {
  Outcome res;
  const auto curve = curves::build_curve(diophantine::make_params(1, 3, 1), 2);
  if (curve.f != poly::IntPolynomial({-9, 0, 1, 1})) res.fail("f != X^3 + X^2 - 9");
  if (curve.discriminant != -2151) res.fail("disc != -2151");
  const auto report = curves::check_torsion_free(curve);
  if (report.verdict != curves::TorsionVerdict::torsion_free) res.fail("verdict not torsion_free");
  if (!report.candidates.empty()) res.fail("unexpected candidates");
  if (report.y_values_checked != std::vector<mpz_class>{0, 1, -1, 3, -3})
    res.fail("y_values_checked mismatch");
  const auto& fs = report.disc_factorization.factors;
  if (fs.size() != 2 || fs[0] != std::pair<mpz_class, unsigned>(3, 2) ||
      fs[1] != std::pair<mpz_class, unsigned>(239, 1))
    res.fail("disc factorization != 3^2 * 239");
  res.note("Y^2 = X^3 + X^2 - 9: torsion_free, disc -2151 = -(3^2 * 239), 5 Y-values");
  return res;
}

// ---------------------------------------------------------------------------
// 7. Residual correspondence: for 500 random rational points on both parity
//    branches, scale * residual(mapped point) == -(Y^2 - f(X)) exactly.
// ---------------------------------------------------------------------------
Outcome criterion_residual_correspondence() {
  Outcome res;
  std::mt19937_64 rng(1234321);
  std::uniform_int_distribution<long> num(-80, 80);
  std::uniform_int_distribution<long> den(1, 12);
  const std::vector<curves::CurveModel> models = {
      curves::build_curve(diophantine::make_params(1, 3, 1), 2),
      curves::build_curve(diophantine::make_params(1, 3, 1), 1),
      curves::build_curve(diophantine::make_params(13, 3, 1), 6),
      curves::build_curve(diophantine::make_params(13, 3, 1), 5),
      curves::build_curve(diophantine::make_params(25, 3, 3), 4),
      curves::build_curve(diophantine::make_params(25, 3, 3), 3),
      curves::build_curve(diophantine::make_params(1, 9, 1), 2),
      curves::build_curve(diophantine::make_params(1, 9, 1), 3),
      curves::build_curve(diophantine::make_params(13, 3, 3), 102),
      curves::build_curve(diophantine::make_params(1, 3, 5), 7),
  };
  int checked = 0;
  for (const auto& curve : models) {
    const mpz_class scale = curves::residual_scale(curve);
    for (int i = 0; i < 50; ++i) {
      mpq_class X(num(rng), den(rng)), Y(num(rng), den(rng));
      X.canonicalize();
      Y.canonicalize();
      const auto t = curves::map_point_to_triple(curve, X, Y);
      const mpq_class lhs =
          mpq_class(scale) * diophantine::eval_residual(*curve.family, t[0], t[1], t[2]);
      const mpq_class rhs = -(Y * Y - curve.f.eval(X));
      if (lhs != rhs) {
        res.fail("identity failed on m=" + std::to_string(curve.m) + " branch " +
                 curves::to_string(curve.parity_branch));
        return res;
      }
      ++checked;
    }
  }
  res.note(std::to_string(checked) + " random rational points across 10 models, both branches");
  return res;
}

// ---------------------------------------------------------------------------
// 8. Oracle equivalence: naive triple loop == quadratic-solver search
//    (sieve off), and sieved == unsieved for strict parameters.
// ---------------------------------------------------------------------------
Outcome criterion_oracle_equivalence() {
  Outcome res;
  const long XB = 40, ZB = 40, YB = 400;
  const std::vector<diophantine::EquationParams> sets = {
      diophantine::make_params(1, 3, 1),
      diophantine::make_params(1, 3, 3),
      diophantine::make_params(13, 3, 1),
      diophantine::make_params(25, 3, 3),
      diophantine::make_params(13, 3, 2, diophantine::Validation::exploratory),
  };
  for (const auto& params : sets) {
    std::vector<diophantine::SolutionTriple> naive;
    for (long x = -XB; x <= XB; ++x) {
      for (long z = -ZB; z <= ZB; ++z)
        for (long y = -YB; y <= YB; ++y)
          if (diophantine::eval_residual(params, mpz_class(x), mpz_class(y), mpz_class(z)) == 0)
            naive.push_back({mpz_class(x), mpz_class(y), mpz_class(z)});
    }
    std::sort(naive.begin(), naive.end());

    diophantine::SearchConfig cfg;
    cfg.x_min = -XB;
    cfg.x_max = XB;
    cfg.z_min = -ZB;
    cfg.z_max = ZB;
    cfg.sieve_enabled = false;
    auto solved = diophantine::search(params, cfg);
    solved.erase(std::remove_if(solved.begin(), solved.end(),
                                [&](const auto& s) { return abs(s.y) > YB; }),
                 solved.end());
    if (solved != naive) {
      res.fail("naive/search mismatch for a=" + params.a.get_str() +
               ", r=" + std::to_string(params.r) + " (naive " + std::to_string(naive.size()) +
               ", search " + std::to_string(solved.size()) + ")");
      continue;
    }
    if (params.validation == diophantine::Validation::strict) {
      diophantine::SearchConfig sieved = cfg;
      sieved.sieve_enabled = true;
      if (diophantine::search(params, sieved) != diophantine::search(params, cfg))
        res.fail("sieved != unsieved for a=" + params.a.get_str() +
                 ", r=" + std::to_string(params.r));
    } else {
      const diophantine::SolutionTriple known{2, -10, -7};
      if (std::find(naive.begin(), naive.end(), known) == naive.end())
        res.fail("exploratory oracle missed (2, -10, -7)");
    }
  }
  res.note("5 parameter sets, |x|,|z| <= 40, |y| <= 400: naive == solver; sieve neutral");
  return res;
}

// ---------------------------------------------------------------------------
// 9. Scope statement (informational, always passes if we reach it).
// ---------------------------------------------------------------------------
Outcome criterion_scope() {
  Outcome res;
  res.note(
      "finite shadows only: the library's claims over all of Z rest on the verified "
      "per-alpha certificates; searches (2) and sweeps (3) cover bounded windows, and the "
      "torsion checker reproduces the small fixture exactly while degrading to "
      "'inconclusive' when factoring budgets run out");
  return res;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"reference-table", criterion_reference_table},
      {"desk-check-insolvability", criterion_desk_check},
      {"obstruction-sweeps", criterion_obstruction_sweeps},
      {"jacobi-first-principles", criterion_jacobi},
      {"polynomial-engines", criterion_polynomial_engines},
      {"torsion-fixture", criterion_torsion_fixture},
      {"residual-correspondence", criterion_residual_correspondence},
      {"oracle-equivalence", criterion_oracle_equivalence},
      {"scope-statement", criterion_scope},
  };

  bool all_ok = true;
  for (const auto& [name, fn] : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = fn();
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count() /
        1000.0;
    std::ostringstream line;
    line << (outcome.ok ? "[PASS] " : "[FAIL] ") << name << " (" << secs << "s)";
    if (!outcome.detail.empty()) line << ": " << outcome.detail;
    std::cout << line.str() << "\n";
    if (!outcome.ok) all_ok = false;
  }
  std::cout << (all_ok ? "acceptance: all criteria passed" : "acceptance: FAILURES above") << "\n";
  return all_ok ? 0 : 1;
}
