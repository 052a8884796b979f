#pragma once

// Exact integer number theory on top of GMP: Jacobi symbols, perfect-square
// detection, primality, and budgeted factorization.  Everything here is
// deterministic: randomized steps (probable-prime bases, rho parameters) draw
// from an mt19937_64 stream seeded from the input value itself.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dioforge::intmath {

// Jacobi symbol (a/n) for odd positive n, via the binary algorithm
// (quadratic reciprocity + the supplementary laws for 2 and -1).
inline int jacobi_symbol(mpz_class a, mpz_class n) {
  if (n <= 0 || mpz_even_p(n.get_mpz_t()))
    throw std::invalid_argument("jacobi_symbol: modulus must be positive and odd");
  a %= n;
  if (a < 0) a += n;
  int result = 1;
  while (a != 0) {
    while (mpz_even_p(a.get_mpz_t())) {
      a >>= 1;
      const unsigned long n8 = mpz_fdiv_ui(n.get_mpz_t(), 8);
      if (n8 == 3 || n8 == 5) result = -result;
    }
    std::swap(a, n);
    if (mpz_fdiv_ui(a.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(n.get_mpz_t(), 4) == 3)
      result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

namespace detail {

// Square-residue table for one modulus, built once.
inline std::vector<bool> square_residues(unsigned m) {
  std::vector<bool> table(m, false);
  for (unsigned i = 0; i < m; ++i) table[static_cast<unsigned long>(i) * i % m] = true;
  return table;
}

inline std::uint64_t seed_from(const mpz_class& n) {
  // Fold the value into 64 bits; any fixed mixing works, it only has to be
  // reproducible for the same input.
  std::uint64_t h = mpz_fdiv_ui(n.get_mpz_t(), 0xFFFFFFFFFFFFFFC5ull);  // largest 64-bit prime
  h ^= static_cast<std::uint64_t>(mpz_sizeinbase(n.get_mpz_t(), 2)) << 32;
  h ^= h >> 33;
  h *= 0xFF51AFD7ED558CCDull;
  h ^= h >> 33;
  return h;
}

// One strong-pseudoprime round: returns true when `a` witnesses n composite.
// Expects n odd, n > 3, n - 1 = d * 2^s with d odd.
inline bool mr_witness(const mpz_class& n, const mpz_class& a, const mpz_class& d,
                       unsigned long s) {
  if (a % n == 0) return false;
  mpz_class x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return false;
  for (unsigned long i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n - 1) return false;
    if (x == 1) return true;
  }
  return true;
}

}  // namespace detail

// Perfect-square test: cheap residue filters (mod 64, 63, 65, 11 reject
// ~99.2% of non-squares) before one exact integer square root.
inline std::optional<mpz_class> is_perfect_square(const mpz_class& n) {
  if (n < 0) return std::nullopt;
  static const std::vector<bool> q64 = detail::square_residues(64);
  static const std::vector<bool> q63 = detail::square_residues(63);
  static const std::vector<bool> q65 = detail::square_residues(65);
  static const std::vector<bool> q11 = detail::square_residues(11);
  if (!q64[mpz_fdiv_ui(n.get_mpz_t(), 64)]) return std::nullopt;
  if (!q63[mpz_fdiv_ui(n.get_mpz_t(), 63)]) return std::nullopt;
  if (!q65[mpz_fdiv_ui(n.get_mpz_t(), 65)]) return std::nullopt;
  if (!q11[mpz_fdiv_ui(n.get_mpz_t(), 11)]) return std::nullopt;
  mpz_class root, rem;
  mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
  if (rem != 0) return std::nullopt;
  return root;
}

// Primality: deterministic Miller-Rabin below 2^64 (fixed witness set
// {2,...,37}, proven exact far beyond that range), strong probable-prime
// battery with `rounds` extra deterministic pseudo-random bases above.
inline bool is_prime(const mpz_class& n, int rounds = 40) {
  static constexpr std::array<unsigned, 12> kWitnesses = {2,  3,  5,  7,  11, 13,
                                                          17, 19, 23, 29, 31, 37};
  if (n < 2) return false;
  for (unsigned p : kWitnesses) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  mpz_class d = n - 1;
  const unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  d >>= s;
  for (unsigned w : kWitnesses)
    if (detail::mr_witness(n, mpz_class(w), d, s)) return false;
  if (mpz_fits_ulong_p(n.get_mpz_t())) return true;  // witness set is exact here
  std::mt19937_64 rng(detail::seed_from(n));
  const mpz_class span = n - 3;
  for (int i = 0; i < rounds; ++i) {
    const mpz_class a = 2 + mpz_class(static_cast<unsigned long>(rng())) % span;
    if (detail::mr_witness(n, a, d, s)) return false;
  }
  return true;
}

// Effort knobs for factorize(); defaults fit desk-scale runs.
struct FactorBudget {
  unsigned long trial_division_bound = 1'000'000;
  long long rho_iteration_cap = 1'000'000;
  int probable_prime_rounds = 40;
};

// Factorization result.  `complete == false` means the budget ran out and
// `cofactor` holds the remaining (composite, fully unfactored) part; the
// invariant  |n| == cofactor * prod(p^e)  always holds.
struct Factorization {
  std::vector<std::pair<mpz_class, unsigned>> factors;  // ascending primes
  mpz_class cofactor = 1;
  bool complete = true;

  mpz_class reassemble() const {
    mpz_class prod = cofactor;
    for (const auto& [p, e] : factors)
      for (unsigned i = 0; i < e; ++i) prod *= p;
    return prod;
  }
};

namespace detail {

// Brent-cycle Pollard rho with batched gcds.  Decrements `budget` per f-step;
// returns a nontrivial divisor of n, or 0 when the budget is exhausted.
inline mpz_class pollard_brent(const mpz_class& n, long long& budget, std::mt19937_64& rng) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  const mpz_class span = n - 1;
  while (budget > 0) {
    mpz_class y = 1 + mpz_class(static_cast<unsigned long>(rng())) % span;
    const mpz_class c = 1 + mpz_class(static_cast<unsigned long>(rng())) % span;
    mpz_class x, ys, q = 1, g = 1;
    unsigned long r = 1;
    constexpr unsigned long kBatch = 128;
    while (g == 1 && budget > 0) {
      x = y;
      for (unsigned long i = 0; i < r && budget > 0; ++i) {
        y = (y * y + c) % n;
        --budget;
      }
      for (unsigned long k = 0; k < r && g == 1 && budget > 0;) {
        ys = y;
        const unsigned long lim = std::min(kBatch, r - k);
        for (unsigned long i = 0; i < lim && budget > 0; ++i) {
          y = (y * y + c) % n;
          --budget;
          q = q * (x - y) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += lim;
      }
      r *= 2;
    }
    if (g == 1 || budget <= 0) return 0;
    if (g == n) {
      // Batch overshot: replay single steps from the saved position.
      g = 1;
      while (g == 1) {
        ys = (ys * ys + c) % n;
        mpz_class diff = x - ys;
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      }
      if (g == n) continue;  // cycle degenerate for this c; retry
    }
    return g;
  }
  return 0;
}

}  // namespace detail

// Trial division to the budget bound, then rho splitting under the shared
// iteration cap.  Sign of n is ignored; n must be nonzero.
inline Factorization factorize(const mpz_class& n_in, const FactorBudget& budget = {}) {
  if (n_in == 0) throw std::invalid_argument("factorize: n must be nonzero");
  Factorization out;
  mpz_class n = abs(n_in);
  if (n == 1) return out;

  std::vector<std::pair<mpz_class, unsigned>> found;
  auto record = [&found](const mpz_class& p, unsigned e = 1) {
    for (auto& [q, exp] : found)
      if (q == p) {
        exp += e;
        return;
      }
    found.emplace_back(p, e);
  };

  for (unsigned long p : {2ul, 3ul, 5ul}) {
    if (p > budget.trial_division_bound) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      n /= p;
      record(p);
    }
  }
  for (unsigned long p = 7, step = 4; p <= budget.trial_division_bound; p += step, step = 6 - step) {
    if (mpz_class(p) * p > n) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      n /= p;
      record(p);
    }
  }

  if (n > 1) {
    long long rho_budget = budget.rho_iteration_cap;
    std::mt19937_64 rng(detail::seed_from(n));
    std::vector<mpz_class> pending{n};
    while (!pending.empty()) {
      mpz_class m = pending.back();
      pending.pop_back();
      if (m == 1) continue;
      if (m < mpz_class(budget.trial_division_bound) * budget.trial_division_bound ||
          is_prime(m, budget.probable_prime_rounds)) {
        // Anything below bound^2 that survived trial division is prime.
        record(m);
        continue;
      }
      const mpz_class d = detail::pollard_brent(m, rho_budget, rng);
      if (d == 0 || d == m) {
        out.cofactor *= m;
        out.complete = false;
        continue;
      }
      pending.push_back(d);
      pending.push_back(m / d);
    }
  }

  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  out.factors = std::move(found);
  return out;
}

// Smallest prime factor of |n| lying in the given residue classes mod 12
// (classes must be coprime to 12).  Exact when factorization completes; if
// the budget runs out, a trial-range hit is still provably smallest (every
// hidden factor exceeds the trial bound), otherwise the answer is unknown
// and an exception is raised rather than guessing.
inline std::optional<mpz_class> prime_factor_in_classes(const mpz_class& n,
                                                        const std::vector<unsigned>& classes,
                                                        const FactorBudget& budget = {}) {
  if (abs(n) <= 1)
    throw std::invalid_argument("prime_factor_in_classes: |n| must exceed 1");
  if (classes.empty())
    throw std::invalid_argument("prime_factor_in_classes: classes must be nonempty");
  for (unsigned c : classes)
    if (c >= 12 || std::gcd(c, 12u) != 1)
      throw std::invalid_argument(
          "prime_factor_in_classes: classes must be residues mod 12 coprime to 12");

  const Factorization fac = factorize(n, budget);
  for (const auto& [p, e] : fac.factors) {  // ascending
    const unsigned long r = mpz_fdiv_ui(p.get_mpz_t(), 12);
    if (std::find(classes.begin(), classes.end(), r) != classes.end()) {
      if (fac.complete || p <= budget.trial_division_bound) return p;
      throw std::runtime_error(
          "prime_factor_in_classes: factorization budget exhausted before the "
          "smallest qualifying prime could be pinned down");
    }
  }
  if (!fac.complete)
    throw std::runtime_error(
        "prime_factor_in_classes: factorization budget exhausted with no qualifying "
        "prime among the known factors");
  return std::nullopt;
}

}  // namespace dioforge::intmath
