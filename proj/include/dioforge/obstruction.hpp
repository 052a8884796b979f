#pragma once

// Congruence obstruction certificates.  Substituting x = alpha reduces the
// equation to a binary form in (y, z):
//   F(y, z) = y^2 + z^2 + c1*y*z + c0,  c1 = -alpha,  c0 = b - a*alpha^d,
// and a certificate asserts that F has no root mod M for some modulus M.
// Verification is a pure O(M^2) enumeration that never consults the tag or
// witnesses; generation walks a fixed ladder of small moduli and then, for
// the two residue classes the ladder cannot settle, a prime factor of
// alpha - 2 (or (alpha - 2)/3) lying in a class where 3 is a non-residue.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dioforge/diophantine.hpp"
#include "dioforge/intmath.hpp"

namespace dioforge::obstruction {

enum class CaseTag {
  EvenMod4,                   // alpha even, killed mod 4
  Mod3,                       // alpha == 1 (mod 3), killed mod 3
  Mod36Ladder,                // other small-modulus rung of the ladder
  PrimeFactorOfAlphaMinus2,   // alpha == 9 (mod 12): p | alpha - 2, p == 5,7 (mod 12)
  PrimeFactorOfAlphaMinus2Over3,  // alpha == 17 (mod 36): p | (alpha - 2)/3
};

inline std::string to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::EvenMod4: return "EvenMod4";
    case CaseTag::Mod3: return "Mod3";
    case CaseTag::Mod36Ladder: return "Mod36Ladder";
    case CaseTag::PrimeFactorOfAlphaMinus2: return "PrimeFactorOfAlphaMinus2";
    case CaseTag::PrimeFactorOfAlphaMinus2Over3: return "PrimeFactorOfAlphaMinus2Over3";
  }
  throw std::logic_error("to_string(CaseTag): unknown tag");
}

inline std::optional<CaseTag> case_tag_from_string(const std::string& s) {
  if (s == "EvenMod4") return CaseTag::EvenMod4;
  if (s == "Mod3") return CaseTag::Mod3;
  if (s == "Mod36Ladder") return CaseTag::Mod36Ladder;
  if (s == "PrimeFactorOfAlphaMinus2") return CaseTag::PrimeFactorOfAlphaMinus2;
  if (s == "PrimeFactorOfAlphaMinus2Over3") return CaseTag::PrimeFactorOfAlphaMinus2Over3;
  return std::nullopt;
}

struct ObstructionCertificate {
  mpz_class alpha;
  mpz_class modulus;
  CaseTag case_tag;
  // Present exactly for the two prime cases.
  std::optional<mpz_class> prime_witness;
  std::optional<mpz_class> nonresidue_witness;  // 3^r mod prime_witness

  friend bool operator==(const ObstructionCertificate& p, const ObstructionCertificate& q) {
    return p.alpha == q.alpha && p.modulus == q.modulus && p.case_tag == q.case_tag &&
           p.prime_witness == q.prime_witness && p.nonresidue_witness == q.nonresidue_witness;
  }
};

// (c1, c0) with F(y, z) = y^2 + z^2 + c1*y*z + c0 after the x = alpha pin.
inline std::pair<mpz_class, mpz_class> reduced_form_coefficients(
    const diophantine::EquationParams& params, const mpz_class& alpha) {
  mpz_class ad;
  mpz_pow_ui(ad.get_mpz_t(), alpha.get_mpz_t(), static_cast<unsigned long>(params.d));
  return {mpz_class(-alpha), mpz_class(params.b - params.a * ad)};
}

// Independent checker: exhaustively tests all M^2 residue pairs.  It trusts
// nothing from generation -- tags and witnesses are metadata only.
inline bool verify_certificate(const diophantine::EquationParams& params,
                               const ObstructionCertificate& cert) {
  if (cert.modulus < 2) throw std::invalid_argument("verify_certificate: modulus must be >= 2");
  if (!cert.modulus.fits_ulong_p() || cert.modulus.get_ui() > (1ul << 31))
    throw std::invalid_argument("verify_certificate: modulus too large to enumerate");
  const std::uint64_t M = cert.modulus.get_ui();
  const auto [c1, c0] = reduced_form_coefficients(params, cert.alpha);
  const std::uint64_t c1m = mpz_fdiv_ui(c1.get_mpz_t(), static_cast<unsigned long>(M));
  const std::uint64_t c0m = mpz_fdiv_ui(c0.get_mpz_t(), static_cast<unsigned long>(M));
  for (std::uint64_t y = 0; y < M; ++y) {
    const std::uint64_t yy = (y * y) % M;
    for (std::uint64_t z = 0; z < M; ++z) {
      const std::uint64_t v = (yy + (z * z) % M + c1m * ((y * z) % M) % M + c0m) % M;
      if (v == 0) return false;  // root found: certificate is invalid
    }
  }
  return true;
}

// Generation failure carrying the list of strategies that were exhausted.
class GenerationError : public std::runtime_error {
 public:
  GenerationError(const std::string& message, std::vector<std::string> attempted)
      : std::runtime_error(message), attempted_(std::move(attempted)) {}
  const std::vector<std::string>& attempted() const { return attempted_; }

 private:
  std::vector<std::string> attempted_;
};

namespace detail {

inline CaseTag ladder_tag(unsigned long modulus, const mpz_class& alpha) {
  if (modulus == 4 && mpz_even_p(alpha.get_mpz_t())) return CaseTag::EvenMod4;
  if (modulus == 3) return CaseTag::Mod3;
  return CaseTag::Mod36Ladder;
}

}  // namespace detail

// Walk the modulus ladder {4, 3, 8, 9, 12, 36}; if no rung verifies, fall to
// the prime cases.  Every returned certificate has already been verified.
// For r > 1 the class alpha == 5 (mod 12) genuinely admits solutions at some
// x == 5 (mod 12), so generation refuses rather than search for a
// certificate that cannot exist uniformly.
inline ObstructionCertificate generate_certificate(const diophantine::EquationParams& params,
                                                   const mpz_class& alpha) {
  if (params.validation != diophantine::Validation::strict)
    throw std::invalid_argument(
        "generate_certificate: obstruction arguments require strict parameters");
  if (params.r > 1 && mpz_fdiv_ui(alpha.get_mpz_t(), 12) == 5)
    throw GenerationError(
        "generate_certificate: the class x == 5 (mod 12) is only obstructed for r = 1; "
        "for r = " + std::to_string(params.r) + " the family admits solutions there (alpha = " +
            alpha.get_str() + ")",
        {});

  std::vector<std::string> attempted;
  for (unsigned long M : {4ul, 3ul, 8ul, 9ul, 12ul, 36ul}) {
    ObstructionCertificate cert{alpha, mpz_class(M), detail::ladder_tag(M, alpha), std::nullopt,
                                std::nullopt};
    if (verify_certificate(params, cert)) return cert;
    attempted.push_back("modulus " + std::to_string(M));
  }

  // Prime dispatch.  For p | alpha - 2 the form reduces to
  //   F == (y - z)^2 - 3^r (mod p)   [since alpha == 2 and b - a*alpha^d ==
  //   b - a*2^d == -3^r mod p],
  // so any p == 5, 7 (mod 12) (where 3 is a quadratic non-residue and p > 3,
  // keeping 3^r a non-residue for odd r) gives an obstruction.
  const unsigned long a12 = mpz_fdiv_ui(alpha.get_mpz_t(), 12);
  std::optional<mpz_class> p;
  CaseTag tag = CaseTag::PrimeFactorOfAlphaMinus2;
  if (a12 == 9) {
    p = intmath::prime_factor_in_classes(mpz_class(alpha - 2), {5, 7});
    if (!p) attempted.push_back("prime factor of alpha - 2 in classes {5, 7} mod 12");
  } else if (mpz_fdiv_ui(alpha.get_mpz_t(), 36) == 17) {
    tag = CaseTag::PrimeFactorOfAlphaMinus2Over3;
    p = intmath::prime_factor_in_classes(mpz_class((alpha - 2) / 3), {5, 7});
    if (!p) attempted.push_back("prime factor of (alpha - 2)/3 in classes {5, 7} mod 12");
  } else {
    attempted.push_back("no prime case applies to alpha mod 36 = " +
                        std::to_string(mpz_fdiv_ui(alpha.get_mpz_t(), 36)));
  }
  if (p) {
    mpz_class w;
    mpz_class three(3);
    mpz_powm_ui(w.get_mpz_t(), three.get_mpz_t(), static_cast<unsigned long>(params.r),
                p->get_mpz_t());
    ObstructionCertificate cert{alpha, *p, tag, p, w};
    if (verify_certificate(params, cert)) return cert;
    attempted.push_back("prime witness " + p->get_str());
  }

  std::string msg = "generate_certificate: no certificate found for alpha = " + alpha.get_str() +
                    "; exhausted:";
  for (const auto& s : attempted) msg += " [" + s + "]";
  throw GenerationError(msg, std::move(attempted));
}

struct SweepFailure {
  mpz_class alpha;
  std::string message;
};

struct SweepSummary {
  long long certified = 0;
  std::vector<SweepFailure> failures;  // sorted by alpha
};

// Certify every alpha in [lo, hi].  Failures are collected, not thrown.
inline SweepSummary sweep(const diophantine::EquationParams& params, std::int64_t lo,
                          std::int64_t hi, unsigned worker_count = 0) {
  if (params.validation != diophantine::Validation::strict)
    throw std::invalid_argument("sweep: obstruction arguments require strict parameters");
  if (params.r != 1)
    throw std::invalid_argument(
        "sweep: a full sweep is only possible for r = 1 (for r > 1 the class x == 5 (mod 12) "
        "admits solutions; certify individual alpha with generate_certificate instead)");
  if (lo > hi) throw std::invalid_argument("sweep: empty range");

  const std::uint64_t total = static_cast<std::uint64_t>(hi - lo) + 1;
  const unsigned workers = std::min<std::uint64_t>(diophantine::detail::resolve_workers(worker_count), total);
  std::vector<SweepSummary> partial(workers);
  std::vector<std::thread> pool;
  const std::uint64_t per = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::int64_t block_lo = lo + static_cast<std::int64_t>(w * per);
    const std::int64_t block_hi =
        std::min<std::int64_t>(hi, block_lo + static_cast<std::int64_t>(per) - 1);
    if (block_lo > hi) continue;
    pool.emplace_back([&, block_lo, block_hi, w] {
      for (std::int64_t v = block_lo; v <= block_hi; ++v) {
        const mpz_class alpha(static_cast<long>(v));
        try {
          ObstructionCertificate cert = generate_certificate(params, alpha);
          if (!verify_certificate(params, cert))
            throw std::logic_error("sweep: generated certificate failed verification");
          ++partial[w].certified;
        } catch (const std::exception& e) {
          partial[w].failures.push_back(SweepFailure{alpha, e.what()});
        }
      }
    });
  }
  for (auto& t : pool) t.join();

  SweepSummary out;
  for (auto& block : partial) {
    out.certified += block.certified;
    out.failures.insert(out.failures.end(), std::make_move_iterator(block.failures.begin()),
                        std::make_move_iterator(block.failures.end()));
  }
  std::sort(out.failures.begin(), out.failures.end(),
            [](const SweepFailure& p, const SweepFailure& q) { return p.alpha < q.alpha; });
  return out;
}

// Diagnostic helper: does the full three-variable congruence
//   a*x^d - y^2 - z^2 + x*y*z - b == 0 (mod M)
// have any root?  O(M^3); the cap keeps accidental quadratic-size moduli out.
inline bool local_solvability(const diophantine::EquationParams& params, unsigned long modulus,
                              unsigned long cap = 210) {
  if (modulus < 2) throw std::invalid_argument("local_solvability: modulus must be >= 2");
  if (modulus > cap)
    throw std::invalid_argument("local_solvability: modulus exceeds enumeration cap");
  const std::uint64_t M = modulus;
  const std::uint64_t am = mpz_fdiv_ui(params.a.get_mpz_t(), modulus);
  const std::uint64_t bm = mpz_fdiv_ui(params.b.get_mpz_t(), modulus);
  for (std::uint64_t x = 0; x < M; ++x) {
    std::uint64_t xd = 1 % M;
    for (int i = 0; i < params.d; ++i) xd = (xd * x) % M;
    const std::uint64_t t0 = (am * xd % M + M - bm % M) % M;
    for (std::uint64_t y = 0; y < M; ++y) {
      const std::uint64_t xy = (x * y) % M;
      const std::uint64_t yy = (y * y) % M;
      for (std::uint64_t z = 0; z < M; ++z) {
        const std::uint64_t v =
            (t0 + xy * z % M + 2 * M * M - yy - (z * z) % M) % M;
        if (v == 0) return true;
      }
    }
  }
  return false;
}

}  // namespace dioforge::obstruction
