#pragma once

// Line-oriented serialization.  Every record is one line of
//   <record-type> key=value key=value ...
// with values percent-escaped so that spaces, '=', '%', and newlines cannot
// break the framing.  Multi-line aggregates (torsion reports) are bracketed
// by begin/end record types.  The same format backs the resumable search
// cache: an append-only log of run/solution/progress/done records keyed by a
// digest of the semantic search inputs.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dioforge/curves.hpp"
#include "dioforge/diophantine.hpp"
#include "dioforge/intmath.hpp"
#include "dioforge/obstruction.hpp"
#include "dioforge/polynomial.hpp"

namespace dioforge::serialize {

// ---------------------------------------------------------------------------
// Escaping and line framing
// ---------------------------------------------------------------------------

inline std::string encode_value(std::string_view raw) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c == '%' || c == ' ' || c == '=' || c == '\n' || c == '\r') {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

inline std::string decode_value(std::string_view enc) {
  std::string out;
  out.reserve(enc.size());
  for (std::size_t i = 0; i < enc.size(); ++i) {
    if (enc[i] == '%') {
      if (i + 2 >= enc.size()) throw std::invalid_argument("decode_value: truncated escape");
      auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw std::invalid_argument("decode_value: bad hex digit in escape");
      };
      out.push_back(static_cast<char>(nib(enc[i + 1]) * 16 + nib(enc[i + 2])));
      i += 2;
    } else {
      out.push_back(enc[i]);
    }
  }
  return out;
}

struct Record {
  std::string type;
  std::vector<std::pair<std::string, std::string>> fields;  // decoded values

  std::optional<std::string> find(const std::string& key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return v;
    return std::nullopt;
  }
  std::string require(const std::string& key) const {
    if (auto v = find(key)) return *v;
    throw std::invalid_argument("record '" + type + "': missing field '" + key + "'");
  }
};

inline std::string format_record(const Record& rec) {
  std::string line = rec.type;
  for (const auto& [k, v] : rec.fields) line += " " + k + "=" + encode_value(v);
  return line;
}

inline Record parse_record(const std::string& line) {
  Record rec;
  std::istringstream in(line);
  std::string token;
  if (!(in >> rec.type)) throw std::invalid_argument("parse_record: empty line");
  while (in >> token) {
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("parse_record: token without '=': " + token);
    rec.fields.emplace_back(token.substr(0, eq), decode_value(token.substr(eq + 1)));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Small value codecs
// ---------------------------------------------------------------------------

namespace detail {

inline mpz_class to_mpz(const std::string& s) {
  try {
    return mpz_class(s);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("invalid integer literal: " + s);
  }
}

inline int to_int(const std::string& s) { return std::stoi(s); }

inline std::int64_t to_i64(const std::string& s) { return std::stoll(s); }

inline bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("invalid boolean literal: " + s);
}

inline std::string join_mpz(const std::vector<mpz_class>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i].get_str();
  }
  return out;
}

inline std::vector<mpz_class> split_mpz(const std::string& s) {
  std::vector<mpz_class> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string piece =
        comma == std::string::npos ? s.substr(pos) : s.substr(pos, comma - pos);
    out.push_back(to_mpz(piece));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

inline std::string encode_certificate(const obstruction::ObstructionCertificate& cert) {
  Record rec{"certificate", {}};
  rec.fields.emplace_back("alpha", cert.alpha.get_str());
  rec.fields.emplace_back("modulus", cert.modulus.get_str());
  rec.fields.emplace_back("case_tag", obstruction::to_string(cert.case_tag));
  if (cert.prime_witness) rec.fields.emplace_back("prime_witness", cert.prime_witness->get_str());
  if (cert.nonresidue_witness)
    rec.fields.emplace_back("nonresidue_witness", cert.nonresidue_witness->get_str());
  return format_record(rec);
}

inline obstruction::ObstructionCertificate decode_certificate(const std::string& line) {
  const Record rec = parse_record(line);
  if (rec.type != "certificate")
    throw std::invalid_argument("decode_certificate: record type is '" + rec.type + "'");
  obstruction::ObstructionCertificate cert;
  cert.alpha = detail::to_mpz(rec.require("alpha"));
  cert.modulus = detail::to_mpz(rec.require("modulus"));
  const std::string tag = rec.require("case_tag");
  const auto parsed = obstruction::case_tag_from_string(tag);
  if (!parsed) throw std::invalid_argument("decode_certificate: unknown case_tag '" + tag + "'");
  cert.case_tag = *parsed;
  if (auto v = rec.find("prime_witness")) cert.prime_witness = detail::to_mpz(*v);
  if (auto v = rec.find("nonresidue_witness")) cert.nonresidue_witness = detail::to_mpz(*v);
  return cert;
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

inline std::string encode_curve(const curves::CurveModel& curve) {
  Record rec{"curve", {}};
  if (curve.family) {
    const auto& p = *curve.family;
    rec.fields.emplace_back("a", p.a.get_str());
    rec.fields.emplace_back("d", std::to_string(p.d));
    rec.fields.emplace_back("r", std::to_string(p.r));
    rec.fields.emplace_back(
        "validation", p.validation == diophantine::Validation::strict ? "strict" : "exploratory");
    rec.fields.emplace_back("b", p.b.get_str());
    rec.fields.emplace_back("m", std::to_string(curve.m));
    rec.fields.emplace_back("parity_branch", curves::to_string(curve.parity_branch));
  } else {
    rec.fields.emplace_back("synthetic", "true");
  }
  rec.fields.emplace_back("genus", std::to_string(curve.genus));
  rec.fields.emplace_back("discriminant", curve.discriminant.get_str());
  rec.fields.emplace_back("squarefree", curve.squarefree ? "true" : "false");
  std::vector<mpz_class> coeffs;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(curve.f.degree()); ++i)
    coeffs.push_back(curve.f.coeff(i));
  rec.fields.emplace_back("f", detail::join_mpz(coeffs));
  return format_record(rec);
}

inline curves::CurveModel decode_curve(const std::string& line) {
  const Record rec = parse_record(line);
  if (rec.type != "curve")
    throw std::invalid_argument("decode_curve: record type is '" + rec.type + "'");
  curves::CurveModel curve;
  curve.f = poly::IntPolynomial(detail::split_mpz(rec.require("f")));
  curve.genus = detail::to_int(rec.require("genus"));
  curve.discriminant = detail::to_mpz(rec.require("discriminant"));
  curve.squarefree = detail::to_bool(rec.require("squarefree"));
  if (!rec.find("synthetic")) {
    curve.m = detail::to_int(rec.require("m"));
    const std::string branch = rec.require("parity_branch");
    if (branch != "even" && branch != "odd")
      throw std::invalid_argument("decode_curve: unknown parity_branch '" + branch + "'");
    curve.parity_branch =
        branch == "even" ? curves::ParityBranch::even : curves::ParityBranch::odd;
    const auto v = rec.require("validation");
    if (v != "strict" && v != "exploratory")
      throw std::invalid_argument("decode_curve: unknown validation '" + v + "'");
    curve.family = diophantine::make_params(
        detail::to_mpz(rec.require("a")), detail::to_int(rec.require("d")),
        detail::to_int(rec.require("r")),
        v == "strict" ? diophantine::Validation::strict : diophantine::Validation::exploratory);
    if (curve.family->b != detail::to_mpz(rec.require("b")))
      throw std::invalid_argument("decode_curve: recorded b disagrees with derived b");
  }
  // Integrity: the recorded discriminant must match the polynomial.
  if (poly::discriminant(curve.f) != curve.discriminant)
    throw std::invalid_argument("decode_curve: recorded discriminant disagrees with f");
  return curve;
}

// ---------------------------------------------------------------------------
// Factorizations (used inside torsion reports)
// ---------------------------------------------------------------------------

inline std::string encode_factorization_fields(const intmath::Factorization& fact) {
  std::string factors;
  for (std::size_t i = 0; i < fact.factors.size(); ++i) {
    if (i) factors += ",";
    factors += fact.factors[i].first.get_str() + "^" + std::to_string(fact.factors[i].second);
  }
  Record rec{"disc_factorization", {}};
  rec.fields.emplace_back("complete", fact.complete ? "true" : "false");
  rec.fields.emplace_back("cofactor", fact.cofactor.get_str());
  rec.fields.emplace_back("factors", factors);
  return format_record(rec);
}

inline intmath::Factorization decode_factorization_fields(const Record& rec) {
  intmath::Factorization fact;
  fact.complete = detail::to_bool(rec.require("complete"));
  fact.cofactor = detail::to_mpz(rec.require("cofactor"));
  const std::string factors = rec.require("factors");
  std::size_t pos = 0;
  while (pos < factors.size()) {
    const std::size_t comma = factors.find(',', pos);
    const std::string piece =
        comma == std::string::npos ? factors.substr(pos) : factors.substr(pos, comma - pos);
    const std::size_t caret = piece.find('^');
    if (caret == std::string::npos)
      throw std::invalid_argument("decode_factorization: factor without exponent: " + piece);
    fact.factors.emplace_back(detail::to_mpz(piece.substr(0, caret)),
                              static_cast<unsigned>(detail::to_int(piece.substr(caret + 1))));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return fact;
}

// ---------------------------------------------------------------------------
// Torsion reports (multi-line block)
// ---------------------------------------------------------------------------

inline std::string encode_torsion_report(const curves::TorsionReport& report) {
  std::string out;
  {
    Record rec{"torsion_report", {}};
    rec.fields.emplace_back("verdict", curves::to_string(report.verdict));
    rec.fields.emplace_back("notes", report.notes);
    out += format_record(rec) + "\n";
  }
  {
    Record rec{"y_values", {}};
    rec.fields.emplace_back("values", detail::join_mpz(report.y_values_checked));
    out += format_record(rec) + "\n";
  }
  out += encode_factorization_fields(report.disc_factorization) + "\n";
  for (const auto& cand : report.candidates) {
    Record rec{"candidate", {}};
    rec.fields.emplace_back("X", cand.X.get_str());
    rec.fields.emplace_back("Y", cand.Y.get_str());
    rec.fields.emplace_back("x", cand.mapped[0].get_str());
    rec.fields.emplace_back("y", cand.mapped[1].get_str());
    rec.fields.emplace_back("z", cand.mapped[2].get_str());
    rec.fields.emplace_back("integral", cand.integral ? "true" : "false");
    rec.fields.emplace_back("disposition", cand.disposition);
    out += format_record(rec) + "\n";
  }
  out += "end_torsion_report\n";
  return out;
}

inline curves::TorsionReport decode_torsion_report(const std::string& block) {
  std::istringstream in(block);
  std::string line;
  curves::TorsionReport report;
  bool saw_header = false, saw_end = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Record rec = parse_record(line);
    if (rec.type == "torsion_report") {
      saw_header = true;
      const std::string v = rec.require("verdict");
      if (v == "torsion_free")
        report.verdict = curves::TorsionVerdict::torsion_free;
      else if (v == "candidate_found")
        report.verdict = curves::TorsionVerdict::candidate_found;
      else if (v == "inconclusive")
        report.verdict = curves::TorsionVerdict::inconclusive;
      else
        throw std::invalid_argument("decode_torsion_report: unknown verdict '" + v + "'");
      report.notes = rec.require("notes");
    } else if (rec.type == "y_values") {
      report.y_values_checked = detail::split_mpz(rec.require("values"));
    } else if (rec.type == "disc_factorization") {
      report.disc_factorization = decode_factorization_fields(rec);
    } else if (rec.type == "candidate") {
      curves::CandidateRecord cand;
      cand.X = detail::to_mpz(rec.require("X"));
      cand.Y = detail::to_mpz(rec.require("Y"));
      cand.mapped = {mpq_class(rec.require("x")), mpq_class(rec.require("y")),
                     mpq_class(rec.require("z"))};
      for (auto& q : cand.mapped) q.canonicalize();
      cand.integral = detail::to_bool(rec.require("integral"));
      cand.disposition = rec.require("disposition");
      report.candidates.push_back(std::move(cand));
    } else if (rec.type == "end_torsion_report") {
      saw_end = true;
      break;
    } else {
      throw std::invalid_argument("decode_torsion_report: unexpected record '" + rec.type + "'");
    }
  }
  if (!saw_header || !saw_end)
    throw std::invalid_argument("decode_torsion_report: missing header or end marker");
  return report;
}

// ---------------------------------------------------------------------------
// Search cache
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Digest over the semantic inputs only: parameters, ranges, sieve setting.
// Worker count and output format deliberately do not participate, so a
// cached run is replayed regardless of those knobs.
inline std::string search_digest(const diophantine::EquationParams& params,
                                 const diophantine::SearchConfig& cfg) {
  std::string key = "search|a=" + params.a.get_str() + "|d=" + std::to_string(params.d) +
                    "|r=" + std::to_string(params.r) +
                    "|validation=" +
                    (params.validation == diophantine::Validation::strict ? "strict"
                                                                          : "exploratory") +
                    "|x=[" + std::to_string(cfg.x_min) + "," + std::to_string(cfg.x_max) + "]" +
                    "|z=[" + std::to_string(cfg.z_min) + "," + std::to_string(cfg.z_max) + "]" +
                    "|sieve=" + (cfg.sieve_enabled ? "on" : "off");
  const std::uint64_t h = fnv1a(key);
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[15 - i] = hex[(h >> (4 * i)) & 15];
  return out;
}

struct CachedSearch {
  bool complete = false;
  bool has_watermark = false;
  std::int64_t watermark = 0;  // highest x column fully processed
  std::vector<diophantine::SolutionTriple> solutions;
};

// Scan an append-only cache stream for the given digest.  Later runs of the
// same digest supersede earlier ones only by extending them (the log is
// append-only), so a single forward pass accumulating the union is correct;
// duplicate solution records are collapsed.
inline CachedSearch load_search_cache(std::istream& in, const std::string& digest) {
  CachedSearch out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Record rec;
    try {
      rec = parse_record(line);
    } catch (const std::invalid_argument&) {
      continue;  // tolerate unrelated garbage in shared cache files
    }
    const auto dig = rec.find("digest");
    if (!dig || *dig != digest) continue;
    if (rec.type == "solution") {
      out.solutions.push_back(diophantine::SolutionTriple{
          detail::to_mpz(rec.require("x")), detail::to_mpz(rec.require("y")),
          detail::to_mpz(rec.require("z"))});
    } else if (rec.type == "progress") {
      const std::int64_t x = detail::to_i64(rec.require("x_done"));
      if (!out.has_watermark || x > out.watermark) out.watermark = x;
      out.has_watermark = true;
    } else if (rec.type == "done") {
      out.complete = true;
    }
  }
  std::sort(out.solutions.begin(), out.solutions.end());
  out.solutions.erase(std::unique(out.solutions.begin(), out.solutions.end()),
                      out.solutions.end());
  return out;
}

inline std::string encode_run_header(const std::string& digest,
                                     const diophantine::EquationParams& params,
                                     const diophantine::SearchConfig& cfg,
                                     const std::string& timestamp = {}) {
  Record rec{"run", {}};
  rec.fields.emplace_back("digest", digest);
  if (!timestamp.empty()) rec.fields.emplace_back("timestamp", timestamp);
  rec.fields.emplace_back("command", "search");
  rec.fields.emplace_back("a", params.a.get_str());
  rec.fields.emplace_back("d", std::to_string(params.d));
  rec.fields.emplace_back("r", std::to_string(params.r));
  rec.fields.emplace_back(
      "validation", params.validation == diophantine::Validation::strict ? "strict" : "exploratory");
  rec.fields.emplace_back("x_min", std::to_string(cfg.x_min));
  rec.fields.emplace_back("x_max", std::to_string(cfg.x_max));
  rec.fields.emplace_back("z_min", std::to_string(cfg.z_min));
  rec.fields.emplace_back("z_max", std::to_string(cfg.z_max));
  rec.fields.emplace_back("sieve", cfg.sieve_enabled ? "on" : "off");
  return format_record(rec);
}

inline std::string encode_solution_record(const std::string& digest,
                                          const diophantine::SolutionTriple& sol) {
  Record rec{"solution", {}};
  rec.fields.emplace_back("digest", digest);
  rec.fields.emplace_back("x", sol.x.get_str());
  rec.fields.emplace_back("y", sol.y.get_str());
  rec.fields.emplace_back("z", sol.z.get_str());
  return format_record(rec);
}

inline std::string encode_progress_record(const std::string& digest, std::int64_t x_done) {
  Record rec{"progress", {}};
  rec.fields.emplace_back("digest", digest);
  rec.fields.emplace_back("x_done", std::to_string(x_done));
  return format_record(rec);
}

inline std::string encode_done_record(const std::string& digest, std::size_t count) {
  Record rec{"done", {}};
  rec.fields.emplace_back("digest", digest);
  rec.fields.emplace_back("count", std::to_string(count));
  return format_record(rec);
}

}  // namespace dioforge::serialize
