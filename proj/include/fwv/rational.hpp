/// Exact rational scalars used by all polyhedral computations.
///
/// Floating point enters only at the integration/optimization boundary;
/// everything combinatorial (duality, vertices, lattice membership) stays
/// in mpq_rational.

#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwv {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

/// Raised on malformed inputs (files, parameters, inconsistent data).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a requested quantity genuinely diverges (e.g. the exponential
/// integral for a direction on or outside the closed Reeb cone).
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

inline Int rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rat& q) { return q.convert_to<double>(); }

inline Int floor_rat(const Rat& q) {
  Int n = rat_num(q), d = rat_den(q);  // d > 0 canonically
  if (n >= 0) return n / d;
  return -((-n + d - 1) / d);
}

inline Int ceil_rat(const Rat& q) { return -floor_rat(-q); }

/// Parses "p", "-p", or "p/q" (q > 0 after normalization).
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int p(s.substr(0, slash));
    Int q(s.substr(slash + 1));
    if (q == 0) throw ValidationError("rational with zero denominator: " + s);
    return Rat(p) / Rat(q);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse rational: '" + s + "'");
  }
}

inline std::string rat_to_string(const Rat& q) {
  Int n = rat_num(q), d = rat_den(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

using RatVec = std::vector<Rat>;

inline RatVec rat_vec(std::initializer_list<long> xs) {
  RatVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

}  // namespace fwv
