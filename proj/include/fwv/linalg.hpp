/// Dense exact linear algebra on small matrices of rationals: solves,
/// determinants, kernels, rank, plus integer Hermite normal form.
/// Sizes here are tiny (ambient rank <= ~8), so plain Gaussian elimination
/// with exact pivots is the right tool.

#pragma once

#include "fwv/rational.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <optional>

namespace fwv {

using RatMat = std::vector<RatVec>;  // row-major

inline Rat dot(const RatVec& a, const RatVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RatVec add(const RatVec& a, const RatVec& b) {
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline RatVec sub(const RatVec& a, const RatVec& b) {
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline RatVec scale(const Rat& c, const RatVec& a) {
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline bool is_zero(const RatVec& a) {
  return std::all_of(a.begin(), a.end(), [](const Rat& x) { return x == 0; });
}

inline std::vector<double> to_doubles(const RatVec& a) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = to_double(a[i]);
  return r;
}

inline Rat det(RatMat m) {
  const std::size_t n = m.size();
  Rat d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return Rat(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Rat f = m[r][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return d;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(RatMat& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    Rat inv = Rat(1) / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rat f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(RatMat m) { return rref(m).size(); }

/// Basis of {x in R^cols : m x = 0}. An empty constraint set yields the
/// standard basis.
inline std::vector<RatVec> kernel_basis(RatMat m, std::size_t cols) {
  if (m.empty()) {
    std::vector<RatVec> basis;
    for (std::size_t i = 0; i < cols; ++i) {
      RatVec e(cols, Rat(0));
      e[i] = 1;
      basis.push_back(std::move(e));
    }
    return basis;
  }
  auto pivots = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<RatVec> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RatVec v(cols, Rat(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves the square system m x = b; nullopt when singular.
inline std::optional<RatVec> solve_square(RatMat m, RatVec b) {
  const std::size_t n = m.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      Rat f = m[r][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
      b[r] -= f * b[c];
    }
  }
  RatVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
  return x;
}

/// Scales a rational vector to a primitive integer vector (gcd 1).
/// Sign is preserved; use canonical_sign for orientation-free vectors.
inline RatVec primitive(const RatVec& v) {
  Int lcm = 1;
  for (const Rat& x : v) lcm = boost::multiprecision::lcm(lcm, rat_den(x));
  Int g = 0;
  std::vector<Int> ints(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    ints[i] = rat_num(v[i]) * (lcm / rat_den(v[i]));
    g = boost::multiprecision::gcd(g, ints[i]);
  }
  RatVec r(v.size(), Rat(0));
  if (g == 0) return r;
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rat(ints[i] / g);
  return r;
}

/// Flips sign so the first nonzero coordinate is positive.
inline RatVec canonical_sign(RatVec v) {
  for (const Rat& x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (Rat& y : v) y = -y;
    break;
  }
  return v;
}

inline bool lex_less(const RatVec& a, const RatVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

using IntMat = std::vector<std::vector<Int>>;

/// Integer row echelon form via unimodular row operations (swaps and adding
/// integer multiples of rows). Preserves the row lattice. Returns the pivot
/// entries in column order. Used for lattice-span tests.
inline std::vector<Int> integer_echelon_pivots(IntMat m) {
  std::vector<Int> pivots;
  if (m.empty()) return pivots;
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    while (true) {
      std::size_t p = m.size();
      for (std::size_t i = r; i < m.size(); ++i)
        if (m[i][c] != 0 && (p == m.size() || abs(m[i][c]) < abs(m[p][c]))) p = i;
      if (p == m.size()) break;  // column is zero below r
      std::swap(m[p], m[r]);
      bool cleared = true;
      for (std::size_t i = r + 1; i < m.size(); ++i) {
        if (m[i][c] == 0) continue;
        Int q = m[i][c] / m[r][c];
        for (std::size_t j = 0; j < cols; ++j) m[i][j] -= q * m[r][j];
        if (m[i][c] != 0) cleared = false;
      }
      if (cleared) {
        pivots.push_back(abs(m[r][c]));
        ++r;
        break;
      }
    }
  }
  return pivots;
}

/// True iff the rows of m span all of Z^cols as a lattice:
/// full rank and lattice index (product of echelon pivots) equal to 1.
inline bool spans_full_lattice(const IntMat& m) {
  if (m.empty()) return false;
  const std::size_t cols = m[0].size();
  auto pivots = integer_echelon_pivots(m);
  if (pivots.size() < cols) return false;
  Int index = 1;
  for (const Int& p : pivots) index *= p;
  return index == 1;
}

}  // namespace fwv
