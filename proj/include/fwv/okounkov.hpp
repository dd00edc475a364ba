/// Desk-scale Okounkov-body engine: saturates finitely generated
/// sub-semigroups of N^{n+1} level by level, checks the three conditions of
/// the growth theorem, and compares #Gamma_m / m^n against the Euclidean
/// volume of the body (the convex hull of Gamma_m / m at the top level).

#pragma once

#include "fwv/polyhedra.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace fwv {

struct Semigroup {
  std::vector<std::vector<std::int64_t>> generators;  // in N^{n+1}, last coord = level
  std::size_t rank = 0;                               // n + 1

  Semigroup(std::vector<std::vector<std::int64_t>> gens, std::size_t rank_in)
      : generators(std::move(gens)), rank(rank_in) {
    if (rank < 2) throw ValidationError("semigroup rank must be at least 2");
    for (const auto& g : generators) {
      if (g.size() != rank) throw ValidationError("semigroup generator of wrong rank");
      bool zero = true;
      for (auto c : g) {
        if (c < 0) throw ValidationError("semigroup generators must be nonnegative");
        if (c != 0) zero = false;
      }
      if (zero) throw ValidationError("zero vector is not a semigroup generator");
    }
  }

  std::size_t spatial_rank() const { return rank - 1; }
};

using LevelSets = std::map<long, std::set<std::vector<std::int64_t>>>;

/// Level-synchronous additive closure up to level m_max with all spatial
/// coordinates capped by coord_budget. Exact when the semigroup satisfies a
/// linear coordinate bound N with N * m_max <= coord_budget.
inline LevelSets saturate(const Semigroup& s, long m_max, std::int64_t coord_budget) {
  if (m_max < 0 || coord_budget <= 0) throw ValidationError("saturation budgets must be positive");
  const std::size_t n = s.spatial_rank();

  auto within_budget = [&](const std::vector<std::int64_t>& x) {
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] > coord_budget) return false;
    return true;
  };

  std::vector<const std::vector<std::int64_t>*> level0_gens, positive_gens;
  for (const auto& g : s.generators)
    (g[n] == 0 ? level0_gens : positive_gens).push_back(&g);

  LevelSets levels;
  auto close_level = [&](long m) {
    // Absorb level-0 generators within the budget (frontier expansion).
    auto& set = levels[m];
    std::vector<std::vector<std::int64_t>> frontier(set.begin(), set.end());
    while (!frontier.empty()) {
      std::vector<std::vector<std::int64_t>> next;
      for (const auto& x : frontier)
        for (const auto* g : level0_gens) {
          auto y = x;
          bool overflow = false;
          for (std::size_t i = 0; i < n; ++i) {
            y[i] += (*g)[i];
            if (y[i] > coord_budget) overflow = true;
          }
          if (overflow) {
            throw ValidationError("saturation coordinate budget overflowed at level " +
                                  std::to_string(m));
          }
          if (set.insert(y).second) next.push_back(std::move(y));
        }
      frontier = std::move(next);
    }
  };

  levels[0].insert(std::vector<std::int64_t>(n, 0));
  close_level(0);
  for (long m = 1; m <= m_max; ++m) {
    auto& set = levels[m];
    for (const auto* g : positive_gens) {
      const long src = m - (*g)[n];
      if (src < 0) continue;
      for (const auto& x : levels[src]) {
        std::vector<std::int64_t> y(n);
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
          y[i] = x[i] + (*g)[i];
          if (y[i] > coord_budget) ok = false;
        }
        if (!ok)
          throw ValidationError("saturation coordinate budget overflowed at level " +
                                std::to_string(m));
        if (ok) set.insert(std::move(y));
      }
    }
    close_level(m);
  }
  return levels;
}

struct SemigroupConditions {
  bool c1 = false;  // Gamma_0 = {0}
  bool c2 = false;  // linear coordinate bound fitted on saturated data
  bool c3 = false;  // generators span Z^{n+1} as a lattice
};

/// Condition (2) is verified empirically: fit the bound on the first half of
/// the saturated levels, then require it on the rest. Condition (3) uses
/// integer row reduction of the generators (the group generated by a
/// semigroup is the integer span of its generators).
inline SemigroupConditions check_conditions(const Semigroup& s, long m_max,
                                            std::int64_t coord_budget = 1 << 20) {
  SemigroupConditions out;
  LevelSets levels;
  bool saturated = true;
  try {
    levels = saturate(s, m_max, coord_budget);
  } catch (const ValidationError&) {
    saturated = false;
  }
  if (saturated) {
    const auto& level0 = levels.at(0);
    out.c1 = level0.size() == 1 && is_zero_vector(*level0.begin());

    std::int64_t fitted_n = 0;
    for (long m = 1; m <= m_max / 2; ++m)
      for (const auto& x : levels.at(m))
        for (auto c : x) fitted_n = std::max(fitted_n, (c + m - 1) / m);
    out.c2 = true;
    for (long m = 1; m <= m_max; ++m)
      for (const auto& x : levels.at(m))
        for (auto c : x)
          if (c > fitted_n * m) out.c2 = false;
  }

  IntMat gens;
  for (const auto& g : s.generators) {
    std::vector<Int> row;
    for (auto c : g) row.emplace_back(c);
    gens.push_back(std::move(row));
  }
  out.c3 = spans_full_lattice(gens);
  return out;
}

inline bool is_zero_vector(const std::vector<std::int64_t>& x) {
  return std::all_of(x.begin(), x.end(), [](std::int64_t c) { return c == 0; });
}

struct GrowthReport {
  std::vector<double> growth;  // #Gamma_m / m^n for m = 1..m_max
  Polyhedron body;
  Rat body_volume_exact;
  double body_volume = 0.0;
};

namespace detail {

/// Halfspace description of the convex hull of a finite point set.
/// Rank 1 and 2 are exact and fast; higher ranks use facet enumeration over
/// candidate subsets and are guarded against combinatorial blowup.
inline std::vector<HalfSpace> convex_hull_halfspaces(const std::vector<RatVec>& pts,
                                                     std::size_t n) {
  if (pts.empty()) throw ValidationError("convex hull of an empty point set");
  if (n == 1) {
    Rat lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return {HalfSpace(rat_vec({1}), lo), HalfSpace(rat_vec({-1}), -hi)};
  }
  if (n == 2) {
    // Monotone chain.
    std::vector<RatVec> sorted = pts;
    std::sort(sorted.begin(), sorted.end(), lex_less);
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    auto cross = [](const RatVec& o, const RatVec& a, const RatVec& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<RatVec> hull;
    for (int pass = 0; pass < 2; ++pass) {
      const std::size_t base = hull.size();
      auto scan = [&](const RatVec& p) {
        while (hull.size() >= base + 2 &&
               cross(hull[hull.size() - 2], hull[hull.size() - 1], p) <= 0)
          hull.pop_back();
        hull.push_back(p);
      };
      if (pass == 0)
        for (const auto& p : sorted) scan(p);
      else
        for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) scan(*it);
      hull.pop_back();
    }
    if (hull.size() == 1)
      return {HalfSpace(rat_vec({1, 0}), hull[0][0]), HalfSpace(rat_vec({-1, 0}), -hull[0][0]),
              HalfSpace(rat_vec({0, 1}), hull[0][1]), HalfSpace(rat_vec({0, -1}), -hull[0][1])};
    std::vector<HalfSpace> hs;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const RatVec& a = hull[i];
      const RatVec& b = hull[(i + 1) % hull.size()];
      // Inward normal of edge a->b for a counterclockwise hull.
      RatVec normal{-(b[1] - a[1]), b[0] - a[0]};
      if (is_zero(normal)) continue;
      hs.emplace_back(normal, dot(normal, a));
    }
    if (hull.size() == 2) {  // segment: close it from both sides
      const RatVec& a = hull[0];
      const RatVec& b = hull[1];
      RatVec d = sub(b, a);
      hs.emplace_back(d, dot(d, a));
      RatVec nd = scale(Rat(-1), d);
      hs.emplace_back(nd, dot(nd, b));
    }
    return hs;
  }

  // General rank: candidate facets through n affinely independent points.
  if (pts.size() > 60)
    throw ValidationError("convex hull at rank > 2 is limited to 60 points");
  std::vector<HalfSpace> hs;
  std::vector<std::size_t> idx(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == n) {
      RatMat rows;
      for (std::size_t j = 1; j < n; ++j) rows.push_back(sub(pts[idx[j]], pts[idx[0]]));
      auto normal_basis = kernel_basis(rows, n);
      if (normal_basis.size() != 1) return;
      RatVec normal = primitive(normal_basis[0]);
      Rat offset = dot(normal, pts[idx[0]]);
      bool above = false, below = false;
      for (const auto& p : pts) {
        Rat v = dot(normal, p);
        if (v > offset) above = true;
        if (v < offset) below = true;
      }
      if (!above)
        hs.emplace_back(scale(Rat(-1), normal), -offset);
      else if (!below)
        hs.emplace_back(normal, offset);
      return;
    }
    for (std::size_t i = start; i + (n - pos) <= pts.size(); ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  if (hs.empty()) throw ValidationError("degenerate point set has no full-dimensional hull");
  return hs;
}

}  // namespace detail

/// Growth sequence #Gamma_m/m^n, the Okounkov body (convex hull of
/// Gamma_{m_max}/m_max), and its Euclidean volume. Refuses when the three
/// conditions fail.
inline GrowthReport growth_and_body(const Semigroup& s, long m_max,
                                    std::int64_t coord_budget = 1 << 20) {
  auto conditions = check_conditions(s, m_max, coord_budget);
  if (!conditions.c1 || !conditions.c2 || !conditions.c3) {
    std::string diag = "semigroup conditions fail:";
    if (!conditions.c1) diag += " level-0 set is not {0};";
    if (!conditions.c2) diag += " no linear coordinate bound;";
    if (!conditions.c3) diag += " generators do not span Z^(n+1);";
    throw ValidationError(diag);
  }
  auto levels = saturate(s, m_max, coord_budget);
  const std::size_t n = s.spatial_rank();

  std::vector<double> growth;
  for (long m = 1; m <= m_max; ++m)
    growth.push_back(static_cast<double>(levels.at(m).size()) /
                     std::pow(static_cast<double>(m), static_cast<double>(n)));

  std::vector<RatVec> pts;
  for (const auto& x : levels.at(m_max)) {
    RatVec p;
    for (std::size_t i = 0; i < n; ++i) p.push_back(Rat(x[i]) / Rat(m_max));
    pts.push_back(std::move(p));
  }
  if (pts.empty()) throw ValidationError("top saturation level is empty");
  Polyhedron body(detail::convex_hull_halfspaces(pts, n), n);

  GrowthReport out{std::move(growth), std::move(body), Rat(0), 0.0};
  if (out.body.full_dimensional())
    out.body_volume_exact = volume(out.body);
  out.body_volume = to_double(out.body_volume_exact);
  return out;
}

}  // namespace fwv
