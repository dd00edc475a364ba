/// Exact rational polyhedral geometry: H-representation polyhedra, dual and
/// recession cones, vertex enumeration, lattice points of dilates, and
/// decomposition into integration cells.
///
/// Vertex and ray enumeration use exhaustive basic-solution enumeration over
/// facet subsets; inputs are desk-scale (rank <= ~6, <= ~30 facets), so
/// simplicity wins over asymptotics.

#pragma once

#include "fwv/linalg.hpp"
#include "fwv/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fwv {

/// {x : <x, normal> >= offset}
struct HalfSpace {
  RatVec normal;
  Rat offset;

  HalfSpace(RatVec n, Rat o) : normal(std::move(n)), offset(std::move(o)) {
    if (is_zero(normal)) throw ValidationError("halfspace with zero normal");
  }
};

namespace detail {

/// Extreme rays and lineality of {u : <row, u> >= 0 for all rows}.
/// Rays are primitive, deduplicated, lex-sorted; lineality vectors are
/// primitive with canonical sign.
struct RaySet {
  std::vector<RatVec> rays;
  std::vector<RatVec> lineality;
};

inline RaySet rays_from_rows(const std::vector<RatVec>& rows, std::size_t rank) {
  RaySet out;
  RatMat mat = rows;
  for (auto& l : kernel_basis(mat, rank)) out.lineality.push_back(canonical_sign(primitive(l)));

  // Cut to the orthogonal complement of the lineality space; the pointed
  // part there carries the extreme rays.
  std::vector<RatVec> work = rows;
  for (const auto& l : out.lineality) {
    work.push_back(l);
    work.push_back(scale(Rat(-1), l));
  }
  const std::size_t k = work.size();
  if (rank == 0) return out;

  auto feasible = [&](const RatVec& u) {
    for (const auto& r : rows)
      if (dot(r, u) < 0) return false;
    for (const auto& l : out.lineality)
      if (dot(l, u) != 0) return false;
    return true;
  };

  std::set<RatVec> seen;
  if (rank == 1) {
    // Subsets of size 0: any feasible direction is extreme in 1D.
    for (const RatVec& cand : {rat_vec({1}), rat_vec({-1})})
      if (feasible(cand) && !is_zero(cand)) seen.insert(primitive(cand));
  } else {
    std::vector<std::size_t> idx(rank - 1);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
      if (pos == rank - 1) {
        RatMat sub;
        for (auto i : idx) sub.push_back(work[i]);
        auto ker = kernel_basis(sub, rank);
        if (ker.size() != 1) return;
        RatVec u = primitive(ker[0]);
        if (is_zero(u)) return;
        if (feasible(u))
          seen.insert(u);
        else {
          RatVec nu = scale(Rat(-1), u);
          if (feasible(nu)) seen.insert(primitive(nu));
        }
        return;
      }
      for (std::size_t i = start; i + (rank - 1 - pos) <= k; ++i) {
        idx[pos] = i;
        rec(pos + 1, i + 1);
      }
    };
    rec(0, 0);
  }
  out.rays.assign(seen.begin(), seen.end());
  std::sort(out.rays.begin(), out.rays.end(), lex_less);
  return out;
}

}  // namespace detail

/// Convex polyhedral cone with both representations kept once computed.
/// `generators` are the extreme rays; a non-pointed cone additionally
/// carries a lineality basis (the cone is cone(generators) + span(lineality)).
class Cone {
 public:
  static Cone from_halfspaces(std::vector<RatVec> normals, std::size_t rank) {
    Cone c;
    c.rank_ = rank;
    for (auto& n : normals)
      if (n.size() != rank) throw ValidationError("cone halfspace of wrong rank");
    c.halfspaces_ = std::move(normals);
    auto rs = detail::rays_from_rows(c.halfspaces_, rank);
    c.generators_ = std::move(rs.rays);
    c.lineality_ = std::move(rs.lineality);
    return c;
  }

  static Cone from_rays(const std::vector<RatVec>& rays, std::size_t rank) {
    for (const auto& r : rays) {
      if (r.size() != rank) throw ValidationError("cone ray of wrong rank");
      if (is_zero(r)) throw ValidationError("zero vector is not a cone ray");
    }
    // Halfspaces of cone(rays) are the extreme rays of the dual cone
    // {y : <r, y> >= 0}, plus +-(dual lineality) as equality cuts.
    auto dual_rs = detail::rays_from_rows(rays, rank);
    std::vector<RatVec> normals = dual_rs.rays;
    for (const auto& l : dual_rs.lineality) {
      normals.push_back(l);
      normals.push_back(scale(Rat(-1), l));
    }
    Cone c = from_halfspaces(std::move(normals), rank);
    return c;
  }

  static Cone full(std::size_t rank) { return from_halfspaces({}, rank); }

  static Cone origin(std::size_t rank) {
    std::vector<RatVec> normals;
    for (std::size_t i = 0; i < rank; ++i) {
      RatVec e(rank, Rat(0));
      e[i] = 1;
      normals.push_back(e);
      e[i] = -1;
      normals.push_back(e);
    }
    return from_halfspaces(std::move(normals), rank);
  }

  std::size_t rank() const { return rank_; }
  const std::vector<RatVec>& generators() const { return generators_; }
  const std::vector<RatVec>& halfspaces() const { return halfspaces_; }
  const std::vector<RatVec>& lineality() const { return lineality_; }
  bool pointed() const { return lineality_.empty(); }
  bool trivial() const { return generators_.empty() && lineality_.empty(); }

  /// Dimension of the linear span of the cone.
  std::size_t dim() const {
    RatMat rows = generators_;
    for (const auto& l : lineality_) rows.push_back(l);
    if (rows.empty()) return 0;
    return fwv::rank(rows);
  }

  bool contains(const RatVec& x) const {
    for (const auto& h : halfspaces_)
      if (dot(h, x) < 0) return false;
    return true;
  }

  bool strictly_contains(const RatVec& x) const {
    for (const auto& h : halfspaces_)
      if (dot(h, x) <= 0) return false;
    return true;
  }

  bool operator==(const Cone& o) const {
    return rank_ == o.rank_ && generators_ == o.generators_ && lineality_ == o.lineality_;
  }

 private:
  std::size_t rank_ = 0;
  std::vector<RatVec> generators_;
  std::vector<RatVec> halfspaces_;
  std::vector<RatVec> lineality_;
};

/// {eta : <alpha, eta> >= 0 for all alpha in C}
inline Cone dual_cone(const Cone& c) {
  // The dual of {x : <h_i, x> >= 0} is cone(h_i); the dual of cone(g_i) is
  // {y : <g_i, y> >= 0}. Either representation serves.
  std::vector<RatVec> rows = c.generators();
  for (const auto& l : c.lineality()) {
    rows.push_back(l);
    rows.push_back(scale(Rat(-1), l));
  }
  return Cone::from_halfspaces(std::move(rows), c.rank());
}

class Polyhedron;
inline Cone recession_cone(const Polyhedron& p);

/// Nonempty H-representation polyhedron. Construction certifies nonemptiness
/// with a relative-interior witness and enumerates the vertex set.
class Polyhedron {
 public:
  Polyhedron(std::vector<HalfSpace> halfspaces, std::size_t rank)
      : halfspaces_(std::move(halfspaces)), rank_(rank) {
    for (const auto& h : halfspaces_)
      if (h.normal.size() != rank_) throw ValidationError("halfspace of wrong rank");
    if (rank_ == 0) throw ValidationError("polyhedron rank must be positive");
    build();
  }

  std::size_t rank() const { return rank_; }
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }
  const std::vector<RatVec>& vertices() const { return vertices_; }
  const RatVec& interior_point() const { return witness_; }
  bool full_dimensional() const { return full_dim_; }
  const std::vector<RatVec>& lineality() const { return lineality_; }

  bool contains(const RatVec& x) const {
    for (const auto& h : halfspaces_)
      if (dot(h.normal, x) < h.offset) return false;
    return true;
  }

  Polyhedron intersect(const HalfSpace& h) const {
    auto hs = halfspaces_;
    hs.push_back(h);
    return Polyhedron(std::move(hs), rank_);
  }

  Polyhedron dilate(const Rat& m) const {
    if (m <= 0) throw ValidationError("dilation factor must be positive");
    std::vector<HalfSpace> hs;
    hs.reserve(halfspaces_.size());
    for (const auto& h : halfspaces_) hs.emplace_back(h.normal, m * h.offset);
    return Polyhedron(std::move(hs), rank_);
  }

  /// Componentwise vertex bounds; only meaningful when bounded.
  std::pair<RatVec, RatVec> vertex_box() const {
    RatVec lo = vertices_.at(0), hi = vertices_.at(0);
    for (const auto& v : vertices_)
      for (std::size_t i = 0; i < rank_; ++i) {
        lo[i] = std::min(lo[i], v[i]);
        hi[i] = std::max(hi[i], v[i]);
      }
    return {lo, hi};
  }

 private:
  void build() {
    RatMat normal_rows;
    for (const auto& h : halfspaces_) normal_rows.push_back(h.normal);
    for (auto& l : kernel_basis(normal_rows, rank_)) lineality_.push_back(canonical_sign(primitive(l)));

    // Rows for basic-solution enumeration: facets plus (as equalities)
    // the lineality directions, pinning the canonical cross-section.
    struct Row {
      RatVec a;
      Rat b;
      bool equality;
    };
    std::vector<Row> rows;
    for (const auto& h : halfspaces_) rows.push_back({h.normal, h.offset, false});
    for (const auto& l : lineality_) rows.push_back({l, Rat(0), true});

    auto feasible = [&](const RatVec& x) {
      for (const auto& r : rows) {
        Rat v = dot(r.a, x);
        if (r.equality ? v != r.b : v < r.b) return false;
      }
      return true;
    };

    std::set<RatVec> verts;
    const std::size_t k = rows.size();
    std::vector<std::size_t> idx(rank_);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
      if (pos == rank_) {
        RatMat a;
        RatVec b;
        for (auto i : idx) {
          a.push_back(rows[i].a);
          b.push_back(rows[i].b);
        }
        auto x = solve_square(std::move(a), std::move(b));
        if (x && feasible(*x)) verts.insert(*x);
        return;
      }
      for (std::size_t i = start; i + (rank_ - pos) <= k; ++i) {
        idx[pos] = i;
        rec(pos + 1, i + 1);
      }
    };
    if (k >= rank_) rec(0, 0);
    vertices_.assign(verts.begin(), verts.end());
    std::sort(vertices_.begin(), vertices_.end(), lex_less);

    if (vertices_.empty()) {
      // A polyhedron with the lineality pinned is pointed, so emptiness of
      // the basic solution set certifies emptiness of the set itself --
      // except in the degenerate no-constraints case (the whole space).
      if (!halfspaces_.empty()) throw ValidationError("empty polyhedron");
      vertices_.push_back(RatVec(rank_, Rat(0)));
    }

    auto rec_rows = normal_rows;
    auto rec_rays = detail::rays_from_rows(rec_rows, rank_);

    witness_ = RatVec(rank_, Rat(0));
    for (const auto& v : vertices_) witness_ = add(witness_, v);
    witness_ = scale(Rat(1) / Rat(static_cast<long>(vertices_.size())), witness_);
    for (const auto& r : rec_rays.rays) witness_ = add(witness_, r);

    RatMat span;
    for (const auto& v : vertices_) span.push_back(sub(v, vertices_[0]));
    for (const auto& r : rec_rays.rays) span.push_back(r);
    for (const auto& l : lineality_) span.push_back(l);
    full_dim_ = !span.empty() && fwv::rank(span) == rank_;
  }

  std::vector<HalfSpace> halfspaces_;
  std::size_t rank_;
  std::vector<RatVec> vertices_;
  std::vector<RatVec> lineality_;
  RatVec witness_;
  bool full_dim_ = false;
};

/// {u : <u, normal_i> >= 0 for all facets i}
inline Cone recession_cone(const Polyhedron& p) {
  std::vector<RatVec> rows;
  for (const auto& h : p.halfspaces()) rows.push_back(h.normal);
  return Cone::from_halfspaces(std::move(rows), p.rank());
}

// ---------------------------------------------------------------------------
// Lattice point enumeration
// ---------------------------------------------------------------------------

namespace detail {

struct IntHalfSpace {
  std::vector<std::int64_t> normal;
  std::int64_t offset;  // <x, normal> >= m * offset_num / offset_den handled upstream
  Rat offset_rat;
};

inline std::int64_t to_i64(const Int& v) {
  if (v > Int(INT64_MAX / 4) || v < Int(INT64_MIN / 4))
    throw ValidationError("halfspace coefficients too large for lattice enumeration");
  return v.convert_to<std::int64_t>();
}

inline std::vector<IntHalfSpace> integerize(const Polyhedron& p) {
  std::vector<IntHalfSpace> out;
  for (const auto& h : p.halfspaces()) {
    Int lcm = rat_den(h.offset);
    for (const auto& c : h.normal) lcm = boost::multiprecision::lcm(lcm, rat_den(c));
    IntHalfSpace ih;
    for (const auto& c : h.normal) ih.normal.push_back(to_i64(rat_num(c) * (lcm / rat_den(c))));
    Int off = rat_num(h.offset) * (lcm / rat_den(h.offset));
    ih.offset = to_i64(off);
    ih.offset_rat = Rat(off);
    out.push_back(std::move(ih));
  }
  return out;
}

}  // namespace detail

/// Streams the integer points of m*P in lexicographic order. Throws when the
/// enumeration region is unbounded (supply a truncation halfspace first).
inline void enumerate_lattice_points(const Polyhedron& p, long m,
                                     const std::function<void(const std::vector<std::int64_t>&)>& fn) {
  if (m <= 0) throw ValidationError("dilation level must be positive");
  if (!recession_cone(p).trivial())
    throw ValidationError(
        "lattice enumeration over an unbounded polyhedron; supply a truncation halfspace");
  const std::size_t n = p.rank();
  auto [lo_r, hi_r] = p.vertex_box();
  std::vector<std::int64_t> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = detail::to_i64(ceil_rat(Rat(m) * lo_r[i]));
    hi[i] = detail::to_i64(floor_rat(Rat(m) * hi_r[i]));
    if (lo[i] > hi[i]) return;
  }
  auto hs = detail::integerize(p);

  std::vector<std::int64_t> x(n);
  // Iterate the first n-1 coordinates over the box; solve the last
  // coordinate's exact range from the constraints.
  std::function<void(std::size_t)> rec = [&](std::size_t d) {
    if (d + 1 == n) {
      std::int64_t a = lo[d], b = hi[d];
      for (const auto& h : hs) {
        __int128 partial = -static_cast<__int128>(h.offset) * m;
        for (std::size_t i = 0; i + 1 < n; ++i)
          partial += static_cast<__int128>(h.normal[i]) * x[i];
        std::int64_t c = h.normal[d];
        // partial + c * x_d >= 0
        if (c == 0) {
          if (partial < 0) return;
        } else if (c > 0) {
          __int128 bound = -partial;
          std::int64_t lo_d =
              static_cast<std::int64_t>(bound >= 0 ? (bound + c - 1) / c : -((-bound) / c));
          a = std::max(a, lo_d);
        } else {
          __int128 cc = -static_cast<__int128>(c);
          __int128 bound = partial;
          std::int64_t hi_d =
              static_cast<std::int64_t>(bound >= 0 ? bound / cc : -((-bound + cc - 1) / cc));
          b = std::min(b, hi_d);
        }
        if (a > b) return;
      }
      for (std::int64_t v = a; v <= b; ++v) {
        x[d] = v;
        fn(x);
      }
      return;
    }
    for (std::int64_t v = lo[d]; v <= hi[d]; ++v) {
      x[d] = v;
      rec(d + 1);
    }
  };
  rec(0);
}

/// Integer points of m*P (after optional truncation), lexicographically
/// ordered, no duplicates.
inline std::vector<std::vector<std::int64_t>> lattice_points(
    const Polyhedron& p, long m, const std::optional<HalfSpace>& truncation = std::nullopt) {
  const Polyhedron q = truncation ? p.intersect(*truncation) : p;
  std::vector<std::vector<std::int64_t>> pts;
  enumerate_lattice_points(q, m, [&](const std::vector<std::int64_t>& x) { pts.push_back(x); });
  return pts;
}

// ---------------------------------------------------------------------------
// Decomposition into integration cells
// ---------------------------------------------------------------------------

struct Simplex {
  std::vector<RatVec> vertices;  // n+1 affinely independent points

  Rat volume() const {
    const std::size_t n = vertices.at(0).size();
    RatMat m;
    for (std::size_t i = 1; i <= n; ++i) m.push_back(sub(vertices[i], vertices[0]));
    Rat d = det(m);
    if (d < 0) d = -d;
    Rat fact = 1;
    for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<long>(i);
    return d / fact;
  }
};

struct SimplicialCone {
  RatVec apex;
  std::vector<RatVec> rays;  // n linearly independent

  Rat det_abs() const {
    Rat d = det(rays);
    return d < 0 ? -d : d;
  }
};

/// One cell of a polyhedral decomposition: conv(vertices) + cone(rays) with
/// #vertices + #rays = n + 1 and independent spanning directions. A cell
/// with n+1 vertices is a simplex; a cell with a single vertex is a
/// simplicial cone; anything in between is an unbounded wedge over a
/// positive-dimensional bounded face.
struct Cell {
  std::vector<RatVec> vertices;
  std::vector<RatVec> rays;

  bool is_simplex() const { return rays.empty(); }
  bool is_cone() const { return vertices.size() == 1; }

  /// |det[v_2-v_1, ..., v_k-v_1, u_1, ..., u_r]|
  Rat jacobian_abs() const {
    RatMat m;
    for (std::size_t i = 1; i < vertices.size(); ++i) m.push_back(sub(vertices[i], vertices[0]));
    for (const auto& u : rays) m.push_back(u);
    Rat d = det(m);
    return d < 0 ? -d : d;
  }
};

struct Decomposition {
  std::vector<Simplex> simplices;
  std::vector<SimplicialCone> cones;
  std::vector<Cell> wedges;  // mixed cells (vertices and rays)

  std::vector<Cell> all_cells() const {
    std::vector<Cell> cells;
    for (const auto& s : simplices) cells.push_back(Cell{s.vertices, {}});
    for (const auto& c : cones) cells.push_back(Cell{{c.apex}, c.rays});
    for (const auto& w : wedges) cells.push_back(w);
    return cells;
  }
};

namespace detail {

/// Placing (beneath-beyond) triangulation of a pointed full-dimensional cone
/// given by generators, in the given order. Returns cells as sorted
/// generator-index tuples. Exact arithmetic, deterministic output.
inline std::vector<std::vector<int>> place_cone(const std::vector<RatVec>& gens) {
  const std::size_t d = gens.at(0).size();
  std::vector<int> init;
  RatMat basis;
  for (std::size_t i = 0; i < gens.size() && init.size() < d; ++i) {
    basis.push_back(gens[i]);
    if (fwv::rank(basis) == basis.size())
      init.push_back(static_cast<int>(i));
    else
      basis.pop_back();
  }
  if (init.size() < d) throw ValidationError("degenerate (lower-dimensional) region rejected");

  std::set<std::vector<int>> cells;
  std::map<std::vector<int>, int> facet_count;  // sorted (d-1)-subset -> #adjacent cells
  std::map<std::vector<int>, int> facet_opp;    // one opposite generator per facet

  auto add_cell = [&](std::vector<int> cell) {
    std::sort(cell.begin(), cell.end());
    for (std::size_t skip = 0; skip < cell.size(); ++skip) {
      std::vector<int> f;
      for (std::size_t j = 0; j < cell.size(); ++j)
        if (j != skip) f.push_back(cell[j]);
      ++facet_count[f];
      facet_opp[f] = cell[skip];
    }
    cells.insert(std::move(cell));
  };
  add_cell(init);

  std::set<int> placed(init.begin(), init.end());
  for (std::size_t gi = 0; gi < gens.size(); ++gi) {
    if (placed.count(static_cast<int>(gi))) continue;
    const RatVec& g = gens[gi];
    std::vector<std::vector<int>> visible;
    for (const auto& [facet, count] : facet_count) {
      if (count != 1) continue;
      RatMat rows;
      for (int idx : facet) rows.push_back(gens[idx]);
      auto ker = kernel_basis(rows, d);
      if (ker.size() != 1) continue;  // cannot happen for simplicial cells
      RatVec h = ker[0];
      if (dot(h, gens[facet_opp.at(facet)]) > 0) h = scale(Rat(-1), h);
      if (dot(h, g) > 0) visible.push_back(facet);
    }
    for (auto& f : visible) {
      f.push_back(static_cast<int>(gi));
      add_cell(std::move(f));
    }
    placed.insert(static_cast<int>(gi));
  }
  return {cells.begin(), cells.end()};
}

}  // namespace detail

/// Decomposes P into cells with pairwise disjoint interiors whose union is P:
/// the placing triangulation of the homogenization cone over P, read back at
/// height one. Vertices are placed before recession rays, each group in
/// lexicographic order. Requires P full-dimensional with pointed recession.
inline Decomposition decompose(const Polyhedron& p) {
  if (!p.full_dimensional())
    throw ValidationError("degenerate (lower-dimensional) polyhedron rejected");
  if (!p.lineality().empty())
    throw ValidationError("polyhedron with nontrivial lineality has no pointed decomposition");

  Cone rec = recession_cone(p);
  std::vector<RatVec> gens;
  const std::size_t num_vertices = p.vertices().size();
  for (const auto& v : p.vertices()) {
    RatVec g = v;
    g.push_back(Rat(1));
    gens.push_back(std::move(g));
  }
  for (const auto& r : rec.generators()) {
    RatVec g = r;
    g.push_back(Rat(0));
    gens.push_back(std::move(g));
  }

  Decomposition out;
  for (const auto& cell_idx : detail::place_cone(gens)) {
    Cell cell;
    for (int idx : cell_idx) {
      if (static_cast<std::size_t>(idx) < num_vertices)
        cell.vertices.push_back(p.vertices()[idx]);
      else
        cell.rays.push_back(rec.generators()[idx - num_vertices]);
    }
    if (cell.is_simplex())
      out.simplices.push_back(Simplex{cell.vertices});
    else if (cell.is_cone())
      out.cones.push_back(SimplicialCone{cell.vertices[0], cell.rays});
    else
      out.wedges.push_back(std::move(cell));
  }
  return out;
}

/// Triangulation into simplices (bounded part) and simplicial cones
/// (unbounded part). An unbounded polyhedron with bounded faces of positive
/// dimension additionally produces wedge cells; see Decomposition.
inline Decomposition triangulate(const Polyhedron& p,
                                 const std::optional<HalfSpace>& truncation = std::nullopt) {
  return truncation ? decompose(p.intersect(*truncation)) : decompose(p);
}

/// Exact volume of a bounded full-dimensional polyhedron.
inline Rat volume(const Polyhedron& p) {
  if (!recession_cone(p).trivial()) throw ValidationError("volume of an unbounded polyhedron");
  Rat v = 0;
  for (const auto& s : decompose(p).simplices) v += s.volume();
  return v;
}

}  // namespace fwv
