/// Graded weight tables dim R_{m,alpha}, the discrete Duistermaat-Heckman
/// measures they induce (1D and joint 2D), and Reeb vectors with
/// cone-membership certificates.

#pragma once

#include "fwv/exp_moments.hpp"
#include "fwv/polyhedra.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fwv {

enum class Membership { StrictInterior, Boundary, Outside };

inline const char* membership_name(Membership m) {
  switch (m) {
    case Membership::StrictInterior: return "strict-interior";
    case Membership::Boundary: return "boundary";
    default: return "outside";
  }
}

/// Exact conversion of a double to a rational (doubles are dyadic).
inline Rat rationalize(double x) {
  if (!std::isfinite(x)) throw ValidationError("cannot rationalize a non-finite value");
  int exp2 = 0;
  double mant = std::frexp(x, &exp2);
  long long scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp2 -= 53;
  Rat r(scaled);
  if (exp2 >= 0)
    r *= Rat(Int(1) << exp2);
  else
    r /= Rat(Int(1) << -exp2);
  return r;
}

inline RatVec rationalize(const std::vector<double>& xs) {
  RatVec r;
  r.reserve(xs.size());
  for (double x : xs) r.push_back(rationalize(x));
  return r;
}

/// Element of Lie(T) with a membership certificate against a stored cone.
/// Membership is decided exactly: double coordinates are dyadic rationals.
struct ReebVector {
  std::vector<double> coords;
  Membership membership = Membership::StrictInterior;

  static ReebVector in_cone(std::vector<double> coords, const Cone& cone) {
    ReebVector v;
    v.coords = std::move(coords);
    if (v.coords.size() != cone.rank()) throw ValidationError("Reeb vector of wrong rank");
    RatVec exact = rationalize(v.coords);
    if (cone.strictly_contains(exact))
      v.membership = Membership::StrictInterior;
    else if (cone.contains(exact))
      v.membership = Membership::Boundary;
    else
      v.membership = Membership::Outside;
    return v;
  }

  static ReebVector free_vector(std::vector<double> coords) {
    ReebVector v;
    v.coords = std::move(coords);
    v.membership = Membership::StrictInterior;
    return v;
  }

  std::size_t rank() const { return coords.size(); }
};

/// Toric presentation of a polarized Fano fibration: the moment polyhedron of
/// -rK under the canonical lifting, with the recession and Reeb cones derived
/// from it. Construction rejects data whose Reeb cone has empty interior.
class FibrationData {
 public:
  FibrationData(Polyhedron polytope, long cartier_index = 1, std::string label = {})
      : polytope_(std::move(polytope)),
        cartier_index_(cartier_index),
        label_(std::move(label)),
        recession_(recession_cone(polytope_)),
        reeb_cone_(dual_cone(recession_)) {
    if (cartier_index_ <= 0) throw ValidationError("Cartier index must be positive");
    if (!polytope_.full_dimensional())
      throw ValidationError("moment polyhedron must be full-dimensional");
    if (!recession_.pointed())
      throw ValidationError("recession cone must be pointed (Reeb cone needs interior)");
    cells_ = decompose(polytope_);
    for (const auto& cell : cells_.all_cells()) {
      CellGeometry g;
      for (const auto& v : cell.vertices) g.vertices.push_back(to_doubles(v));
      for (const auto& r : cell.rays) g.rays.push_back(to_doubles(r));
      g.jacobian_abs = to_double(cell.jacobian_abs());
      cell_geometry_.push_back(std::move(g));
    }
    for (const auto& r : recession_.generators())
      recession_rays_d_.push_back(to_doubles(r));
  }

  std::size_t rank() const { return polytope_.rank(); }
  const Polyhedron& polytope() const { return polytope_; }
  long cartier_index() const { return cartier_index_; }
  const std::string& label() const { return label_; }
  const Cone& recession() const { return recession_; }
  const Cone& reeb_cone() const { return reeb_cone_; }
  const Decomposition& cells() const { return cells_; }
  const std::vector<CellGeometry>& cell_geometry() const { return cell_geometry_; }
  const std::vector<std::vector<double>>& recession_rays() const { return recession_rays_d_; }

  ReebVector reeb_vector(std::vector<double> coords) const {
    return ReebVector::in_cone(std::move(coords), reeb_cone_);
  }

 private:
  Polyhedron polytope_;
  long cartier_index_;
  std::string label_;
  Cone recession_;
  Cone reeb_cone_;
  Decomposition cells_;
  std::vector<CellGeometry> cell_geometry_;
  std::vector<std::vector<double>> recession_rays_d_;
};

struct WeightEntry {
  std::vector<std::int64_t> alpha;
  long long dim = 1;
};

enum class TableSource { ToricGenerated, UserSupplied };

/// Per-level truncation for unbounded moment polyhedra: level m keeps the
/// weights with <alpha/m, xi_ref> <= budget.
struct Truncation {
  RatVec xi_ref;
  Rat budget;
};

/// Graded table of weight-space dimensions. Immutable after construction.
class WeightTable {
 public:
  WeightTable(std::size_t rank, std::map<long, std::vector<WeightEntry>> levels,
              TableSource source, long cartier_index = 1,
              std::optional<Cone> reeb_cone = std::nullopt)
      : rank_(rank),
        levels_(std::move(levels)),
        source_(source),
        cartier_index_(cartier_index),
        reeb_cone_(std::move(reeb_cone)) {
    if (cartier_index_ <= 0) throw ValidationError("Cartier index must be positive");
    for (auto& [m, entries] : levels_) {
      if (m < 0) throw ValidationError("weight-table level must be nonnegative");
      std::sort(entries.begin(), entries.end(),
                [](const WeightEntry& a, const WeightEntry& b) { return a.alpha < b.alpha; });
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].alpha.size() != rank_)
          throw ValidationError("weight of wrong rank at level " + std::to_string(m));
        if (entries[i].dim <= 0)
          throw ValidationError("weight-space dimension must be positive at level " +
                                std::to_string(m));
        if (i > 0 && entries[i].alpha == entries[i - 1].alpha)
          throw ValidationError("duplicate weight at level " + std::to_string(m));
      }
    }
  }

  std::size_t rank() const { return rank_; }
  TableSource source() const { return source_; }
  long cartier_index() const { return cartier_index_; }
  const std::map<long, std::vector<WeightEntry>>& levels() const { return levels_; }
  const std::optional<Cone>& reeb_cone() const { return reeb_cone_; }

  const std::vector<WeightEntry>& level(long m) const {
    auto it = levels_.find(m);
    if (it == levels_.end())
      throw ValidationError("weight table has no level " + std::to_string(m));
    return it->second;
  }

  bool has_level(long m) const { return levels_.count(m) != 0; }

  long long level_dimension(long m) const {
    long long total = 0;
    for (const auto& e : level(m)) total += e.dim;
    return total;
  }

 private:
  std::size_t rank_;
  std::map<long, std::vector<WeightEntry>> levels_;
  TableSource source_;
  long cartier_index_;
  std::optional<Cone> reeb_cone_;
};

namespace detail {

inline std::optional<HalfSpace> truncation_halfspace(const FibrationData& f,
                                                     const std::optional<Truncation>& trunc) {
  if (!recession_cone(f.polytope()).trivial()) {
    if (!trunc)
      throw ValidationError("unbounded moment polyhedron requires a truncation budget");
    if (trunc->budget <= 0) throw ValidationError("truncation budget must be positive");
    if (!f.reeb_cone().strictly_contains(trunc->xi_ref))
      throw ValidationError("truncation reference vector is not strictly interior to the Reeb cone");
    return HalfSpace(scale(Rat(-1), trunc->xi_ref), -trunc->budget);
  }
  return std::nullopt;
}

}  // namespace detail

/// Builds the toric weight table of F for the requested levels. Every weight
/// space is one-dimensional; level 0 holds the single weight 0.
inline WeightTable from_polytope_levels(const FibrationData& f, const std::vector<long>& ms,
                                        const std::optional<Truncation>& trunc = std::nullopt) {
  auto cut = detail::truncation_halfspace(f, trunc);
  std::map<long, std::vector<WeightEntry>> levels;
  for (long m : ms) {
    if (m < 0) throw ValidationError("weight-table level must be nonnegative");
    std::vector<WeightEntry> entries;
    if (m == 0) {
      entries.push_back(WeightEntry{std::vector<std::int64_t>(f.rank(), 0), 1});
    } else {
      for (auto& alpha : lattice_points(f.polytope(), m, cut))
        entries.push_back(WeightEntry{alpha, 1});
    }
    levels[m] = std::move(entries);
  }
  return WeightTable(f.rank(), std::move(levels), TableSource::ToricGenerated, f.cartier_index(),
                     f.reeb_cone());
}

/// Levels 0..m_max of the toric weight table.
inline WeightTable from_polytope(const FibrationData& f, long m_max,
                                 const std::optional<Truncation>& trunc = std::nullopt) {
  if (m_max < 0) throw ValidationError("m_max must be nonnegative");
  std::vector<long> ms;
  for (long m = 0; m <= m_max; ++m) ms.push_back(m);
  return from_polytope_levels(f, ms, trunc);
}

// ---------------------------------------------------------------------------
// Discrete measures
// ---------------------------------------------------------------------------

struct Atom {
  double location;
  double mass;
};

struct DiscreteMeasure {
  std::vector<Atom> atoms;  // sorted by location, distinct locations

  double total_mass() const {
    double s = 0;
    for (const auto& a : atoms) s += a.mass;
    return s;
  }
};

struct Atom2D {
  double x, y;
  double mass;
};

struct DiscreteMeasure2D {
  std::vector<Atom2D> atoms;  // sorted by (x, y), distinct pairs

  double total_mass() const {
    double s = 0;
    for (const auto& a : atoms) s += a.mass;
    return s;
  }

  DiscreteMeasure y_marginal() const {
    std::map<double, double> acc;
    for (const auto& a : atoms) acc[a.y] += a.mass;
    DiscreteMeasure m;
    for (const auto& [loc, mass] : acc) m.atoms.push_back(Atom{loc, mass});
    return m;
  }
};

enum class DhConvention { WeightCentered, ValuationShifted };

/// DH_m: atoms at <alpha/(rm), xi> with mass dim/(rm)^n, translated by
/// +A in the valuation-shifted convention. Equal locations are merged.
inline DiscreteMeasure dh_m(const WeightTable& w, const ReebVector& xi, long m,
                            DhConvention convention = DhConvention::WeightCentered,
                            double a_shift = 0.0) {
  if (xi.rank() != w.rank()) throw ValidationError("Reeb vector rank mismatch");
  if (m <= 0) throw ValidationError("dh_m level must be positive");
  if (!std::isfinite(a_shift)) throw ValidationError("translation A must be finite");
  for (double c : xi.coords)
    if (!std::isfinite(c)) throw ValidationError("Reeb vector has non-finite coordinates");
  const auto& entries = w.level(m);
  const double rm = static_cast<double>(w.cartier_index()) * static_cast<double>(m);
  const double cell = 1.0 / std::pow(rm, static_cast<double>(w.rank()));
  const double shift = convention == DhConvention::ValuationShifted ? a_shift : 0.0;

  std::map<double, double> acc;
  for (const auto& e : entries) {
    double loc = 0;
    for (std::size_t i = 0; i < w.rank(); ++i)
      loc += static_cast<double>(e.alpha[i]) * xi.coords[i];
    loc = loc / rm + shift;
    if (!std::isfinite(loc)) throw ValidationError("non-finite atom location");
    acc[loc] += static_cast<double>(e.dim) * cell;
  }
  DiscreteMeasure out;
  out.atoms.reserve(acc.size());
  for (const auto& [loc, mass] : acc) out.atoms.push_back(Atom{loc, mass});
  return out;
}

/// Joint measure DH_m(xi, eta): atoms at (<alpha/(rm), xi>, <alpha/(rm), eta>).
inline DiscreteMeasure2D dh_joint_m(const WeightTable& w, const ReebVector& xi,
                                    const ReebVector& eta, long m) {
  if (xi.rank() != w.rank() || eta.rank() != w.rank())
    throw ValidationError("Reeb vector rank mismatch");
  if (m <= 0) throw ValidationError("dh_joint_m level must be positive");
  if (xi.membership != Membership::StrictInterior)
    throw DivergenceError("xi must be strictly interior to the Reeb cone");
  const auto& entries = w.level(m);
  const double rm = static_cast<double>(w.cartier_index()) * static_cast<double>(m);
  const double cell = 1.0 / std::pow(rm, static_cast<double>(w.rank()));

  std::map<std::pair<double, double>, double> acc;
  for (const auto& e : entries) {
    double lx = 0, ly = 0;
    for (std::size_t i = 0; i < w.rank(); ++i) {
      lx += static_cast<double>(e.alpha[i]) * xi.coords[i];
      ly += static_cast<double>(e.alpha[i]) * eta.coords[i];
    }
    lx /= rm;
    ly /= rm;
    if (!std::isfinite(lx) || !std::isfinite(ly))
      throw ValidationError("non-finite atom location");
    acc[{lx, ly}] += static_cast<double>(e.dim) * cell;
  }
  DiscreteMeasure2D out;
  out.atoms.reserve(acc.size());
  for (const auto& [loc, mass] : acc) out.atoms.push_back(Atom2D{loc.first, loc.second, mass});
  return out;
}

/// dim R_m / F^{> lambda m}: total dimension of weights with
/// <alpha, xi> <= lambda * r * m. Monotone nondecreasing in lambda.
inline long long filtration_codim(const WeightTable& w, const ReebVector& xi, long m,
                                  double lambda) {
  if (xi.rank() != w.rank()) throw ValidationError("Reeb vector rank mismatch");
  const auto& entries = w.level(m);
  const double bound =
      lambda * static_cast<double>(w.cartier_index()) * static_cast<double>(m);
  long long total = 0;
  for (const auto& e : entries) {
    double v = 0;
    for (std::size_t i = 0; i < w.rank(); ++i)
      v += static_cast<double>(e.alpha[i]) * xi.coords[i];
    if (v <= bound) total += e.dim;
  }
  return total;
}

}  // namespace fwv
