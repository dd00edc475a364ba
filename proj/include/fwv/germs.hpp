/// Weighted volumes of toric klt germs (identity fibrations): log
/// discrepancies of monomial valuations, valuation volumes by lattice count
/// or exact polytope volume, the normalized volume, and the local-to-global
/// comparison against a full fibration.
///
/// A germ is a pointed full-dimensional fan cone sigma in N together with
/// the canonical weight vector m_sigma solving <m_sigma, u> = 1 on every
/// primitive ray u (Q-Gorenstein). For a monomial valuation with weight xi
/// strictly inside sigma:
///   A(xi)   = <m_sigma, xi>
///   vol(xi) = n! vol{ x in dual(sigma) : <x, xi> <= 1 }
///   W(xi)   = e^{A(xi)} vol(xi)
///   nvol(xi)= A(xi)^n vol(xi)
/// Equivalently W(xi) is the weighted volume of the fibration whose moment
/// polyhedron is dual(sigma) - m_sigma; both routes are computed and must
/// agree.

#pragma once

#include "fwv/minimize.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace fwv {

class ToricGermData {
 public:
  ToricGermData(const std::vector<RatVec>& sigma_rays, std::optional<RatVec> m_sigma = std::nullopt,
                std::string label = {})
      : label_(std::move(label)),
        cone_sigma_(sigma_rays.empty()
                        ? throw ValidationError("fan cone needs at least one ray")
                        : Cone::from_rays(sigma_rays, sigma_rays[0].size())) {
    const std::size_t n = cone_sigma_.rank();
    if (!cone_sigma_.pointed() || cone_sigma_.dim() != n)
      throw ValidationError("fan cone must be pointed and full-dimensional");
    dual_cone_ = dual_cone(cone_sigma_);

    // Solve <m, u> = 1 on every primitive extreme ray u.
    RatMat rows;
    RatVec rhs;
    for (const auto& u : cone_sigma_.generators()) {
      rows.push_back(u);
      rhs.push_back(Rat(1));
    }
    RatMat square;
    RatVec square_rhs;
    RatMat basis;
    for (std::size_t i = 0; i < rows.size() && square.size() < n; ++i) {
      basis.push_back(rows[i]);
      if (fwv::rank(basis) == basis.size()) {
        square.push_back(rows[i]);
        square_rhs.push_back(rhs[i]);
      } else {
        basis.pop_back();
      }
    }
    auto sol = solve_square(square, square_rhs);
    if (!sol) throw ValidationError("cannot solve for canonical weights");
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (dot(rows[i], *sol) != rhs[i])
        throw ValidationError("cone is not Q-Gorenstein: no canonical weight vector");
    if (m_sigma && *m_sigma != *sol)
      throw ValidationError("supplied canonical weights do not solve the ray equations");
    m_sigma_ = *sol;
  }

  std::size_t rank() const { return cone_sigma_.rank(); }
  const Cone& cone_sigma() const { return cone_sigma_; }
  const Cone& dual() const { return dual_cone_; }
  const RatVec& m_sigma() const { return m_sigma_; }
  const std::string& label() const { return label_; }

  ReebVector valuation_weight(std::vector<double> coords) const {
    return ReebVector::in_cone(std::move(coords), cone_sigma_);
  }

 private:
  std::string label_;
  Cone cone_sigma_;
  Cone dual_cone_;
  RatVec m_sigma_;
};

/// The germ as an identity fibration: moment polyhedron dual(sigma) - m_sigma,
/// i.e. { x : <x, u> >= -1 for every primitive ray u of sigma }.
inline FibrationData germ_fibration(const ToricGermData& g) {
  std::vector<HalfSpace> hs;
  for (const auto& u : g.cone_sigma().generators()) hs.emplace_back(u, Rat(-1));
  return FibrationData(Polyhedron(std::move(hs), g.rank()), 1,
                       g.label().empty() ? "germ" : g.label());
}

/// A_X of the monomial valuation with weight xi: <m_sigma, xi>.
inline double log_discrepancy(const ToricGermData& g, const ReebVector& xi) {
  if (xi.rank() != g.rank()) throw ValidationError("weight vector rank mismatch");
  if (xi.membership != Membership::StrictInterior)
    throw ValidationError("valuation weight must be strictly interior to the fan cone");
  double s = 0;
  for (std::size_t i = 0; i < g.rank(); ++i) s += to_double(g.m_sigma()[i]) * xi.coords[i];
  return s;
}

enum class VolMethod { Lattice, Polytope };

/// vol(xi): by monomial count (n!/m^n) #{alpha in dual(sigma) : <alpha,xi> < m}
/// or exactly as n! vol{ x in dual(sigma) : <x,xi> <= 1 }.
inline double vol_valuation(const ToricGermData& g, const ReebVector& xi, VolMethod method,
                            long m = 0) {
  if (xi.rank() != g.rank()) throw ValidationError("weight vector rank mismatch");
  if (xi.membership != Membership::StrictInterior)
    throw DivergenceError("valuation weight on the cone boundary: truncation is unbounded");
  const std::size_t n = g.rank();
  RatVec xi_rat = rationalize(xi.coords);

  std::vector<HalfSpace> hs;
  for (const auto& h : g.dual().halfspaces()) hs.emplace_back(h, Rat(0));

  if (method == VolMethod::Polytope) {
    hs.emplace_back(scale(Rat(-1), xi_rat), Rat(-1));  // <x, xi> <= 1
    Polyhedron slice(std::move(hs), n);
    Rat fact = 1;
    for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<long>(i);
    return to_double(fact * volume(slice));
  }

  if (m <= 0) throw ValidationError("lattice method needs a positive level m");
  hs.emplace_back(scale(Rat(-1), xi_rat), Rat(-m));  // <x, xi> <= m
  Polyhedron slice(std::move(hs), n);
  long long count = 0;
  enumerate_lattice_points(slice, 1, [&](const std::vector<std::int64_t>& alpha) {
    Rat v = 0;
    for (std::size_t i = 0; i < n; ++i) v += Rat(alpha[i]) * xi_rat[i];
    if (v < m) ++count;  // valuation-ideal convention: strictly below m
  });
  double fact = 1;
  for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<double>(i);
  return fact * static_cast<double>(count) / std::pow(static_cast<double>(m), static_cast<double>(n));
}

/// W(xi) = e^{A(xi)} vol(xi).
inline double w_germ(const ToricGermData& g, const ReebVector& xi) {
  return std::exp(log_discrepancy(g, xi)) * vol_valuation(g, xi, VolMethod::Polytope);
}

/// nvol(xi) = A(xi)^n vol(xi); invariant under scaling of xi.
inline double nvol(const ToricGermData& g, const ReebVector& xi) {
  return std::pow(log_discrepancy(g, xi), static_cast<double>(g.rank())) *
         vol_valuation(g, xi, VolMethod::Polytope);
}

/// Minimizes W over the interior of sigma by reusing the fibration solver on
/// the shifted moment polyhedron (the objectives agree exactly).
inline MinimizationReport minimize_w_germ(const ToricGermData& g, const ReebVector& xi0,
                                          double tol, long max_iter = 200) {
  FibrationData f = germ_fibration(g);
  return minimize_w(f, f.reeb_vector(xi0.coords), tol, max_iter);
}

inline MinimizationReport minimize_w_germ(const ToricGermData& g, double tol,
                                          long max_iter = 200) {
  FibrationData f = germ_fibration(g);
  return minimize_w(f, tol, max_iter);
}

/// Local-to-global comparison: true iff the germ's minimal weighted volume
/// dominates the fibration's, up to tol.
inline bool compare_local_global(const FibrationData& f, const ToricGermData& g, double tol) {
  auto local = minimize_w_germ(g, std::min(tol, 1e-8));
  auto global = minimize_w(f, std::min(tol, 1e-8));
  if (local.status != MinimizeStatus::Converged || global.status != MinimizeStatus::Converged)
    throw ValidationError("comparison requires both minimizers to converge");
  return local.w_star >= global.w_star - tol;
}

}  // namespace fwv
