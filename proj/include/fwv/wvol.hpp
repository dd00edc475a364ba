/// The weighted volume W(xi) = int_P e^{-<x,xi>} dx and its derivatives,
/// evaluated by three routes that cross-check each other:
///   - lattice sums over a weight table at finite level m,
///   - exact per-cell closed forms over the polyhedral decomposition,
///   - stratified Monte Carlo (the independent oracle for the exact route).
///
/// Gradient and Hessian come from the closed forms:
///   grad_j W = -int x_j e^{-<x,xi>},  hess_jk W = int x_j x_k e^{-<x,xi>},
/// so the Hessian is symmetric positive definite on the open Reeb cone and
/// the weighted volume is strictly convex there.

#pragma once

#include "fwv/parallel.hpp"
#include "fwv/weights.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace fwv {

enum class WvolMethod { Lattice, Exact, MonteCarlo };

inline const char* wvol_method_name(WvolMethod m) {
  switch (m) {
    case WvolMethod::Lattice: return "lattice";
    case WvolMethod::Exact: return "exact";
    default: return "monte-carlo";
  }
}

struct WvolResult {
  double value = 0.0;
  WvolMethod method = WvolMethod::Exact;
  long detail = 0;  // m_used, cells_used, or samples
  double error_estimate = 0.0;
};

namespace detail {

constexpr double kRayEpsScale = 1e-12;

inline double ray_eps(const std::vector<std::vector<double>>& rays,
                      const std::vector<double>& xi) {
  double xi_norm = 0;
  for (double c : xi) xi_norm += c * c;
  xi_norm = std::sqrt(xi_norm);
  double max_ray = 0;
  for (const auto& r : rays) {
    double n = 0;
    for (double c : r) n += c * c;
    max_ray = std::max(max_ray, std::sqrt(n));
  }
  return kRayEpsScale * std::max(1.0, xi_norm) * std::max(1.0, max_ray);
}

/// Fail fast when the integral diverges: every extreme recession ray must
/// pair strictly positively with xi.
inline void require_integrable(const FibrationData& f, const std::vector<double>& xi) {
  const double eps = ray_eps(f.recession_rays(), xi);
  for (const auto& r : f.recession_rays()) {
    double s = 0;
    for (std::size_t i = 0; i < xi.size(); ++i) s += r[i] * xi[i];
    if (s <= eps)
      throw DivergenceError(
          "weighted volume diverges: xi is not strictly interior to the Reeb cone");
  }
}

inline double lattice_sum_over_level(const WeightTable& w, const std::vector<double>& xi,
                                     long m) {
  const auto& entries = w.level(m);
  const double rm = static_cast<double>(w.cartier_index()) * static_cast<double>(m);
  const double cell = 1.0 / std::pow(rm, static_cast<double>(w.rank()));
  const std::size_t chunk_size = 4096;
  const std::size_t chunks = (entries.size() + chunk_size - 1) / chunk_size;
  return map_reduce_sum(chunks, [&](std::size_t c) {
    std::vector<double> local;
    local.reserve(chunk_size);
    for (std::size_t i = c * chunk_size; i < std::min(entries.size(), (c + 1) * chunk_size);
         ++i) {
      const auto& e = entries[i];
      double loc = 0;
      for (std::size_t j = 0; j < w.rank(); ++j)
        loc += static_cast<double>(e.alpha[j]) * xi[j];
      local.push_back(static_cast<double>(e.dim) * std::exp(-loc / rm));
    }
    return pairwise_sum(std::move(local)) * cell;
  });
}

}  // namespace detail

/// e^A * (1/(rm)^n) sum_alpha e^{-<alpha/(rm), xi>} dim R_{m,alpha}.
/// The error estimate compares level m against level floor(m/2) when that
/// level is present.
inline WvolResult w_lattice(const WeightTable& w, const ReebVector& xi, long m,
                            double a_shift = 0.0) {
  if (xi.rank() != w.rank()) throw ValidationError("Reeb vector rank mismatch");
  if (m <= 0) throw ValidationError("lattice level must be positive");
  if (w.reeb_cone() && !w.reeb_cone()->halfspaces().empty() &&
      xi.membership != Membership::StrictInterior)
    throw DivergenceError(
        "weighted volume diverges: xi is not strictly interior to the Reeb cone");
  WvolResult r;
  r.method = WvolMethod::Lattice;
  r.detail = m;
  const double shift = std::exp(a_shift);
  r.value = shift * detail::lattice_sum_over_level(w, xi.coords, m);
  long half = m / 2;
  if (half >= 1 && w.has_level(half))
    r.error_estimate =
        std::abs(r.value - shift * detail::lattice_sum_over_level(w, xi.coords, half));
  else
    r.error_estimate = std::numeric_limits<double>::quiet_NaN();
  return r;
}

/// Streaming variant for toric data at large m: enumerates the level
/// directly instead of materializing a table. Truncates along xi itself.
inline WvolResult w_lattice_stream(const FibrationData& f, const ReebVector& xi, long m,
                                   double truncation_budget = 40.0) {
  if (xi.rank() != f.rank()) throw ValidationError("Reeb vector rank mismatch");
  if (m <= 0) throw ValidationError("lattice level must be positive");
  const bool unbounded = !recession_cone(f.polytope()).trivial();
  if (unbounded) detail::require_integrable(f, xi.coords);

  std::optional<HalfSpace> cut;
  if (unbounded)
    cut = HalfSpace(scale(Rat(-1), rationalize(xi.coords)), rationalize(-truncation_budget));
  const Polyhedron q = cut ? f.polytope().intersect(*cut) : f.polytope();

  auto level_sum = [&](long level) {
    const double rm = static_cast<double>(f.cartier_index()) * static_cast<double>(level);
    std::vector<double> slabs;
    std::vector<double> current;
    std::int64_t slab_key = 0;
    bool first = true;
    enumerate_lattice_points(q, level, [&](const std::vector<std::int64_t>& alpha) {
      if (first || alpha[0] != slab_key) {
        if (!first) slabs.push_back(pairwise_sum(std::move(current)));
        current.clear();
        slab_key = alpha[0];
        first = false;
      }
      double loc = 0;
      for (std::size_t j = 0; j < f.rank(); ++j)
        loc += static_cast<double>(alpha[j]) * xi.coords[j];
      current.push_back(std::exp(-loc / rm));
    });
    if (!first) slabs.push_back(pairwise_sum(std::move(current)));
    return pairwise_sum(std::move(slabs)) / std::pow(rm, static_cast<double>(f.rank()));
  };

  WvolResult r;
  r.method = WvolMethod::Lattice;
  r.detail = m;
  r.value = level_sum(m);
  r.error_estimate = m / 2 >= 1 ? std::abs(r.value - level_sum(m / 2)) : 0.0;
  return r;
}

/// Exact evaluation of int_P e^{-<x,xi>} dx via the per-cell closed forms.
inline WvolResult w_exact(const FibrationData& f, const ReebVector& xi) {
  if (xi.rank() != f.rank()) throw ValidationError("Reeb vector rank mismatch");
  detail::require_integrable(f, xi.coords);
  const double eps = detail::ray_eps(f.recession_rays(), xi.coords);
  std::vector<double> contributions;
  for (const auto& cell : f.cell_geometry())
    contributions.push_back(cell_moments(cell, xi.coords, MomentOrder::Value, eps).value);
  WvolResult r;
  r.method = WvolMethod::Exact;
  r.detail = static_cast<long>(f.cell_geometry().size());
  r.value = pairwise_sum(std::move(contributions));
  r.error_estimate = std::abs(r.value) * 1e-14;
  return r;
}

/// Component j is -int_P x_j e^{-<x,xi>} dx.
inline Eigen::VectorXd grad_w(const FibrationData& f, const ReebVector& xi) {
  if (xi.rank() != f.rank()) throw ValidationError("Reeb vector rank mismatch");
  detail::require_integrable(f, xi.coords);
  const double eps = detail::ray_eps(f.recession_rays(), xi.coords);
  const std::size_t n = f.rank();
  std::vector<std::vector<double>> per_cell(n);
  for (const auto& cell : f.cell_geometry()) {
    auto m = cell_moments(cell, xi.coords, MomentOrder::Gradient, eps);
    for (std::size_t j = 0; j < n; ++j) per_cell[j].push_back(m.first[j]);
  }
  Eigen::VectorXd g(n);
  for (std::size_t j = 0; j < n; ++j) g[static_cast<long>(j)] = -pairwise_sum(per_cell[j]);
  return g;
}

/// Entry (i,j) is int_P x_i x_j e^{-<x,xi>} dx; symmetric positive definite
/// for full-dimensional P.
inline Eigen::MatrixXd hess_w(const FibrationData& f, const ReebVector& xi) {
  if (xi.rank() != f.rank()) throw ValidationError("Reeb vector rank mismatch");
  detail::require_integrable(f, xi.coords);
  const double eps = detail::ray_eps(f.recession_rays(), xi.coords);
  const std::size_t n = f.rank();
  std::vector<std::vector<double>> per_cell(n * n);
  for (const auto& cell : f.cell_geometry()) {
    auto m = cell_moments(cell, xi.coords, MomentOrder::Hessian, eps);
    for (std::size_t k = 0; k < n * n; ++k) per_cell[k].push_back(m.second[k]);
  }
  Eigen::MatrixXd h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h(static_cast<long>(i), static_cast<long>(j)) = pairwise_sum(per_cell[i * n + j]);
  return h;
}

/// Value, gradient and Hessian in one pass over the cells.
struct WvolDerivatives {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

inline WvolDerivatives w_derivatives(const FibrationData& f, const std::vector<double>& xi) {
  detail::require_integrable(f, xi);
  const double eps = detail::ray_eps(f.recession_rays(), xi);
  const std::size_t n = f.rank();
  std::vector<double> vals;
  std::vector<std::vector<double>> firsts(n), seconds(n * n);
  for (const auto& cell : f.cell_geometry()) {
    auto m = cell_moments(cell, xi, MomentOrder::Hessian, eps);
    vals.push_back(m.value);
    for (std::size_t j = 0; j < n; ++j) firsts[j].push_back(m.first[j]);
    for (std::size_t k = 0; k < n * n; ++k) seconds[k].push_back(m.second[k]);
  }
  WvolDerivatives out;
  out.value = pairwise_sum(std::move(vals));
  out.grad.resize(n);
  out.hess.resize(n, n);
  for (std::size_t j = 0; j < n; ++j) out.grad[static_cast<long>(j)] = -pairwise_sum(firsts[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.hess(static_cast<long>(i), static_cast<long>(j)) = pairwise_sum(seconds[i * n + j]);
  return out;
}

/// Stratified Monte Carlo over the decomposition cells: uniform barycentric
/// sampling on the bounded directions, uniform sampling on [0, T/b] along
/// each recession ray (the discarded tail mass is <= e^{-T} per ray factor).
/// Deterministic for a fixed seed, independent of threading.
inline WvolResult w_monte_carlo(const FibrationData& f, const ReebVector& xi, long samples,
                                std::uint64_t seed, double truncation = 30.0) {
  if (samples <= 0) throw ValidationError("sample count must be positive");
  if (truncation <= 0) throw ValidationError("truncation must be positive");
  detail::require_integrable(f, xi.coords);
  const double eps = detail::ray_eps(f.recession_rays(), xi.coords);
  const auto& cells = f.cell_geometry();
  const long per_cell = std::max<long>(1, samples / static_cast<long>(cells.size()));

  double total = 0.0, variance = 0.0;
  long used = 0;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    const std::size_t k = cell.vertices.size(), r = cell.rays.size(), n = f.rank();
    std::vector<double> b(r);
    for (std::size_t j = 0; j < r; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += cell.rays[j][i] * xi.coords[i];
      if (s <= eps) throw DivergenceError("exponential integral diverges along a recession ray");
      b[j] = s;
    }
    std::vector<double> a(k);
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0;
      for (std::size_t d = 0; d < n; ++d) s += cell.vertices[i][d] * xi.coords[d];
      a[i] = s;
    }
    double simplex_vol = 1.0;
    for (std::size_t i = 2; i < k; ++i) simplex_vol /= static_cast<double>(i);
    double ray_box = 1.0;
    for (std::size_t j = 0; j < r; ++j) ray_box *= truncation / b[j];

    std::mt19937_64 rng(seed + 1000003ULL * (ci + 1));
    std::exponential_distribution<double> expd(1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<double> draws;
    draws.reserve(per_cell);
    for (long s = 0; s < per_cell; ++s) {
      double expo = 0.0;
      if (k > 1) {
        double tot = 0.0;
        double acc = 0.0;
        std::vector<double> e(k);
        for (std::size_t i = 0; i < k; ++i) {
          e[i] = expd(rng);
          tot += e[i];
        }
        for (std::size_t i = 0; i < k; ++i) acc += (e[i] / tot) * a[i];
        expo += acc;
      } else {
        expo += a[0];
      }
      for (std::size_t j = 0; j < r; ++j) expo += unif(rng) * truncation;  // t_j * b_j
      draws.push_back(std::exp(-expo));
    }
    const double scale = cell.jacobian_abs * simplex_vol * ray_box;
    double mean = pairwise_sum(draws) / static_cast<double>(per_cell);
    double var = 0.0;
    for (double d : draws) var += (d - mean) * (d - mean);
    var /= std::max<long>(1, per_cell - 1);
    total += scale * mean;
    variance += scale * scale * var / static_cast<double>(per_cell);
    used += per_cell;
  }

  WvolResult out;
  out.method = WvolMethod::MonteCarlo;
  out.detail = used;
  out.value = total;
  out.error_estimate = std::sqrt(variance);
  return out;
}

}  // namespace fwv
