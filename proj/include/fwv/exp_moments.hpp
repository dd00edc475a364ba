/// Closed-form exponential integrals over decomposition cells.
///
/// A cell conv(v_1..v_k) + cone(u_1..u_r) with k + r = n + 1 contributes
///
///   int_cell e^{-<x,xi>} dx = |J| * dd_exp[-a_1,..,-a_k] * prod_j 1/b_j,
///
/// with a_i = <v_i,xi>, b_j = <u_j,xi> > 0, |J| the spanning determinant and
/// dd_exp the divided difference of t -> e^t (Hermite-Genocchi). First and
/// second moments follow by differentiating in the nodes, which for divided
/// differences just repeats a node.
///
/// dd_exp is evaluated as the top-right entry of the exponential of the
/// bidiagonal matrix with the nodes on the diagonal and ones above it.
/// This form is uniformly accurate for clustered and coincident nodes,
/// where the recursive formula cancels catastrophically; node collisions
/// occur in practice (symmetric fixtures evaluate on the diagonal).

#pragma once

#include "fwv/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace fwv {

/// Divided difference of t -> e^t at the given nodes (repeats allowed).
inline double dd_exp(const std::vector<double>& nodes) {
  const std::size_t d = nodes.size();
  if (d == 0) return 0.0;
  if (d == 1) return std::exp(nodes[0]);

  double lo = nodes[0], hi = nodes[0];
  for (double x : nodes) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double mu = 0.5 * (lo + hi);
  const double radius = 0.5 * (hi - lo) + 1.0;
  int squarings = 0;
  double r = radius;
  while (r > 1.0) {
    r *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);

  // N = (Z - mu I) / 2^s, upper triangular, bandwidth grows with powers.
  std::vector<double> n_mat(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) n_mat[i * d + i] = (nodes[i] - mu) * scale;
  for (std::size_t i = 0; i + 1 < d; ++i) n_mat[i * d + i + 1] = scale;

  auto mul_ut = [d](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t kk = i; kk < d; ++kk) {
        const double aik = a[i * d + kk];
        if (aik == 0.0) continue;
        for (std::size_t j = kk; j < d; ++j) c[i * d + j] += aik * b[kk * d + j];
      }
    return c;
  };

  // exp(N) by Taylor; ||N|| <= ~1.5 so 24 terms reach full precision.
  std::vector<double> result(d * d, 0.0), term(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) result[i * d + i] = term[i * d + i] = 1.0;
  for (int k = 1; k <= 24; ++k) {
    term = mul_ut(term, n_mat);
    const double inv = 1.0 / k;
    for (auto& t : term) t *= inv;
    for (std::size_t i = 0; i < d * d; ++i) result[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) result = mul_ut(result, result);

  return std::exp(mu) * result[d - 1];
}

/// One decomposition cell in double precision, ready for repeated evaluation.
struct CellGeometry {
  std::vector<std::vector<double>> vertices;  // k points
  std::vector<std::vector<double>> rays;      // r directions, k + r = n + 1
  double jacobian_abs = 0.0;
};

/// Value, gradient-level and Hessian-level moments of e^{-<x,xi>} on a cell:
///   value   = int e^{-<x,xi>}
///   first_l = int x_l e^{-<x,xi>}
///   second_{lm} = int x_l x_m e^{-<x,xi>}
struct CellMoments {
  double value = 0.0;
  std::vector<double> first;
  std::vector<double> second;  // n*n row-major, symmetric
};

enum class MomentOrder { Value, Gradient, Hessian };

inline CellMoments cell_moments(const CellGeometry& cell, const std::vector<double>& xi,
                                MomentOrder order, double ray_eps) {
  const std::size_t n = xi.size();
  const std::size_t k = cell.vertices.size();
  const std::size_t r = cell.rays.size();

  auto dot_d = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  };

  std::vector<double> nodes(k);
  for (std::size_t i = 0; i < k; ++i) nodes[i] = -dot_d(cell.vertices[i], xi);

  double ray_factor = 1.0;
  std::vector<double> b(r);
  for (std::size_t j = 0; j < r; ++j) {
    b[j] = dot_d(cell.rays[j], xi);
    if (b[j] <= ray_eps)
      throw DivergenceError("exponential integral diverges along a recession ray");
    ray_factor /= b[j];
  }

  const double common = cell.jacobian_abs * ray_factor;
  CellMoments out;
  const double g0 = dd_exp(nodes);
  out.value = common * g0;
  if (order == MomentOrder::Value) return out;

  // dG/dc_i: node i repeated once.
  std::vector<double> g1(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto ns = nodes;
    ns.push_back(nodes[i]);
    g1[i] = dd_exp(ns);
  }

  out.first.assign(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += cell.vertices[i][l] * g1[i];
    double ray_lin = 0.0;
    for (std::size_t j = 0; j < r; ++j) ray_lin += cell.rays[j][l] / b[j];
    out.first[l] = common * (acc + g0 * ray_lin);
  }
  if (order == MomentOrder::Gradient) return out;

  // d2G/dc_i dc_j: both nodes repeated; the diagonal picks up a factor 2.
  std::vector<double> g2(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      auto ns = nodes;
      ns.push_back(nodes[i]);
      ns.push_back(nodes[j]);
      double v = dd_exp(ns);
      if (i == j) v *= 2.0;
      g2[i * k + j] = g2[j * k + i] = v;
    }

  out.second.assign(n * n, 0.0);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t m = l; m < n; ++m) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          acc += cell.vertices[i][l] * cell.vertices[j][m] * g2[i * k + j];
      double cross = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double ray_l = 0.0, ray_m = 0.0;
        for (std::size_t j = 0; j < r; ++j) {
          ray_l += cell.rays[j][l] / b[j];
          ray_m += cell.rays[j][m] / b[j];
        }
        cross += g1[i] * (cell.vertices[i][l] * ray_m + cell.vertices[i][m] * ray_l);
      }
      double ray_quad = 0.0;
      for (std::size_t j = 0; j < r; ++j)
        for (std::size_t jj = 0; jj < r; ++jj) {
          double f = cell.rays[j][l] * cell.rays[jj][m] / (b[j] * b[jj]);
          if (j == jj) f *= 2.0;
          ray_quad += f;
        }
      double val = common * (acc + cross + g0 * ray_quad);
      out.second[l * n + m] = out.second[m * n + l] = val;
    }
  return out;
}

}  // namespace fwv
