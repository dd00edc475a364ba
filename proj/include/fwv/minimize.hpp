/// Damped Newton minimization of the weighted volume over the open Reeb
/// cone. Strict convexity makes any interior critical point the unique
/// minimum, so the solver only has to stay feasible and descend: Newton step,
/// Armijo backtracking, and a fraction-to-boundary cap keeping every iterate
/// strictly inside the cone.

#pragma once

#include "fwv/wvol.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fwv {

enum class MinimizeStatus { Converged, DivergedToBoundary, MaxIterations };

inline const char* minimize_status_name(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::Converged: return "converged";
    case MinimizeStatus::DivergedToBoundary: return "diverged-to-boundary";
    default: return "max-iterations";
  }
}

struct TracePoint {
  std::vector<double> xi;
  double value;
  double grad_norm;
};

struct MinimizationReport {
  std::vector<double> xi_star;
  Membership membership = Membership::StrictInterior;
  double w_star = 0.0;
  double grad_norm = 0.0;
  double hess_min_eig = 0.0;
  long iterations = 0;
  std::vector<TracePoint> trace;
  MinimizeStatus status = MinimizeStatus::MaxIterations;
};

namespace detail {

struct NewtonProblem {
  // value, gradient, Hessian at xi
  std::function<void(const std::vector<double>&, double&, Eigen::VectorXd&, Eigen::MatrixXd&)>
      eval;
  std::function<double(const std::vector<double>&)> value;
  // strict feasibility constraints <u, xi> > 0 (empty for a bounded polytope)
  std::vector<std::vector<double>> rays;
};

constexpr double kArmijo = 1e-4;
constexpr double kBoundaryFraction = 0.05;
constexpr double kBoundaryEps = 1e-8;
constexpr int kBoundaryStreak = 5;

inline double ray_value(const std::vector<double>& u, const std::vector<double>& x) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += u[i] * x[i];
  return s;
}

inline MinimizationReport newton_minimize(const NewtonProblem& prob, std::vector<double> xi,
                                          double tol, long max_iter) {
  if (tol <= 0) throw ValidationError("tolerance must be positive");
  if (max_iter <= 0) throw ValidationError("iteration budget must be positive");
  for (const auto& u : prob.rays)
    if (ray_value(u, xi) <= 0)
      throw ValidationError("starting point is not strictly interior to the Reeb cone");

  const std::size_t n = xi.size();
  MinimizationReport rep;
  int boundary_streak = 0;

  double value = 0;
  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);
  for (long iter = 1; iter <= max_iter; ++iter) {
    prob.eval(xi, value, grad, hess);
    const double gnorm = grad.norm();
    rep.trace.push_back(TracePoint{xi, value, gnorm});
    rep.iterations = iter;

    if (gnorm <= tol) {
      rep.status = MinimizeStatus::Converged;
      break;
    }

    double min_ray = std::numeric_limits<double>::infinity();
    for (const auto& u : prob.rays) min_ray = std::min(min_ray, ray_value(u, xi));
    if (!prob.rays.empty() && min_ray < kBoundaryEps) {
      if (++boundary_streak >= kBoundaryStreak) {
        rep.status = MinimizeStatus::DivergedToBoundary;
        break;
      }
    } else {
      boundary_streak = 0;
    }

    Eigen::VectorXd d = -hess.ldlt().solve(grad);
    if (!d.allFinite() || grad.dot(d) >= 0) d = -grad;

    // Fraction-to-boundary: keep <u, xi + s d> >= kBoundaryFraction * <u, xi>.
    double s_max = 1.0;
    for (const auto& u : prob.rays) {
      double ud = 0, ux = ray_value(u, xi);
      for (std::size_t i = 0; i < n; ++i) ud += u[i] * d[static_cast<long>(i)];
      if (ud < 0) s_max = std::min(s_max, -(1.0 - kBoundaryFraction) * ux / ud);
    }

    const double slope = grad.dot(d);
    double step = s_max;
    std::vector<double> trial(n);
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = xi[i] + step * d[static_cast<long>(i)];
      double trial_value = prob.value(trial);
      if (std::isfinite(trial_value) && trial_value <= value + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      rep.status = MinimizeStatus::MaxIterations;
      break;
    }
    xi = trial;
  }

  prob.eval(xi, value, grad, hess);
  rep.xi_star = xi;
  rep.w_star = value;
  rep.grad_norm = grad.norm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
  rep.hess_min_eig = es.eigenvalues().minCoeff();
  double min_ray = std::numeric_limits<double>::infinity();
  for (const auto& u : prob.rays) min_ray = std::min(min_ray, ray_value(u, xi));
  rep.membership = prob.rays.empty() || min_ray > 0 ? Membership::StrictInterior
                                                    : Membership::Boundary;
  return rep;
}

}  // namespace detail

/// Deterministic strictly interior default start: the sum of the normalized
/// Reeb-cone rays, or the origin when the cone is all of Lie(T).
inline std::vector<double> default_start(const FibrationData& f) {
  const auto& rays = f.reeb_cone().generators();
  std::vector<double> x(f.rank(), 0.0);
  for (const auto& r : rays) {
    auto rd = to_doubles(r);
    double norm = 0;
    for (double c : rd) norm += c * c;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += rd[i] / norm;
  }
  return x;
}

/// Finds the unique minimizer of W over the open Reeb cone.
inline MinimizationReport minimize_w(const FibrationData& f, const ReebVector& xi0, double tol,
                                     long max_iter = 200) {
  if (xi0.rank() != f.rank()) throw ValidationError("start vector rank mismatch");
  if (xi0.membership != Membership::StrictInterior)
    throw ValidationError("starting point is not strictly interior to the Reeb cone");
  detail::NewtonProblem prob;
  prob.rays = f.recession_rays();
  prob.eval = [&f](const std::vector<double>& x, double& v, Eigen::VectorXd& g,
                   Eigen::MatrixXd& h) {
    auto d = w_derivatives(f, x);
    v = d.value;
    g = d.grad;
    h = d.hess;
  };
  prob.value = [&f](const std::vector<double>& x) {
    try {
      return w_exact(f, ReebVector::free_vector(x)).value;
    } catch (const DivergenceError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  return detail::newton_minimize(prob, xi0.coords, tol, max_iter);
}

inline MinimizationReport minimize_w(const FibrationData& f, double tol, long max_iter = 200) {
  return minimize_w(f, f.reeb_vector(default_start(f)), tol, max_iter);
}

}  // namespace fwv
