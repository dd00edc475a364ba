/// Futaki invariants of product and user-supplied special test
/// configurations, and K-semistability verdicts for the torus directions.
///
/// Fut_xi(eta) is the directional derivative of the weighted volume of the
/// central fiber at xi along eta. Only product configurations and
/// configurations with an explicitly supplied central fiber are handled, so
/// a "semistable" verdict certifies the torus directions only.

#pragma once

#include "fwv/minimize.hpp"
#include "fwv/wvol.hpp"

#include <map>
#include <string>
#include <utility>

namespace fwv {

enum class TestConfigurationKind { Product, SpecialWithSuppliedCentralFiber };

struct TestConfigurationData {
  const FibrationData* central_fiber = nullptr;  // for kind=Product, the original fibration
  ReebVector eta;
  TestConfigurationKind kind = TestConfigurationKind::Product;
};

inline TestConfigurationData product_configuration(const FibrationData& f, ReebVector eta) {
  return TestConfigurationData{&f, std::move(eta), TestConfigurationKind::Product};
}

inline TestConfigurationData special_configuration(const FibrationData& central_fiber,
                                                   ReebVector eta) {
  return TestConfigurationData{&central_fiber, std::move(eta),
                               TestConfigurationKind::SpecialWithSuppliedCentralFiber};
}

/// d/dt|_0 W(xi + t eta) on the central fiber, i.e. <grad W(xi), eta>.
inline double futaki(const TestConfigurationData& tc, const ReebVector& xi) {
  if (!tc.central_fiber) throw ValidationError("test configuration without a central fiber");
  if (xi.membership != Membership::StrictInterior)
    throw DivergenceError("xi must be strictly interior to the central fiber's Reeb cone");
  Eigen::VectorXd g = grad_w(*tc.central_fiber, xi);
  double s = 0;
  for (std::size_t i = 0; i < tc.eta.rank(); ++i) s += g[static_cast<long>(i)] * tc.eta.coords[i];
  return s;
}

struct StabilityVerdict {
  bool semistable_in_torus_directions = false;
  std::map<std::string, double> futaki_values;  // direction label -> Fut
  double tolerance = 0.0;
};

/// Evaluates Fut along +-e_1,...,+-e_n. Semistable iff every value is
/// >= -tol; since the directions come in opposite pairs this is equivalent
/// to ||grad W||_inf <= tol.
inline StabilityVerdict k_semistable_torus(const FibrationData& f, const ReebVector& xi,
                                           double tol) {
  if (tol <= 0) throw ValidationError("tolerance must be positive");
  if (xi.membership != Membership::StrictInterior)
    throw DivergenceError("xi must be strictly interior to the Reeb cone");
  Eigen::VectorXd g = grad_w(f, xi);
  StabilityVerdict verdict;
  verdict.tolerance = tol;
  verdict.semistable_in_torus_directions = true;
  for (std::size_t i = 0; i < f.rank(); ++i) {
    const double gi = g[static_cast<long>(i)];
    verdict.futaki_values["e" + std::to_string(i + 1)] = gi;
    verdict.futaki_values["-e" + std::to_string(i + 1)] = -gi;
    if (gi < -tol || -gi < -tol) verdict.semistable_in_torus_directions = false;
  }
  return verdict;
}

}  // namespace fwv
