#pragma once

#include <functional>
#include <vector>

namespace hom {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] to an
/// absolute tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol);

/// Integrates over [points.front(), points.back()], splitting at every
/// interior point. Use the points for kinks of the integrand.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     std::vector<double> points, double abs_tol);

}  // namespace hom
