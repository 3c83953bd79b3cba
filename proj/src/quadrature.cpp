#include "hom/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hom/error.hpp"

namespace hom {
namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr unsigned kMaxDepth = 40;

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol)
{
    if (!(abs_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
    if (a == b) return {};

    // Boost terminates on error <= tol * L1; turn the absolute target into
    // a relative one from a single-panel estimate of the L1 norm.
    double l1 = 0.0;
    double err = 0.0;
    Rule::integrate(f, a, b, 0, 1.0, &err, &l1);
    const double rel_tol = std::max(abs_tol / std::max(l1, abs_tol), 1e-15);

    QuadratureResult r;
    r.value = Rule::integrate(f, a, b, kMaxDepth, rel_tol, &r.error);
    return r;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     std::vector<double> points, double abs_tol)
{
    if (points.size() < 2) throw ConfigError("need at least two integration points");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    QuadratureResult total;
    const double per_panel = abs_tol / static_cast<double>(std::max<std::size_t>(points.size() - 1, 1));
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto part = integrate(f, points[i], points[i + 1], per_panel);
        total.value += part.value;
        total.error += part.error;
    }
    return total;
}

}  // namespace hom
