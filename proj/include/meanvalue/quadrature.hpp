#pragma once

#include <functional>
#include <vector>

namespace meanvalue {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // achieved error estimate
    bool converged = true;
};

/// Adaptive composite Simpson on [a,b]. The error estimate is the usual
/// Richardson bound accumulated over accepted panels.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, int max_depth = 48);

/// Integrates f over [a,b] splitting first at every breakpoint in (a,b),
/// then adaptively inside each cell. Breakpoints need not be sorted or
/// deduplicated.
QuadratureResult integrate_with_breakpoints(const std::function<double(double)>& f, double a,
                                            double b, std::vector<double> breakpoints, double tol);

}  // namespace meanvalue
