#include "meanvalue/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace meanvalue {

namespace {

struct Panel {
    double value;
    double error;
    bool converged;
};

Panel simpson_step(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                   double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) {
        return {left + right + delta / 15.0, std::fabs(delta) / 15.0, false};
    }
    if (std::fabs(delta) <= 15.0 * tol) {
        return {left + right + delta / 15.0, std::fabs(delta) / 15.0, true};
    }
    Panel pl = simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1);
    Panel pr = simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
    return {pl.value + pr.value, pl.error + pr.error, pl.converged && pr.converged};
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, int max_depth) {
    if (!(b > a)) return {0.0, 0.0, true};
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Panel p = simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
    return {p.value, p.error, p.converged};
}

QuadratureResult integrate_with_breakpoints(const std::function<double(double)>& f, double a,
                                            double b, std::vector<double> breakpoints, double tol) {
    if (!(b > a)) return {0.0, 0.0, true};
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> cuts;
    for (double x : breakpoints) {
        if (x <= a || x >= b) continue;
        if (!cuts.empty() && x - cuts.back() < 1e-13 * (b - a)) continue;
        cuts.push_back(x);
    }
    cuts.insert(cuts.begin(), a);
    cuts.push_back(b);

    QuadratureResult total;
    const double span = b - a;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        QuadratureResult r = adaptive_simpson(f, cuts[i], cuts[i + 1], tol * len / span);
        total.value += r.value;
        total.error += r.error;
        total.converged = total.converged && r.converged;
    }
    return total;
}

}  // namespace meanvalue
