#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "meanvalue/evaluation.hpp"

namespace meanvalue {

/// L1 distance between the density and its left s-shift, integrated over the
/// half-line: I_s = int_0^inf |f(t+s) - f(t)| dt. Exact for piecewise-constant
/// densities, closed form for uniform and exponential, adaptive quadrature
/// otherwise. quad_error, when given, receives the achieved error estimate.
double l1_shift_distance(const Evaluation& theta, double s, double* quad_error = nullptr);

/// s-total variation: the largest discrepancy |theta(Q) - theta(Q+s)| over
/// Borel sets, equal to half the L1 distance between the density and the
/// density of the shift pushforward: TV_s = (I_s + cdf(s)) / 2.
double total_variation_shift(const Evaluation& theta, double s, double* quad_error = nullptr);

enum class TVMethod { Analytic, ScheffeQuadrature, ExactStep };

struct TVCurve {
    std::vector<double> s_grid;
    std::vector<double> tv_values;
    TVMethod method = TVMethod::Analytic;

    void write_csv(std::ostream& os) const;
};

TVCurve tv_curve(const Evaluation& theta, const std::vector<double>& s_grid);
TVMethod tv_method_for(const Evaluation& theta);

struct SupTV {
    double lower = 0.0;   // grid + golden-section refinement, a certified lower bound
    double upper = 1.0;   // heuristic subadditivity cap, clipped to 1
    double arg_s = 0.0;
};

/// sup of TV_s over s in [0,S], estimated on a uniform grid of grid_n points
/// with one golden-section refinement around the grid argmax.
SupTV sup_total_variation(const Evaluation& theta, double S, int grid_n);

struct LTCRow {
    int index = 0;
    double sup_lower = 0.0;
    double sup_upper = 1.0;
};

std::vector<LTCRow> ltc_diagnostic(const std::vector<Evaluation>& family, double S, int grid_n);

/// Total variation of a discrete evaluation on the positive integers:
/// sum_m |xi_{m+1} - xi_m| with the implicit zero tail included.
double discrete_tv(const std::vector<double>& xi);

/// Returns (I_s of the unit-bin step density with weights xi, s * discrete_tv(xi)).
std::pair<double, double> step_density_tv_identity(const std::vector<double>& xi, double s);

/// The mode t* of the folded normal density: increasing on (0,t*), decreasing
/// on (t*,inf). Zero when m^2 <= sigma^2, else the root of
/// H(t) = exp(2mt/sigma^2) - (m+t)/(m-t) on (0,m).
double folded_normal_mode(double m, double sigma);

/// Right-continuous step function on the half-line with finitely many jumps:
/// value values[i] on [breaks[i], breaks[i+1]), last value extends to infinity.
struct StepFunction {
    std::vector<double> breaks;  // breaks[0] == 0, strictly increasing
    std::vector<double> values;  // one per interval, in [0,1]

    double operator()(double x) const;
};

struct HahnBound {
    double diff_minus = 0.0;  // |int h dtheta - int_{[t,inf)} h(s-t) dtheta|
    double diff_plus = 0.0;   // |int h dtheta - int h(s+t) dtheta|
    double tv = 0.0;          // TV_t(theta)
    double tv_twice = 0.0;    // 2 TV_t(theta)
    bool pass = false;        // diff_minus <= tv and diff_plus <= 2 tv, slack 1e-9
};

HahnBound hahn_bound_check(const Evaluation& theta, double t, const StepFunction& h);

/// int h dtheta computed exactly through the CDF.
double integrate_step_function(const Evaluation& theta, const StepFunction& h);

}  // namespace meanvalue
