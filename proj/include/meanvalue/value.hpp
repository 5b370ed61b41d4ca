#pragma once

#include <string>
#include <vector>

#include "meanvalue/control.hpp"
#include "meanvalue/evaluation.hpp"

namespace meanvalue {

enum class Bias { UpperBound, ExactOracle };

struct ValueEstimate {
    double value = 0.0;
    Bias bias = Bias::UpperBound;
    double tail_error = 0.0;
    double quad_error = 0.0;
    ControlSignal witness;
    std::string witness_id;  // oracle or candidate-family name
    bool budget_exceeded = false;
};

struct SearchConfig {
    enum class Mode { Auto, BangSwitch, GridEnumeration };
    Mode mode = Mode::Auto;
    int segments = 4;      // grid-enumeration segment count, capped at 6
    double dt = 1e-3;      // fallback integration step when no exact flow exists
    bool allow_oracle = true;
};

struct EvaluationCatalog {
    std::vector<Evaluation> members;
    std::vector<std::string> names;

    /// Uniform(0,T), Uniform(T,2T) and Exponential(1/T) for T in {1,5,25,125}.
    static EvaluationCatalog standard();
    void add(Evaluation theta, std::string name);
};

/// theta-evaluated cost of a fixed control: int g(y(s), u(s)) dtheta(s),
/// truncated at the effective support. Exact (up to the tail) for systems with
/// piecewise-constant cost along segments; adaptive quadrature otherwise.
ValueEstimate evaluate_cost(const ControlSystem& sys, const State& y0, const ControlSignal& u,
                            const Evaluation& theta);

/// Infimum of evaluate_cost over a restricted control class (bias upper_bound),
/// or a registered closed-form optimum when one applies (bias exact_oracle).
ValueEstimate value(const ControlSystem& sys, const State& y0, const Evaluation& theta,
                    const SearchConfig& search = {});

/// Value under the shift pushforward of theta by t.
ValueEstimate shifted_value(const ControlSystem& sys, const State& y0, const Evaluation& theta,
                            double t, const SearchConfig& search = {});

/// max over the catalog of min over the t grid of shifted_value: the inner min
/// over a finite grid biases up, the outer max over a finite catalog biases
/// down, so only inequalities robust to both are asserted downstream.
ValueEstimate vstar_estimate(const ControlSystem& sys, const State& y0,
                             const EvaluationCatalog& catalog, const std::vector<double>& t_grid,
                             const SearchConfig& search = {});

struct CheckReport {
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    std::string detail;
};

/// Checks V_mu(y0) <= V_{shift t}(y0) + 2 TV_t(mu) with additive slack 1e-3.
CheckReport shift_inequality_check(const ControlSystem& sys, const State& y0, const Evaluation& mu,
                                   double t, const SearchConfig& search = {});

struct SandwichReport {
    bool pass = false;
    double a = 0.0;     // max_k min_{t <= T0} shifted value
    double b_hi = 0.0;  // max over tail k of value
    double b_lo = 0.0;  // min over tail k of value
    double c = 0.0;     // max_k min over the full t grid of shifted value
    double slack = 0.0;
};

/// Desk-scale sandwich: a + slack >= b_hi >= b_lo >= c - slack, with the
/// lim sup / lim inf over k replaced by statistics over the last quarter of
/// the supplied family and slack 2e-2.
SandwichReport sandwich_check(const ControlSystem& sys, const State& y0,
                              const std::vector<Evaluation>& family, double T0,
                              const std::vector<double>& t_grid, const SearchConfig& search = {});

struct ProbeRow {
    double y0 = 0.0;
    int k = 0;
    double value = 0.0;
    double oracle = 0.0;  // max(0, 1/2 - y0 / 2k)
};

/// Value table of the horizon-k uniform evaluations for the bang-cost system;
/// each column converges to 1/2 pointwise while the diagonal stays at 0.
std::vector<ProbeRow> nonuniform_convergence_probe(const std::vector<double>& y0_grid,
                                                   const std::vector<int>& k_grid,
                                                   const SearchConfig& search = {});

}  // namespace meanvalue
