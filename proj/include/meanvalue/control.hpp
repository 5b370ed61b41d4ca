#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace meanvalue {

/// State vector; one-dimensional systems use component 0 and keep component 1
/// at zero.
using State = std::array<double, 2>;

double norm(const State& y);
State operator+(const State& a, const State& b);
State operator-(const State& a, const State& b);
State operator*(double c, const State& a);
double dot(const State& a, const State& b);

/// A controlled ODE y' = f(y,u) with running cost g(y,u) in [0,1] and a finite
/// control set. Systems with closed-form segment solutions carry an exact_flow
/// used instead of the numeric one-step method.
struct ControlSystem {
    std::string id;
    int dimension = 1;
    std::vector<double> controls;

    std::function<State(const State&, double)> vector_field;
    std::function<double(const State&, double)> running_cost;
    /// (state, control, duration) -> state; empty when no closed form exists.
    std::function<State(const State&, double, double)> exact_flow;

    double lipschitz = 1.0;
    double growth = 1.0;

    bool has_invariant_box = false;
    State invariant_lo{{0.0, 0.0}};
    State invariant_hi{{0.0, 0.0}};

    /// True when the running cost along any constant-control segment is a step
    /// function of time; cost_events(y, u, len) then lists the interior times
    /// in (0, len) at which it jumps, enabling exact cost integration.
    bool piecewise_constant_cost = false;
    std::function<std::vector<double>(const State&, double, double)> cost_events;
};

/// Piecewise-constant control path. The last value is held beyond the horizon.
struct ControlSignal {
    std::vector<double> breakpoints;  // starts at 0, strictly increasing
    std::vector<double> values;       // one per segment
    double horizon = 0.0;

    static ControlSignal constant(double u, double horizon);
    double value_at(double t) const;
    std::size_t segments() const { return values.size(); }
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    ControlSignal control;

    const State& final_state() const { return states.back(); }
    State state_at(double t) const;  // linear interpolation on the grid
    void write_csv(std::ostream& os, int dimension) const;
};

/// Integrates the system on [0,T]; the grid refines a uniform dt step so that
/// no step straddles a control breakpoint. Classical 4th-order one-step method,
/// or the exact flow when the system provides one.
Trajectory integrate(const ControlSystem& sys, const State& y0, const ControlSignal& u, double T,
                     double dt);

/// Endpoint only; uses the exact flow segment-by-segment when available, else
/// falls back to full integration at the given step.
State state_at(const ControlSystem& sys, const State& y0, const ControlSignal& u, double t,
               double dt = 1e-3);

/// Endpoints at time t of all piecewise-constant controls with at most
/// switch_budget switches placed on a uniform time grid; an inner
/// approximation of the reachable set, deduplicated within 1e-6.
std::vector<State> reachable_states(const ControlSystem& sys, const State& y0, double t,
                                    int switch_budget, double dt);

struct NonexpansiveReport {
    bool pass = false;
    double worst = 0.0;  // max over samples of max_a min_b <y1-y2, f(y1,a)-f(y2,b)>
    State y1{{0.0, 0.0}};
    State y2{{0.0, 0.0}};
    double control_a = 0.0;
};

NonexpansiveReport check_nonexpansive(const ControlSystem& sys, int sample_pairs,
                                      std::uint64_t rng_seed);

struct ContractionReport {
    bool pass = false;
    double initial_gap = 0.0;
    double max_gap = 0.0;
    double tolerance = 0.0;  // 10 * dt * L, multiplicative
};

/// Integrates y1 under u and y2 under the greedy response control (each step
/// picks the control value most reducing the displacement) and checks the
/// displacement never grows beyond the stated tolerance.
ContractionReport check_contraction(const ControlSystem& sys, const State& y1, const State& y2,
                                    const ControlSignal& u, double T, double dt = 1e-3);

struct RegularityReport {
    double l_hat = 0.0;
    double a_hat = 0.0;
    bool l_warning = false;
    bool a_warning = false;
};

RegularityReport estimate_regularity(const ControlSystem& sys, int samples, const State& lo,
                                     const State& hi, std::uint64_t rng_seed);

}  // namespace meanvalue
