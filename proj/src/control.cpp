#include "meanvalue/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

namespace meanvalue {

double norm(const State& y) { return std::hypot(y[0], y[1]); }
State operator+(const State& a, const State& b) { return {a[0] + b[0], a[1] + b[1]}; }
State operator-(const State& a, const State& b) { return {a[0] - b[0], a[1] - b[1]}; }
State operator*(double c, const State& a) { return {c * a[0], c * a[1]}; }
double dot(const State& a, const State& b) { return a[0] * b[0] + a[1] * b[1]; }

ControlSignal ControlSignal::constant(double u, double horizon) {
    ControlSignal s;
    s.breakpoints = {0.0};
    s.values = {u};
    s.horizon = horizon;
    return s;
}

void ControlSignal::validate() const {
    if (breakpoints.empty() || breakpoints.front() != 0.0)
        throw std::invalid_argument("control signal must start at time 0");
    if (breakpoints.size() != values.size())
        throw std::invalid_argument("control signal needs one value per segment");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (breakpoints[i] <= breakpoints[i - 1])
            throw std::invalid_argument("control breakpoints must be strictly increasing");
}

double ControlSignal::value_at(double t) const {
    std::size_t i = 0;
    while (i + 1 < breakpoints.size() && t >= breakpoints[i + 1]) ++i;
    return values[i];
}

State Trajectory::state_at(double t) const {
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double w = (t - times[i]) / (times[i + 1] - times[i]);
    return (1.0 - w) * states[i] + w * states[i + 1];
}

void Trajectory::write_csv(std::ostream& os, int dimension) const {
    os << (dimension == 2 ? "t,y1,y2,u\n" : "t,y1,u\n");
    char buf[128];
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double u = control.value_at(times[i]);
        if (dimension == 2)
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", times[i], states[i][0],
                          states[i][1], u);
        else
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", times[i], states[i][0], u);
        os << buf;
    }
}

namespace {

State rk4_step(const ControlSystem& sys, const State& y, double u, double h) {
    const State k1 = sys.vector_field(y, u);
    const State k2 = sys.vector_field(y + (0.5 * h) * k1, u);
    const State k3 = sys.vector_field(y + (0.5 * h) * k2, u);
    const State k4 = sys.vector_field(y + h * k3, u);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

State advance(const ControlSystem& sys, const State& y, double u, double h) {
    State next = sys.exact_flow ? sys.exact_flow(y, u, h) : rk4_step(sys, y, u, h);
    if (norm(next) > 1e12)
        throw std::runtime_error("integration diverged in system '" + sys.id + "'");
    return next;
}

/// Segment boundaries of u restricted to [0,T].
std::vector<double> segment_times(const ControlSignal& u, double T) {
    std::vector<double> cuts{0.0};
    for (double b : u.breakpoints)
        if (b > 0.0 && b < T) cuts.push_back(b);
    cuts.push_back(T);
    return cuts;
}

}  // namespace

Trajectory integrate(const ControlSystem& sys, const State& y0, const ControlSignal& u, double T,
                     double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("integrate: need T > 0 and dt > 0");
    u.validate();
    Trajectory traj;
    traj.control = u;
    traj.times.push_back(0.0);
    traj.states.push_back(y0);
    State y = y0;
    const std::vector<double> cuts = segment_times(u, T);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double len = cuts[s + 1] - cuts[s];
        const double uu = u.value_at(0.5 * (cuts[s] + cuts[s + 1]));
        const auto n = static_cast<long long>(std::ceil(len / dt - 1e-12));
        const double h = len / static_cast<double>(std::max<long long>(n, 1));
        for (long long i = 0; i < std::max<long long>(n, 1); ++i) {
            y = advance(sys, y, uu, h);
            traj.times.push_back(cuts[s] + static_cast<double>(i + 1) * h);
            traj.states.push_back(y);
        }
        traj.times.back() = cuts[s + 1];  // kill accumulated rounding at the seam
    }
    return traj;
}

State state_at(const ControlSystem& sys, const State& y0, const ControlSignal& u, double t,
               double dt) {
    if (t <= 0.0) return y0;
    u.validate();
    if (!sys.exact_flow) return integrate(sys, y0, u, t, dt).final_state();
    State y = y0;
    const std::vector<double> cuts = segment_times(u, t);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double uu = u.value_at(0.5 * (cuts[s] + cuts[s + 1]));
        y = advance(sys, y, uu, cuts[s + 1] - cuts[s]);
    }
    return y;
}

std::vector<State> reachable_states(const ControlSystem& sys, const State& y0, double t,
                                    int switch_budget, double dt) {
    if (sys.dimension > 2) throw std::invalid_argument("reachable_states: dimension must be <= 2");
    if (switch_budget < 0 || switch_budget > 3)
        throw std::invalid_argument("reachable_states: switch budget must be in [0,3]");
    if (!(t > 0.0)) return {y0};

    constexpr int kGrid = 8;  // switch times at multiples of t/8
    std::vector<State> found;
    auto record = [&](const State& y) {
        for (const State& z : found)
            if (std::fabs(z[0] - y[0]) <= 1e-6 && std::fabs(z[1] - y[1]) <= 1e-6) return;
        found.push_back(y);
    };

    std::vector<int> switch_slots;
    std::vector<double> seq;
    std::function<void(int, int)> pick_values = [&](int seg, int total) {
        if (seg == total) {
            ControlSignal u;
            u.horizon = t;
            u.breakpoints.push_back(0.0);
            for (int slot : switch_slots)
                u.breakpoints.push_back(t * static_cast<double>(slot) / kGrid);
            u.values = seq;
            record(state_at(sys, y0, u, t, dt));
            return;
        }
        for (double c : sys.controls) {
            if (seg > 0 && c == seq.back()) continue;  // a switch must change value
            seq.push_back(c);
            pick_values(seg + 1, total);
            seq.pop_back();
        }
    };
    std::function<void(int, int, int)> pick_slots = [&](int from, int remaining, int total) {
        if (remaining == 0) {
            pick_values(0, total + 1);
            return;
        }
        for (int slot = from; slot < kGrid; ++slot) {
            switch_slots.push_back(slot);
            pick_slots(slot + 1, remaining - 1, total);
            switch_slots.pop_back();
        }
    };
    for (int b = 0; b <= switch_budget; ++b) pick_slots(1, b, b);

    std::sort(found.begin(), found.end(), [](const State& a, const State& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    return found;
}

NonexpansiveReport check_nonexpansive(const ControlSystem& sys, int sample_pairs,
                                      std::uint64_t rng_seed) {
    State lo{{-1.0, -1.0}};
    State hi{{1.0, 1.0}};
    if (sys.has_invariant_box) {
        lo = sys.invariant_lo;
        hi = sys.invariant_hi;
    }
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> ux(lo[0], hi[0]);
    std::uniform_real_distribution<double> uy(lo[1], hi[1]);
    auto draw = [&]() -> State {
        State y{{ux(rng), 0.0}};
        if (sys.dimension == 2) y[1] = uy(rng);
        return y;
    };

    NonexpansiveReport report;
    report.worst = -1e300;
    for (int i = 0; i < sample_pairs; ++i) {
        const State y1 = draw();
        const State y2 = draw();
        const State d = y1 - y2;
        double max_over_a = -1e300;
        double arg_a = sys.controls.front();
        for (double a : sys.controls) {
            const State f1 = sys.vector_field(y1, a);
            double min_over_b = 1e300;
            for (double b : sys.controls)
                min_over_b = std::min(min_over_b, dot(d, f1 - sys.vector_field(y2, b)));
            if (min_over_b > max_over_a) {
                max_over_a = min_over_b;
                arg_a = a;
            }
        }
        if (max_over_a > report.worst) {
            report.worst = max_over_a;
            report.y1 = y1;
            report.y2 = y2;
            report.control_a = arg_a;
        }
    }
    report.pass = report.worst <= 1e-9;
    return report;
}

ContractionReport check_contraction(const ControlSystem& sys, const State& y1, const State& y2,
                                    const ControlSignal& u, double T, double dt) {
    u.validate();
    ContractionReport report;
    report.initial_gap = norm(y1 - y2);
    report.tolerance = 10.0 * dt * sys.lipschitz;
    State a_state = y1;
    State b_state = y2;
    report.max_gap = report.initial_gap;
    const std::vector<double> cuts = segment_times(u, T);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double len = cuts[s + 1] - cuts[s];
        const double a = u.value_at(0.5 * (cuts[s] + cuts[s + 1]));
        const auto n = std::max<long long>(static_cast<long long>(std::ceil(len / dt - 1e-12)), 1);
        const double h = len / static_cast<double>(n);
        for (long long i = 0; i < n; ++i) {
            const State d = a_state - b_state;
            const State fa = sys.vector_field(a_state, a);
            double best = 1e300;
            double b = sys.controls.front();
            for (double cand : sys.controls) {
                const double val = dot(d, fa - sys.vector_field(b_state, cand));
                // Ties (in particular the coincident-state case d = 0) break
                // toward mirroring the leader's control.
                const bool tie = std::fabs(val - best) <= 1e-12 &&
                                 std::fabs(cand - a) < std::fabs(b - a);
                if (val < best - 1e-12 || tie) {
                    best = val;
                    b = cand;
                }
            }
            a_state = advance(sys, a_state, a, h);
            b_state = advance(sys, b_state, b, h);
            report.max_gap = std::max(report.max_gap, norm(a_state - b_state));
        }
    }
    report.pass = report.max_gap <= report.initial_gap * (1.0 + report.tolerance) + 1e-12;
    return report;
}

RegularityReport estimate_regularity(const ControlSystem& sys, int samples, const State& lo,
                                     const State& hi, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> ux(lo[0], hi[0]);
    std::uniform_real_distribution<double> uy(lo[1], hi[1]);
    auto draw = [&]() -> State {
        State y{{ux(rng), 0.0}};
        if (sys.dimension == 2) y[1] = uy(rng);
        return y;
    };
    RegularityReport report;
    for (int i = 0; i < samples; ++i) {
        const State y = draw();
        const State z = draw();
        const double gap = norm(y - z);
        for (double u : sys.controls) {
            const State fy = sys.vector_field(y, u);
            report.a_hat = std::max(report.a_hat, norm(fy) / (1.0 + norm(y)));
            if (gap > 1e-9)
                report.l_hat = std::max(report.l_hat, norm(fy - sys.vector_field(z, u)) / gap);
        }
    }
    report.l_warning = report.l_hat > sys.lipschitz * (1.0 + 1e-9) + 1e-9;
    report.a_warning = report.a_hat > sys.growth * (1.0 + 1e-9) + 1e-9;
    return report;
}

}  // namespace meanvalue
