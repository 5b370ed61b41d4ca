#include "meanvalue/systems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meanvalue {

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key, double def) {
    auto it = params.find(key);
    return it == params.end() ? def : it->second;
}

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

State rotate(const State& y, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * y[0] - s * y[1], s * y[0] + c * y[1]};
}

double circle_cost(const State& y) { return (1.0 + 0.5 * y[0]) / 2.0; }

ControlSystem make_rotation() {
    ControlSystem sys;
    sys.id = "rotation";
    sys.dimension = 2;
    sys.controls = {0.0};
    sys.vector_field = [](const State& y, double) -> State { return {-y[1], y[0]}; };
    sys.running_cost = [](const State& y, double) { return circle_cost(y); };
    sys.exact_flow = [](const State& y, double, double h) { return rotate(y, h); };
    sys.lipschitz = 1.0;
    sys.growth = 1.0;
    sys.has_invariant_box = true;
    sys.invariant_lo = {-1.0, -1.0};
    sys.invariant_hi = {1.0, 1.0};
    return sys;
}

ControlSystem make_rotation_controlled() {
    ControlSystem sys;
    sys.id = "rotation-controlled";
    sys.dimension = 2;
    sys.controls = {-1.0, -0.5, 0.0, 0.5, 1.0};
    sys.vector_field = [](const State& y, double u) -> State { return {-u * y[1], u * y[0]}; };
    sys.running_cost = [](const State& y, double) { return circle_cost(y); };
    sys.exact_flow = [](const State& y, double u, double h) { return rotate(y, u * h); };
    sys.lipschitz = 1.0;
    sys.growth = 1.0;
    sys.has_invariant_box = true;
    sys.invariant_lo = {-1.0, -1.0};
    sys.invariant_hi = {1.0, 1.0};
    return sys;
}

ControlSystem make_stable_point() {
    ControlSystem sys;
    sys.id = "stable-point";
    sys.dimension = 1;
    sys.controls = {-1.0, -0.5, 0.0, 0.5, 1.0};
    sys.vector_field = [](const State& y, double u) -> State { return {u - y[0], 0.0}; };
    sys.running_cost = [](const State& y, double) {
        return (std::clamp(y[0], -1.0, 1.0) + 1.0) / 2.0;
    };
    sys.exact_flow = [](const State& y, double u, double h) -> State {
        const double e = std::exp(-h);
        return {y[0] * e + u * (1.0 - e), 0.0};
    };
    sys.lipschitz = 1.0;
    sys.growth = 1.0;
    sys.has_invariant_box = true;
    sys.invariant_lo = {-1.0, 0.0};
    sys.invariant_hi = {1.0, 0.0};
    return sys;
}

ControlSystem make_drift_indicator() {
    ControlSystem sys;
    sys.id = "drift-indicator";
    sys.dimension = 1;
    sys.controls = {0.0};
    sys.vector_field = [](const State&, double) -> State { return {1.0, 0.0}; };
    // 1 on the odd unit intervals [2m-1, 2m), 0 elsewhere on the half-line.
    sys.running_cost = [](const State& y, double) {
        if (y[0] < 0.0) return 0.0;
        const auto cell = static_cast<long long>(std::floor(y[0]));
        return (cell % 2 != 0) ? 1.0 : 0.0;
    };
    sys.exact_flow = [](const State& y, double, double h) -> State { return {y[0] + h, 0.0}; };
    sys.lipschitz = 0.0;
    sys.growth = 1.0;
    sys.piecewise_constant_cost = true;
    sys.cost_events = [](const State& y, double, double len) {
        std::vector<double> events;
        double next = std::floor(y[0]) + 1.0;
        while (next - y[0] < len) {
            if (next - y[0] > 0.0) events.push_back(next - y[0]);
            next += 1.0;
        }
        return events;
    };
    return sys;
}

ControlSystem make_relax_to_one() {
    ControlSystem sys;
    sys.id = "relax-to-one";
    sys.dimension = 1;
    sys.controls = {0.0};
    sys.vector_field = [](const State& y, double) -> State { return {1.0 - y[0], 0.0}; };
    sys.running_cost = [](const State& y, double) { return clamp01(y[0]); };
    sys.exact_flow = [](const State& y, double, double h) -> State {
        return {1.0 + (y[0] - 1.0) * std::exp(-h), 0.0};
    };
    sys.lipschitz = 1.0;
    sys.growth = 1.0;
    return sys;
}

ControlSystem make_bang_cost(const std::map<std::string, double>& params) {
    ControlSystem sys;
    sys.id = "bang-cost";
    sys.dimension = 1;
    sys.controls = {-1.0, 1.0};
    const double K = param_or(params, "K", 10.0);
    const bool regularized = param_or(params, "regularized", 0.0) != 0.0;
    sys.running_cost = [K](const State& y, double u) {
        if (y[0] < 0.0) return K;
        return u > 0.0 ? 1.0 : 0.0;
    };
    if (regularized) {
        sys.vector_field = [](const State& y, double u) -> State {
            if (y[0] < 0.0) return {-1.0, 0.0};
            if (u > 0.0 && y[0] <= 1.0) return {y[0], 0.0};
            return {u, 0.0};
        };
        sys.lipschitz = 1.0;
        sys.growth = 1.0;
        return sys;
    }
    sys.vector_field = [](const State& y, double u) -> State {
        if (y[0] < 0.0) return {-1.0, 0.0};
        return {u, 0.0};
    };
    sys.exact_flow = [](const State& y, double u, double h) -> State {
        if (u > 0.0 && y[0] >= 0.0) return {y[0] + h, 0.0};
        return {y[0] - h, 0.0};
    };
    sys.lipschitz = 1.0;  // valid on each half-line; the field jumps at zero
    sys.growth = 1.0;
    sys.piecewise_constant_cost = true;
    sys.cost_events = [](const State& y, double u, double len) {
        std::vector<double> events;
        if (u < 0.0 && y[0] > 0.0 && y[0] < len) events.push_back(y[0]);
        return events;
    };
    return sys;
}

ControlSystem make_expanding() {
    ControlSystem sys;
    sys.id = "expanding";
    sys.dimension = 1;
    sys.controls = {0.0};
    sys.vector_field = [](const State& y, double) -> State { return {y[0], 0.0}; };
    sys.running_cost = [](const State&, double) { return 0.5; };
    sys.exact_flow = [](const State& y, double, double h) -> State {
        return {y[0] * std::exp(h), 0.0};
    };
    sys.lipschitz = 1.0;
    sys.growth = 1.0;
    return sys;
}

}  // namespace

ControlSystem make_system(const std::string& id, const std::map<std::string, double>& params) {
    if (id == "rotation") return make_rotation();
    if (id == "rotation-controlled") return make_rotation_controlled();
    if (id == "stable-point") return make_stable_point();
    if (id == "drift-indicator") return make_drift_indicator();
    if (id == "relax-to-one") return make_relax_to_one();
    if (id == "bang-cost") return make_bang_cost(params);
    if (id == "expanding") return make_expanding();
    throw std::invalid_argument("unknown system id '" + id + "'");
}

const std::vector<std::string>& builtin_system_ids() {
    static const std::vector<std::string> ids = {
        "rotation",     "rotation-controlled", "stable-point", "drift-indicator",
        "relax-to-one", "bang-cost",           "expanding"};
    return ids;
}

}  // namespace meanvalue
