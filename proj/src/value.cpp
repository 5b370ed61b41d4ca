#include "meanvalue/value.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>

#include "meanvalue/quadrature.hpp"
#include "meanvalue/systems.hpp"
#include "meanvalue/total_variation.hpp"

namespace meanvalue {

namespace {

std::string fmt(const char* pattern, double x, double y = 0.0) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, x, y);
    return buf;
}

/// Absolute segment boundaries of u restricted to [0,T].
std::vector<double> control_cuts(const ControlSignal& u, double T) {
    std::vector<double> cuts{0.0};
    for (double b : u.breakpoints)
        if (b > 0.0 && b < T) cuts.push_back(b);
    cuts.push_back(T);
    return cuts;
}

ValueEstimate exact_piecewise_cost(const ControlSystem& sys, const State& y0,
                                   const ControlSignal& u, const Evaluation& theta, double T) {
    ValueEstimate est;
    est.witness = u;
    est.bias = Bias::ExactOracle;
    est.tail_error = std::max(0.0, 1.0 - theta.cdf(T));
    double total = 0.0;
    State y = y0;
    const std::vector<double> cuts = control_cuts(u, T);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s];
        const double b = cuts[s + 1];
        const double uu = u.value_at(0.5 * (a + b));
        std::vector<double> pieces{a};
        for (double e : sys.cost_events(y, uu, b - a)) pieces.push_back(a + e);
        pieces.push_back(b);
        for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
            const double mid = 0.5 * (pieces[p] + pieces[p + 1]);
            const State ymid = sys.exact_flow(y, uu, mid - a);
            total += sys.running_cost(ymid, uu) * (theta.cdf(pieces[p + 1]) - theta.cdf(pieces[p]));
        }
        y = sys.exact_flow(y, uu, b - a);
    }
    est.value = total;
    return est;
}

ValueEstimate quadrature_cost(const ControlSystem& sys, const State& y0, const ControlSignal& u,
                              const Evaluation& theta, double T, double dt) {
    ValueEstimate est;
    est.witness = u;
    est.bias = Bias::UpperBound;
    est.tail_error = std::max(0.0, 1.0 - theta.cdf(T));

    std::function<State(double)> y_of;
    Trajectory traj;
    if (sys.exact_flow) {
        // Precompute segment start states once; each query then flows within
        // its own segment.
        const std::vector<double> cuts = control_cuts(u, T);
        std::vector<State> starts{y0};
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double uu = u.value_at(0.5 * (cuts[s] + cuts[s + 1]));
            starts.push_back(sys.exact_flow(starts.back(), uu, cuts[s + 1] - cuts[s]));
        }
        y_of = [&sys, &u, cuts, starts](double t) {
            std::size_t s = 0;
            while (s + 2 < cuts.size() && t >= cuts[s + 1]) ++s;
            const double uu = u.value_at(0.5 * (cuts[s] + cuts[s + 1]));
            return sys.exact_flow(starts[s], uu, std::min(t, cuts.back()) - cuts[s]);
        };
    } else {
        traj = integrate(sys, y0, u, T, dt);
        y_of = [&traj](double t) { return traj.state_at(t); };
    }

    auto integrand = [&](double s) {
        return sys.running_cost(y_of(s), u.value_at(s)) * theta.density(s);
    };
    std::vector<double> breakpoints = theta.density_breakpoints();
    for (double b : u.breakpoints)
        if (b > 0.0 && b < T) breakpoints.push_back(b);
    const QuadratureResult r = integrate_with_breakpoints(integrand, 0.0, T, breakpoints, 1e-9);
    est.value = r.value;
    est.quad_error = r.error;
    return est;
}

std::optional<double> bang_cost_uniform_oracle(const ControlSystem& sys, const State& y0,
                                               const Evaluation& theta) {
    if (sys.id != "bang-cost" || y0[0] < 0.0) return std::nullopt;
    const auto iv = theta.as_uniform_interval();
    if (!iv) return std::nullopt;
    const auto [a, b] = *iv;
    // Climb for tau = (b - y0)/2, then descend; cost is the theta mass seen
    // during the climb, zero afterwards.
    return std::max(0.0, b - y0[0] - 2.0 * a) / (2.0 * (b - a));
}

ControlSignal bang_cost_witness(const State& y0, double b, double horizon) {
    const double tau = std::max(0.0, (b - y0[0]) / 2.0);
    if (tau <= 0.0) return ControlSignal::constant(-1.0, horizon);
    if (tau >= horizon) return ControlSignal::constant(1.0, horizon);
    ControlSignal u;
    u.breakpoints = {0.0, tau};
    u.values = {1.0, -1.0};
    u.horizon = horizon;
    return u;
}

ControlSignal make_switch_signal(const std::vector<double>& values,
                                 const std::vector<double>& switch_times, double horizon) {
    ControlSignal u;
    u.horizon = horizon;
    u.breakpoints.push_back(0.0);
    u.values.push_back(values.front());
    for (std::size_t i = 0; i < switch_times.size(); ++i) {
        const double t = switch_times[i];
        if (t <= u.breakpoints.back() + 1e-12 * std::max(horizon, 1.0)) {
            u.values.back() = values[i + 1];  // degenerate segment collapses
            continue;
        }
        if (t >= horizon) break;
        u.breakpoints.push_back(t);
        u.values.push_back(values[i + 1]);
    }
    // Collapse adjacent equal values left by degenerate segments.
    ControlSignal clean;
    clean.horizon = horizon;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        if (!clean.values.empty() && clean.values.back() == u.values[i]) continue;
        clean.breakpoints.push_back(u.breakpoints[i]);
        clean.values.push_back(u.values[i]);
    }
    if (clean.breakpoints.empty() || clean.breakpoints.front() != 0.0) {
        clean.breakpoints.insert(clean.breakpoints.begin(), 0.0);
        if (clean.values.empty()) clean.values.push_back(values.front());
    }
    return clean;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 48) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iters && hi - lo > 1e-11 * std::max(1.0, hi); ++i) {
        if (f1 > f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 < f2 ? x1 : x2;
}

void consider(ValueEstimate& best, const ValueEstimate& cand, const std::string& id) {
    if (best.witness.values.empty() || cand.value < best.value - 1e-12) {
        best.value = cand.value;
        best.tail_error = cand.tail_error;
        best.quad_error = cand.quad_error;
        best.witness = cand.witness;
        best.witness_id = id;
    }
}

ValueEstimate bang_switch_search(const ControlSystem& sys, const State& y0,
                                 const Evaluation& theta, const SearchConfig& search) {
    (void)search;
    const double H = theta.effective_support();
    auto eval_signal = [&](const ControlSignal& u) { return evaluate_cost(sys, y0, u, theta); };
    auto eval_pattern = [&](const std::vector<double>& vals, const std::vector<double>& taus) {
        return eval_signal(make_switch_signal(vals, taus, H));
    };

    ValueEstimate best;
    best.bias = Bias::UpperBound;
    for (double c : sys.controls)
        consider(best, eval_signal(ControlSignal::constant(c, H)), fmt("constant-%g", c));

    for (double p : sys.controls) {
        for (double q : sys.controls) {
            if (p == q) continue;
            const std::vector<double> vals{p, q};
            auto h = [&](double tau) { return eval_pattern(vals, {tau}).value; };
            double best_tau = 0.0;
            double best_val = h(0.0);
            constexpr int kScan = 32;
            for (int i = 1; i <= kScan; ++i) {
                const double tau = H * static_cast<double>(i) / kScan;
                const double v = h(tau);
                if (v < best_val) {
                    best_val = v;
                    best_tau = tau;
                }
            }
            const double lo = std::max(0.0, best_tau - H / kScan);
            const double hi = std::min(H, best_tau + H / kScan);
            const double tau = golden_min(h, lo, hi);
            consider(best, eval_pattern(vals, {tau}), fmt("switch-%g-%g", p, q));

            // Two switches returning to the first value.
            const std::vector<double> vals3{p, q, p};
            auto h2 = [&](double t1, double t2) { return eval_pattern(vals3, {t1, t2}).value; };
            double b1 = 0.0, b2 = 0.0, b_val = h2(0.0, 0.0);
            constexpr int kScan2 = 16;
            for (int i = 0; i <= kScan2; ++i) {
                for (int j = i; j <= kScan2; ++j) {
                    const double t1 = H * static_cast<double>(i) / kScan2;
                    const double t2 = H * static_cast<double>(j) / kScan2;
                    const double v = h2(t1, t2);
                    if (v < b_val) {
                        b_val = v;
                        b1 = t1;
                        b2 = t2;
                    }
                }
            }
            for (int round = 0; round < 3; ++round) {
                b1 = golden_min([&](double t) { return h2(t, b2); }, std::max(0.0, b1 - H / kScan2),
                                std::min(b2, b1 + H / kScan2));
                b2 = golden_min([&](double t) { return h2(b1, t); }, std::max(b1, b2 - H / kScan2),
                                std::min(H, b2 + H / kScan2));
            }
            consider(best, eval_pattern(vals3, {b1, b2}), fmt("double-switch-%g-%g", p, q));
        }
    }
    return best;
}

ValueEstimate grid_enumeration_search(const ControlSystem& sys, const State& y0,
                                      const Evaluation& theta, const SearchConfig& search) {
    const double H = theta.effective_support();
    int n = std::clamp(search.segments, 1, 6);
    bool truncated = false;
    const double m = static_cast<double>(sys.controls.size());
    while (n > 1 && std::pow(m, n) > 20000.0) {
        --n;
        truncated = true;
    }
    ValueEstimate best;
    best.bias = Bias::UpperBound;
    best.budget_exceeded = truncated;
    std::vector<double> seq(static_cast<std::size_t>(n));
    std::function<void(int)> recurse = [&](int pos) {
        if (pos == n) {
            ControlSignal u;
            u.horizon = H;
            for (int i = 0; i < n; ++i) {
                const double t = H * static_cast<double>(i) / n;
                if (!u.values.empty() && u.values.back() == seq[static_cast<std::size_t>(i)])
                    continue;
                u.breakpoints.push_back(t);
                u.values.push_back(seq[static_cast<std::size_t>(i)]);
            }
            consider(best, evaluate_cost(sys, y0, u, theta),
                     fmt("grid-%g-segments", static_cast<double>(n)));
            return;
        }
        for (double c : sys.controls) {
            seq[static_cast<std::size_t>(pos)] = c;
            recurse(pos + 1);
        }
    };
    recurse(0);
    return best;
}

}  // namespace

void EvaluationCatalog::add(Evaluation theta, std::string name) {
    members.push_back(std::move(theta));
    names.push_back(std::move(name));
}

EvaluationCatalog EvaluationCatalog::standard() {
    EvaluationCatalog cat;
    for (double T : {1.0, 5.0, 25.0, 125.0}) {
        cat.add(Evaluation::uniform(0.0, T), fmt("uniform-0-%g", T));
        cat.add(Evaluation::uniform(T, 2.0 * T), fmt("uniform-%g-%g", T, 2.0 * T));
        cat.add(Evaluation::exponential(1.0 / T), fmt("exp-rate-%g", 1.0 / T));
    }
    return cat;
}

ValueEstimate evaluate_cost(const ControlSystem& sys, const State& y0, const ControlSignal& u,
                            const Evaluation& theta) {
    u.validate();
    const double T = theta.effective_support();
    if (u.horizon < T - 1e-9)
        throw std::invalid_argument("evaluate_cost: control horizon " + std::to_string(u.horizon) +
                                    " is shorter than the effective support " + std::to_string(T));
    if (sys.piecewise_constant_cost && sys.exact_flow && sys.cost_events)
        return exact_piecewise_cost(sys, y0, u, theta, T);
    return quadrature_cost(sys, y0, u, theta, T, 1e-3);
}

ValueEstimate value(const ControlSystem& sys, const State& y0, const Evaluation& theta,
                    const SearchConfig& search) {
    if (search.allow_oracle) {
        if (const auto oracle = bang_cost_uniform_oracle(sys, y0, theta)) {
            ValueEstimate est;
            est.value = *oracle;
            est.bias = Bias::ExactOracle;
            est.witness_id = "bang-cost-uniform-oracle";
            est.witness = bang_cost_witness(y0, theta.as_uniform_interval()->second,
                                            theta.effective_support());
            return est;
        }
    }
    SearchConfig::Mode mode = search.mode;
    if (mode == SearchConfig::Mode::Auto)
        mode = sys.controls.size() == 2 ? SearchConfig::Mode::BangSwitch
                                        : SearchConfig::Mode::GridEnumeration;
    ValueEstimate est = mode == SearchConfig::Mode::BangSwitch
                            ? bang_switch_search(sys, y0, theta, search)
                            : grid_enumeration_search(sys, y0, theta, search);
    return est;
}

ValueEstimate shifted_value(const ControlSystem& sys, const State& y0, const Evaluation& theta,
                            double t, const SearchConfig& search) {
    if (t < 0.0) throw std::invalid_argument("shifted_value: negative shift");
    return value(sys, y0, theta.shift_pushforward(t), search);
}

ValueEstimate vstar_estimate(const ControlSystem& sys, const State& y0,
                             const EvaluationCatalog& catalog, const std::vector<double>& t_grid,
                             const SearchConfig& search) {
    if (catalog.members.empty() || t_grid.empty())
        throw std::invalid_argument("vstar_estimate: empty catalog or t grid");
    ValueEstimate best;
    bool first = true;
    for (std::size_t i = 0; i < catalog.members.size(); ++i) {
        ValueEstimate inner;
        bool inner_first = true;
        double inner_t = 0.0;
        for (double t : t_grid) {
            ValueEstimate sv = shifted_value(sys, y0, catalog.members[i], t, search);
            if (inner_first || sv.value < inner.value) {
                inner = sv;
                inner_t = t;
                inner_first = false;
            }
        }
        if (first || inner.value > best.value) {
            best = inner;
            best.witness_id = catalog.names[i] + fmt("@t=%g", inner_t);
            first = false;
        }
    }
    best.bias = Bias::UpperBound;  // finite t grid biases the inner inf upward
    return best;
}

CheckReport shift_inequality_check(const ControlSystem& sys, const State& y0, const Evaluation& mu,
                                   double t, const SearchConfig& search) {
    CheckReport report;
    const ValueEstimate v = value(sys, y0, mu, search);
    const ValueEstimate vs = shifted_value(sys, y0, mu, t, search);
    const double tv = total_variation_shift(mu, t);
    report.lhs = v.value;
    report.rhs = vs.value + 2.0 * tv;
    report.slack = 1e-3;
    report.pass = report.lhs <= report.rhs + report.slack;
    report.detail = fmt("V=%.6g", v.value) + fmt(" V_shift=%.6g", vs.value) +
                    fmt(" 2TV=%.6g", 2.0 * tv) + fmt(" t=%g", t);
    return report;
}

SandwichReport sandwich_check(const ControlSystem& sys, const State& y0,
                              const std::vector<Evaluation>& family, double T0,
                              const std::vector<double>& t_grid, const SearchConfig& search) {
    if (family.empty() || t_grid.empty())
        throw std::invalid_argument("sandwich_check: empty family or t grid");
    SandwichReport report;
    report.slack = 2e-2;

    bool have_a = false, have_c = false;
    for (const Evaluation& theta : family) {
        double min_short = 0.0, min_full = 0.0;
        bool first_short = true, first_full = true;
        for (double t : t_grid) {
            const double sv = shifted_value(sys, y0, theta, t, search).value;
            if (t <= T0 + 1e-12 && (first_short || sv < min_short)) {
                min_short = sv;
                first_short = false;
            }
            if (first_full || sv < min_full) {
                min_full = sv;
                first_full = false;
            }
        }
        if (!first_short && (!have_a || min_short > report.a)) {
            report.a = min_short;
            have_a = true;
        }
        if (!have_c || min_full > report.c) {
            report.c = min_full;
            have_c = true;
        }
    }

    const std::size_t n = family.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 4);
    bool first_tail = true;
    for (std::size_t i = n - tail; i < n; ++i) {
        const double v = value(sys, y0, family[i], search).value;
        if (first_tail) {
            report.b_hi = report.b_lo = v;
            first_tail = false;
        } else {
            report.b_hi = std::max(report.b_hi, v);
            report.b_lo = std::min(report.b_lo, v);
        }
    }

    report.pass = report.a + report.slack >= report.b_hi && report.b_hi >= report.b_lo &&
                  report.b_lo >= report.c - report.slack;
    return report;
}

std::vector<ProbeRow> nonuniform_convergence_probe(const std::vector<double>& y0_grid,
                                                   const std::vector<int>& k_grid,
                                                   const SearchConfig& search) {
    const ControlSystem sys = make_system("bang-cost");
    std::vector<ProbeRow> rows;
    for (double y0 : y0_grid) {
        for (int k : k_grid) {
            ProbeRow row;
            row.y0 = y0;
            row.k = k;
            row.value =
                value(sys, {y0, 0.0}, Evaluation::uniform(0.0, static_cast<double>(k)), search)
                    .value;
            row.oracle = std::max(0.0, 0.5 - y0 / (2.0 * static_cast<double>(k)));
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace meanvalue
