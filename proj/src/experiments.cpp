#include "meanvalue/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "meanvalue/control.hpp"
#include "meanvalue/evaluation.hpp"
#include "meanvalue/systems.hpp"
#include "meanvalue/total_variation.hpp"
#include "meanvalue/value.hpp"

namespace fs = std::filesystem;

namespace meanvalue {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double getp(const ExperimentConfig& cfg, const std::string& key, double def) {
    auto it = cfg.params.find(key);
    return it == cfg.params.end() ? def : it->second;
}

void check(ExperimentResult& r, bool ok, const std::string& what) {
    r.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
    if (!ok) r.pass = false;
}

class Csv {
public:
    Csv(ExperimentResult& result, const ExperimentConfig& cfg, const std::string& name,
        const std::string& header)
        : path_((fs::path(cfg.out_dir) / name).string()), os_(path_, std::ios::binary) {
        if (!os_) throw std::runtime_error("cannot open artifact file " + path_);
        os_ << header << "\n";
        result.artifacts.push_back(path_);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << "\n";
    }

private:
    std::string path_;
    std::ofstream os_;
};

const char* method_name(TVMethod m) {
    switch (m) {
        case TVMethod::Analytic: return "analytic";
        case TVMethod::ScheffeQuadrature: return "scheffe_quadrature";
        case TVMethod::ExactStep: return "exact_step";
    }
    return "?";
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    return out;
}

// ---------------------------------------------------------------- tv-curves

ExperimentResult exp_tv_curves(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const std::vector<std::pair<std::string, Evaluation>> families = {
        {"uniform-0-2", Evaluation::uniform(0.0, 2.0)},
        {"uniform-0-10", Evaluation::uniform(0.0, 10.0)},
        {"exp-0.1", Evaluation::exponential(0.1)},
        {"exp-1", Evaluation::exponential(1.0)},
        {"folded-0-5", Evaluation::folded_normal(0.0, 5.0)},
        {"folded-3-1", Evaluation::folded_normal(3.0, 1.0)},
        {"comb-2", Evaluation::comb(2)},
        {"comb-4", Evaluation::comb(4)},
    };
    const std::vector<double> s_grid = linspace(0.0, 1.0, 33);
    Csv csv(r, cfg, "tv_curves.csv", "family,s,tv,method");
    for (const auto& [name, theta] : families) {
        const TVCurve curve = tv_curve(theta, s_grid);
        bool in_range = true;
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
            csv.row({name, num(curve.s_grid[i]), num(curve.tv_values[i]),
                     method_name(curve.method)});
            in_range = in_range && curve.tv_values[i] >= 0.0 && curve.tv_values[i] <= 1.0;
        }
        check(r, curve.tv_values.front() == 0.0, name + ": tv(0) = 0");
        check(r, in_range, name + ": all tv values in [0,1]");
        if (name == "uniform-0-10") {
            double worst = 0.0;
            for (std::size_t i = 0; i < s_grid.size(); ++i)
                worst = std::max(worst, std::fabs(curve.tv_values[i] - s_grid[i] / 10.0));
            check(r, worst <= 1e-12, name + ": tv = s/10 (max dev " + num(worst) + ")");
        }
        if (name == "exp-1") {
            double worst = 0.0;
            for (std::size_t i = 0; i < s_grid.size(); ++i)
                worst = std::max(worst,
                                 std::fabs(curve.tv_values[i] - (1.0 - std::exp(-s_grid[i]))));
            check(r, worst <= 1e-9, name + ": tv matches closed form (max dev " + num(worst) + ")");
        }
    }
    return r;
}

// -------------------------------------------------------------- ltc-families

ExperimentResult exp_ltc_families(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const int k_max = static_cast<int>(getp(cfg, "k_max", 20));
    const int grid_n = static_cast<int>(getp(cfg, "grid_n", 33));
    Csv csv(r, cfg, "ltc_families.csv", "family,k,sup_lower,sup_upper");

    auto run_family = [&](const std::string& name,
                          const std::function<Evaluation(int)>& make) -> std::vector<double> {
        std::vector<Evaluation> family;
        for (int k = 1; k <= k_max; ++k) family.push_back(make(k));
        const auto rows = ltc_diagnostic(family, 1.0, grid_n);
        std::vector<double> lowers;
        for (const auto& row : rows) {
            csv.row({name, num(row.index), num(row.sup_lower), num(row.sup_upper)});
            lowers.push_back(row.sup_lower);
        }
        return lowers;
    };

    const auto uni = run_family("uniform-0-k", [](int k) {
        return Evaluation::uniform(0.0, static_cast<double>(k));
    });
    const auto expo = run_family("exp-rate-1/k", [](int k) {
        return Evaluation::exponential(1.0 / static_cast<double>(k));
    });
    const auto folded_wide = run_family("folded-m0-sigma-k", [](int k) {
        return Evaluation::folded_normal(0.0, static_cast<double>(k));
    });
    const auto folded_far = run_family("folded-m-k-sigma-1", [](int k) {
        return Evaluation::folded_normal(static_cast<double>(k), 1.0);
    });

    bool uni_ok = true, expo_ok = true, wide_ok = true, far_ok = true;
    for (int k = 1; k <= k_max; ++k) {
        const std::size_t i = static_cast<std::size_t>(k - 1);
        uni_ok = uni_ok && std::fabs(uni[i] - 1.0 / k) <= 1e-9;
        expo_ok = expo_ok && std::fabs(expo[i] - (1.0 - std::exp(-1.0 / k))) <= 1e-9;
        wide_ok = wide_ok &&
                  folded_wide[i] <= 2.0 / (k * std::sqrt(2.0 * M_PI)) * 1.1 + 1e-9;
        far_ok = far_ok && folded_far[i] >= 0.1;
    }
    check(r, uni_ok, "uniform family: sup TV = 1/k");
    check(r, expo_ok, "exponential family: sup TV = 1 - exp(-1/k)");
    check(r, wide_ok, "wide folded family: sup TV within the sigma bound");
    check(r, far_ok, "drifting folded family: sup TV stays >= 0.1");
    return r;
}

// ------------------------------------------------------------- discrete-link

ExperimentResult exp_discrete_link(const ExperimentConfig& cfg) {
    ExperimentResult r;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> len_dist(1, 20);
    std::uniform_real_distribution<double> w_dist(0.0, 1.0);
    Csv csv(r, cfg, "discrete_link.csv", "case,len,s,i_s,product,diff");
    double worst = 0.0;
    const int cases = static_cast<int>(getp(cfg, "cases", 100));
    for (int c = 0; c < cases; ++c) {
        const int len = len_dist(rng);
        std::vector<double> xi(static_cast<std::size_t>(len));
        double sum = 0.0;
        for (double& w : xi) {
            w = w_dist(rng);
            sum += w;
        }
        for (double& w : xi) w /= sum;
        for (int i = 0; i <= 10; ++i) {
            const double s = static_cast<double>(i) / 10.0;
            const auto [i_s, product] = step_density_tv_identity(xi, s);
            const double diff = std::fabs(i_s - product);
            worst = std::max(worst, diff);
            csv.row({num(c), num(len), num(s), num(i_s), num(product), num(diff)});
        }
    }
    check(r, worst <= 1e-12, "step identity holds to 1e-12 (worst " + num(worst) + ")");
    return r;
}

// ------------------------------------------------------------------- ex-0-1

std::vector<double> indicator_weights(int k, bool odd) {
    std::vector<double> w(static_cast<std::size_t>(2 * k), 0.0);
    for (int m = 1; m <= k; ++m)
        w[static_cast<std::size_t>(odd ? 2 * m - 1 : 2 * m - 2)] = 1.0 / k;
    return w;
}

ExperimentResult exp_ex_0_1(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const ControlSystem sys = make_system("drift-indicator");
    Csv csv(r, cfg, "ex_0_1.csv", "k,v_mu,v_nu");
    bool ok = true;
    for (int k : {1, 5, 20}) {
        const Evaluation mu = Evaluation::step_density(indicator_weights(k, true));
        const Evaluation nu = Evaluation::step_density(indicator_weights(k, false));
        const double v_mu = value(sys, {0.0, 0.0}, mu).value;
        const double v_nu = value(sys, {0.0, 0.0}, nu).value;
        csv.row({num(k), num(v_mu), num(v_nu)});
        ok = ok && std::fabs(v_mu - 1.0) <= 1e-6 && std::fabs(v_nu) <= 1e-6;
    }
    check(r, ok, "indicator values: V_mu = 1 and V_nu = 0");
    return r;
}

// ------------------------------------------------------------------ rotation

ExperimentResult exp_rotation(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const ControlSystem sys = make_system("rotation");
    Csv csv(r, cfg, "rotation.csv", "T,value,error_bound");
    for (double T : {10.0, 100.0}) {
        const double v = value(sys, {1.0, 0.0}, Evaluation::uniform(0.0, T)).value;
        const double bound = 2.0 * M_PI / T;
        csv.row({num(T), num(v), num(bound)});
        check(r, std::fabs(v - 0.5) <= bound,
              "T=" + num(T) + ": value " + num(v) + " within " + num(bound) + " of 1/2");
    }

    const ControlSignal u = ControlSignal::constant(0.0, 100.0);
    const Trajectory exact = integrate(sys, {1.0, 0.0}, u, 100.0, 1e-3);
    double dev_exact = 0.0;
    for (const State& y : exact.states) dev_exact = std::max(dev_exact, std::fabs(norm(y) - 1.0));
    check(r, dev_exact <= 1e-9, "exact flow conserves the norm (dev " + num(dev_exact) + ")");

    ControlSystem numeric = sys;
    numeric.exact_flow = nullptr;
    const Trajectory rk = integrate(numeric, {1.0, 0.0}, u, 100.0, 1e-3);
    double dev_rk = 0.0;
    for (const State& y : rk.states) dev_rk = std::max(dev_rk, std::fabs(norm(y) - 1.0));
    check(r, dev_rk <= 1e-6, "numeric path conserves the norm (dev " + num(dev_rk) + ")");
    return r;
}

// ----------------------------------------------------------------- counter-1

ExperimentResult exp_counter_1(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const ControlSystem sys = make_system("relax-to-one");
    Csv csv(r, cfg, "counter_1.csv", "quantity,value");

    // A far-out evaluation pins the shifted value near 1.
    const Evaluation far = Evaluation::uniform(5.0, 10.0);
    double min_shifted = 1e300;
    for (double t : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        min_shifted = std::min(min_shifted, shifted_value(sys, {0.0, 0.0}, far, t).value);
    }
    csv.row({"min_shifted_value_far_evaluation", num(min_shifted)});
    check(r, min_shifted >= 0.98, "min shifted value " + num(min_shifted) + " >= 0.98");

    // A fixed-rate exponential keeps the value away from 1.
    const Evaluation abel = Evaluation::exponential(1.0);
    const double v = value(sys, {0.0, 0.0}, abel).value;
    const double eta = abel.cdf(1.0);
    const double y1 = 1.0 - std::exp(-1.0);
    const double bound = y1 * eta + (1.0 - eta) + 1e-3;
    csv.row({"value_fixed_rate_exponential", num(v)});
    csv.row({"upper_bound", num(bound)});
    check(r, v <= bound, "exponential value " + num(v) + " <= bound " + num(bound));
    return r;
}

// ----------------------------------------------------------------- counter-2

ExperimentResult exp_counter_2(const ExperimentConfig& cfg) {
    ExperimentResult r;
    std::map<std::string, double> sys_params{{"K", getp(cfg, "K", 10.0)}};
    const ControlSystem sys = make_system("bang-cost", sys_params);
    SearchConfig no_oracle;
    no_oracle.allow_oracle = false;

    Csv table(r, cfg, "counter_2_table.csv", "k,y0,value_search,value_oracle,reference");
    bool table_ok = true;
    for (int k : {10, 50}) {
        for (double y0 : {0.0, 1.0, 5.0, static_cast<double>(k)}) {
            const Evaluation theta = Evaluation::uniform(0.0, static_cast<double>(k));
            const double ref = std::max(0.0, 0.5 - y0 / (2.0 * k));
            const double vs = value(sys, {y0, 0.0}, theta, no_oracle).value;
            const double vo = value(sys, {y0, 0.0}, theta).value;
            table.row({num(k), num(y0), num(vs), num(vo), num(ref)});
            table_ok = table_ok && std::fabs(vs - ref) <= 1e-3 && std::fabs(vo - ref) <= 1e-12;
        }
    }
    check(r, table_ok, "horizon-k uniform values match max(0, 1/2 - y0/2k)");

    bool shifted_ok = true;
    for (int k : {10, 50}) {
        const Evaluation theta = Evaluation::uniform(static_cast<double>(k), 2.0 * k);
        const double vs = value(sys, {0.0, 0.0}, theta, no_oracle).value;
        shifted_ok = shifted_ok && std::fabs(vs) <= 1e-6;
    }
    check(r, shifted_ok, "late-window uniform values vanish");

    const std::vector<double> t_grid = {0.0, 1.0,  2.0,  5.0,   10.0,  20.0,
                                        50.0, 100.0, 200.0, 400.0, 700.0, 1000.0};
    const double vstar = vstar_estimate(sys, {0.0, 0.0}, EvaluationCatalog::standard(), t_grid).value;
    Csv vcsv(r, cfg, "counter_2_vstar.csv", "quantity,value");
    vcsv.row({"vstar_estimate", num(vstar)});
    check(r, vstar <= 0.05, "vstar estimate " + num(vstar) + " <= 0.05");

    Csv probe(r, cfg, "counter_2_probe.csv", "y0,k,value,reference");
    bool probe_ok = true;
    const auto rows = nonuniform_convergence_probe({0.0, 1.0, 5.0}, {10, 20, 50});
    for (const auto& row : rows) {
        probe.row({num(row.y0), num(row.k), num(row.value), num(row.oracle)});
        probe_ok = probe_ok && std::fabs(row.value - row.oracle) <= 1e-9;
    }
    for (int k : {10, 20}) {
        const double diag =
            value(sys, {static_cast<double>(k), 0.0},
                  Evaluation::uniform(0.0, static_cast<double>(k)), no_oracle)
                .value;
        probe.row({num(k), num(k), num(diag), "0"});
        probe_ok = probe_ok && std::fabs(diag) <= 1e-6;
    }
    check(r, probe_ok, "pointwise table and vanishing diagonal");
    return r;
}

// -------------------------------------------------------------- nonexpansive

ExperimentResult exp_nonexpansive(const ExperimentConfig& cfg) {
    ExperimentResult r;
    Csv csv(r, cfg, "nonexpansive.csv", "system,check,metric,pass");

    for (const char* id : {"rotation", "rotation-controlled", "stable-point"}) {
        const ControlSystem sys = make_system(id);
        const NonexpansiveReport rep = check_nonexpansive(sys, 200, cfg.seed);
        csv.row({id, "nonexpansive", num(rep.worst), rep.pass ? "1" : "0"});
        check(r, rep.pass, std::string(id) + ": nonexpansive (worst " + num(rep.worst) + ")");
    }
    {
        const ControlSystem sys = make_system("expanding");
        const NonexpansiveReport rep = check_nonexpansive(sys, 200, cfg.seed);
        csv.row({"expanding", "nonexpansive", num(rep.worst), rep.pass ? "1" : "0"});
        check(r, !rep.pass && rep.worst > 0.0,
              "expanding fixture fails with certificate " + num(rep.worst));
    }

    std::mt19937_64 rng(cfg.seed);
    for (const char* id : {"rotation", "rotation-controlled", "stable-point"}) {
        const ControlSystem sys = make_system(id);
        std::uniform_real_distribution<double> box(-1.0, 1.0);
        std::uniform_int_distribution<std::size_t> pick(0, sys.controls.size() - 1);
        bool all_ok = true;
        double worst_gap = 0.0;
        const int pairs = static_cast<int>(getp(cfg, "pairs", 50));
        for (int i = 0; i < pairs; ++i) {
            State y1{{box(rng), sys.dimension == 2 ? box(rng) : 0.0}};
            State y2{{box(rng), sys.dimension == 2 ? box(rng) : 0.0}};
            ControlSignal u;
            u.horizon = 5.0;
            u.breakpoints = {0.0, 1.5, 3.0, 4.0};
            u.values = {sys.controls[pick(rng)], sys.controls[pick(rng)],
                        sys.controls[pick(rng)], sys.controls[pick(rng)]};
            const ContractionReport rep = check_contraction(sys, y1, y2, u, 5.0, 1e-3);
            all_ok = all_ok && rep.pass;
            if (rep.initial_gap > 0.0)
                worst_gap = std::max(worst_gap, rep.max_gap / rep.initial_gap - 1.0);
        }
        csv.row({id, "contraction", num(worst_gap), all_ok ? "1" : "0"});
        check(r, all_ok, std::string(id) + ": displacement nonincreasing (worst rel growth " +
                             num(worst_gap) + ")");
    }

    {
        const ControlSystem sys = make_system("stable-point");
        const RegularityReport rep = estimate_regularity(sys, 500, {-2.0, 0.0}, {2.0, 0.0},
                                                         cfg.seed);
        csv.row({"stable-point", "lipschitz", num(rep.l_hat), rep.l_warning ? "0" : "1"});
        check(r, rep.l_hat <= 1.0 + 1e-9, "stable-point: empirical Lipschitz <= 1");
    }
    {
        const ControlSystem sys = make_system("bang-cost");
        const RegularityReport rep = estimate_regularity(sys, 2000, {-0.5, 0.0}, {0.5, 0.0},
                                                         cfg.seed);
        csv.row({"bang-cost", "lipschitz", num(rep.l_hat), rep.l_warning ? "1" : "0"});
        check(r, rep.l_warning && rep.l_hat > 10.0,
              "bang-cost: discontinuity flagged (L_hat " + num(rep.l_hat) + ")");
    }
    return r;
}

// ------------------------------------------------------------------ ltc-prime

ExperimentResult exp_ltc_prime(const ExperimentConfig& cfg) {
    ExperimentResult r;
    Csv csv(r, cfg, "ltc_prime.csv", "quantity,k,s,value,bound");

    bool comb_ok = true;
    for (int k : {2, 4, 8}) {
        const Evaluation comb = Evaluation::comb(k);
        const double s = 1.0 / k;
        const double i_s = l1_shift_distance(comb, s);
        const double expected = 2.0 - 2.0 / (static_cast<double>(k) * k);
        csv.row({"i_s_comb", num(k), num(s), num(i_s), num(2.0 - 1.0 / k)});
        comb_ok = comb_ok && i_s >= 2.0 - 1.0 / k - 1e-9 &&
                  std::fabs(i_s - expected) <= 1e-9;
        const SupTV sup = sup_total_variation(comb, 1.0, 129);
        csv.row({"sup_tv_comb", num(k), num(1.0), num(sup.lower), num(1.0 - 0.5 / k)});
        comb_ok = comb_ok && sup.lower >= 1.0 - 0.5 / k - 1e-9;
    }
    check(r, comb_ok, "comb shift distance at s = 1/k stays near 2");

    bool sliver_ok = true;
    const int n_max = static_cast<int>(getp(cfg, "n_max", 5));
    for (int n = 4; n <= n_max; ++n) {
        double factorial = 1.0;
        for (int i = 2; i <= n; ++i) factorial *= i;
        const int k = static_cast<int>(factorial);
        const Evaluation comb = Evaluation::comb(k);
        const double i_half = l1_shift_distance(comb, 0.5);
        csv.row({"i_half_comb_factorial", num(n), num(0.5), num(i_half), num(2.0 / factorial)});
        sliver_ok = sliver_ok && i_half <= 2.0 / factorial + 1e-12;

        const double s_even = 2.0 / factorial;  // an even number of lattice cells
        const double i_even = l1_shift_distance(comb, s_even);
        csv.row({"i_even_shift", num(n), num(s_even), num(i_even), num(4.0 * s_even / factorial)});
        sliver_ok = sliver_ok && i_even <= 4.0 * s_even / factorial + 1e-12;
    }
    check(r, sliver_ok, "factorial combs: even shifts leave only the boundary sliver");
    return r;
}

// --------------------------------------------------------------- inequalities

ExperimentResult exp_inequalities(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const EvaluationCatalog catalog = EvaluationCatalog::standard();
    std::mt19937_64 rng(cfg.seed);

    {  // Randomized step-function bound sweep.
        std::uniform_int_distribution<std::size_t> pick(0, catalog.members.size() - 1);
        std::uniform_real_distribution<double> t_dist(0.0, 2.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        bool all_ok = true;
        double worst_margin = 1e300;
        const int cases = static_cast<int>(getp(cfg, "hahn_cases", 1000));
        for (int c = 0; c < cases; ++c) {
            const Evaluation& theta = catalog.members[pick(rng)];
            const double t = t_dist(rng);
            const double span = theta.effective_support() * 1.2 + 2.0;
            StepFunction h;
            std::vector<double> cuts;
            for (int i = 0; i < 9; ++i) cuts.push_back(span * unit(rng));
            std::sort(cuts.begin(), cuts.end());
            h.breaks.push_back(0.0);
            for (double cut : cuts)
                if (cut > h.breaks.back() + 1e-9) h.breaks.push_back(cut);
            for (std::size_t i = 0; i < h.breaks.size(); ++i) h.values.push_back(unit(rng));
            const HahnBound hb = hahn_bound_check(theta, t, h);
            all_ok = all_ok && hb.pass;
            worst_margin = std::min(worst_margin,
                                    std::min(hb.tv - hb.diff_minus, hb.tv_twice - hb.diff_plus));
        }
        Csv csv(r, cfg, "hahn_sweep.csv", "cases,worst_margin,pass");
        csv.row({num(cases), num(worst_margin), all_ok ? "1" : "0"});
        check(r, all_ok, "step-function bounds hold on randomized sweep (worst margin " +
                             num(worst_margin) + ")");
    }

    {  // Value-level shift inequality across builtin systems.
        Csv csv(r, cfg, "shift_inequality.csv", "system,evaluation,t,lhs,rhs,pass");
        SearchConfig quick;
        quick.segments = 2;
        bool all_ok = true;
        for (const char* id : {"rotation", "rotation-controlled", "stable-point",
                               "relax-to-one", "drift-indicator", "bang-cost"}) {
            const ControlSystem sys = make_system(id);
            const State y0 = sys.dimension == 2 ? State{{1.0, 0.0}} : State{{0.5, 0.0}};
            for (std::size_t i = 0; i < catalog.members.size(); ++i) {
                for (double t : {0.0, 0.5, 1.0, 2.0}) {
                    const CheckReport rep =
                        shift_inequality_check(sys, y0, catalog.members[i], t, quick);
                    csv.row({id, catalog.names[i], num(t), num(rep.lhs), num(rep.rhs),
                             rep.pass ? "1" : "0"});
                    all_ok = all_ok && rep.pass;
                }
            }
        }
        check(r, all_ok, "value shift inequality holds for all builtin systems");
    }

    {  // Cost-level shift bound on randomized controls.
        bool all_ok = true;
        double worst = -1e300;
        const int cases = static_cast<int>(getp(cfg, "gamma_cases", 200));
        std::uniform_int_distribution<std::size_t> pick(0, catalog.members.size() - 1);
        std::uniform_real_distribution<double> t_dist(0.0, 2.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        // K = 1 keeps the running cost inside [0,1], which the bound requires.
        const ControlSystem bang_unit = make_system("bang-cost", {{"K", 1.0}});
        const ControlSystem stable = make_system("stable-point");
        for (int c = 0; c < cases; ++c) {
            const ControlSystem& sys = c % 2 == 0 ? bang_unit : stable;
            const Evaluation& theta = catalog.members[pick(rng)];
            const double t = t_dist(rng);
            const Evaluation shifted = theta.shift_pushforward(t);
            const double H = shifted.effective_support() + 1.0;
            ControlSignal u;
            u.horizon = H;
            std::vector<double> cuts;
            for (int i = 0; i < 3; ++i) cuts.push_back(H * unit(rng));
            std::sort(cuts.begin(), cuts.end());
            u.breakpoints.push_back(0.0);
            for (double cut : cuts)
                if (cut > u.breakpoints.back() + 1e-9) u.breakpoints.push_back(cut);
            std::uniform_int_distribution<std::size_t> cpick(0, sys.controls.size() - 1);
            for (std::size_t i = 0; i < u.breakpoints.size(); ++i)
                u.values.push_back(sys.controls[cpick(rng)]);
            const ValueEstimate g1 = evaluate_cost(sys, {0.5, 0.0}, u, theta);
            const ValueEstimate g2 = evaluate_cost(sys, {0.5, 0.0}, u, shifted);
            const double tv = total_variation_shift(theta, t);
            const double budget = 2.0 * tv + 2.0 * (g1.tail_error + g2.tail_error) +
                                  g1.quad_error + g2.quad_error + 1e-9;
            const double gap = std::fabs(g1.value - g2.value);
            all_ok = all_ok && gap <= budget;
            worst = std::max(worst, gap - 2.0 * tv);
        }
        Csv csv(r, cfg, "gamma_shift.csv", "cases,worst_excess,pass");
        csv.row({num(cases), num(worst), all_ok ? "1" : "0"});
        check(r, all_ok, "cost shift bound holds on randomized controls");
    }

    {  // Subadditivity grid.
        bool all_ok = true;
        double worst = -1e300;
        for (const Evaluation& theta : catalog.members) {
            for (int i = 1; i <= 20; ++i) {
                for (int j = 1; j <= 20; ++j) {
                    const double s = 0.1 * i;
                    const double t = 0.1 * j;
                    double es = 0.0, et = 0.0, est = 0.0;
                    const double excess = total_variation_shift(theta, s + t, &est) -
                                          total_variation_shift(theta, s, &es) -
                                          total_variation_shift(theta, t, &et);
                    const double budget = 2.0 * (es + et + est) + 1e-9;
                    all_ok = all_ok && excess <= budget;
                    worst = std::max(worst, excess);
                }
            }
        }
        Csv csv(r, cfg, "tv_subadditivity.csv", "worst_excess,pass");
        csv.row({num(worst), all_ok ? "1" : "0"});
        check(r, all_ok, "TV subadditivity on the 20x20 grid (worst excess " + num(worst) + ")");
    }

    {  // Sandwich chains.
        Csv csv(r, cfg, "sandwich.csv", "family,a,b_hi,b_lo,c,pass");
        const std::vector<double> t_grid = {0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
        bool all_ok = true;
        auto run_chain = [&](const std::string& name, const ControlSystem& sys, const State& y0,
                             const std::function<Evaluation(int)>& make) {
            std::vector<Evaluation> family;
            for (int k : {5, 10, 20, 40}) family.push_back(make(k));
            const SandwichReport rep = sandwich_check(sys, y0, family, 1.0, t_grid);
            csv.row({name, num(rep.a), num(rep.b_hi), num(rep.b_lo), num(rep.c),
                     rep.pass ? "1" : "0"});
            all_ok = all_ok && rep.pass;
        };
        const ControlSystem bang = make_system("bang-cost");
        run_chain("bang-cost-horizon-k", bang, {0.0, 0.0}, [](int k) {
            return Evaluation::uniform(0.0, static_cast<double>(k));
        });
        run_chain("bang-cost-late-window", bang, {0.0, 0.0}, [](int k) {
            return Evaluation::uniform(static_cast<double>(k), 2.0 * k);
        });
        run_chain("rotation-uniform", make_system("rotation"), {1.0, 0.0}, [](int k) {
            return Evaluation::uniform(0.0, static_cast<double>(k));
        });
        check(r, all_ok, "sandwich chains ordered within slack");
    }
    return r;
}

using ExperimentFn = ExperimentResult (*)(const ExperimentConfig&);

const std::vector<std::tuple<std::string, std::string, ExperimentFn>>& registry() {
    static const std::vector<std::tuple<std::string, std::string, ExperimentFn>> reg = {
        {"tv-curves", "shift total-variation curves for the analytic families", exp_tv_curves},
        {"ltc-families", "long-term-condition diagnostics per family", exp_ltc_families},
        {"discrete-link", "step-density shift identity sweep", exp_discrete_link},
        {"ex-0-1", "indicator cost under odd/even window evaluations", exp_ex_0_1},
        {"rotation", "circle averaging limit and norm conservation", exp_rotation},
        {"counter-1", "uncontrolled relaxation: limit value 1 probe", exp_counter_1},
        {"counter-2", "bang-bang cost tables and the vanishing limit value", exp_counter_2},
        {"nonexpansive", "nonexpansiveness, contraction and regularity checks", exp_nonexpansive},
        {"ltc-prime", "comb densities: large shifts vs vanishing rational shifts", exp_ltc_prime},
        {"inequalities", "step-function, shift, subadditivity and sandwich sweeps",
         exp_inequalities},
    };
    return reg;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& experiment_catalog() {
    static const std::vector<std::pair<std::string, std::string>> ids = [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [id, desc, fn] : registry()) out.emplace_back(id, desc);
        out.emplace_back("all", "run every experiment in order");
        return out;
    }();
    return ids;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    fs::create_directories(config.out_dir);
    if (config.id == "all") {
        ExperimentResult total;
        total.id = "all";
        for (const auto& [id, desc, fn] : registry()) {
            ExperimentConfig sub = config;
            sub.id = id;
            ExperimentResult r = fn(sub);
            r.id = id;
            total.pass = total.pass && r.pass;
            for (const auto& a : r.artifacts) total.artifacts.push_back(a);
            for (const auto& l : r.lines) total.lines.push_back("[" + id + "] " + l);
        }
        return total;
    }
    for (const auto& [id, desc, fn] : registry()) {
        if (id == config.id) {
            ExperimentResult r = fn(config);
            r.id = id;
            return r;
        }
    }
    std::string known;
    for (const auto& [id, desc] : experiment_catalog()) known += (known.empty() ? "" : ", ") + id;
    throw std::invalid_argument("unknown experiment id '" + config.id + "'; valid ids: " + known);
}

}  // namespace meanvalue
