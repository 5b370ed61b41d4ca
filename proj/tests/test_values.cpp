#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "meanvalue/evaluation.hpp"
#include "meanvalue/systems.hpp"
#include "meanvalue/value.hpp"

using namespace meanvalue;

namespace {

std::vector<double> window_weights(int k, bool odd) {
    std::vector<double> w(static_cast<std::size_t>(2 * k), 0.0);
    for (int m = 1; m <= k; ++m)
        w[static_cast<std::size_t>(odd ? 2 * m - 1 : 2 * m - 2)] = 1.0 / k;
    return w;
}

}  // namespace

TEST_CASE("indicator cost under the window evaluations") {
    const ControlSystem sys = make_system("drift-indicator");
    for (int k : {1, 5, 20}) {
        const double v_mu =
            value(sys, {0.0, 0.0}, Evaluation::step_density(window_weights(k, true))).value;
        const double v_nu =
            value(sys, {0.0, 0.0}, Evaluation::step_density(window_weights(k, false))).value;
        CHECK(std::fabs(v_mu - 1.0) <= 1e-6);
        CHECK(std::fabs(v_nu) <= 1e-6);
    }
    // Shifting the favorable evaluation by one unit flips it onto the costly
    // windows' complement.
    const Evaluation mu = Evaluation::step_density(window_weights(5, true));
    CHECK(std::fabs(shifted_value(sys, {0.0, 0.0}, mu, 1.0).value) <= 1e-6);
}

TEST_CASE("constant cost integrates to the constant") {
    const ControlSystem sys = make_system("expanding");  // cost identically 1/2
    for (const Evaluation& theta :
         {Evaluation::uniform(0.0, 3.0), Evaluation::exponential(0.5)}) {
        const ControlSignal u = ControlSignal::constant(0.0, theta.effective_support());
        const ValueEstimate est = evaluate_cost(make_system("drift-indicator"), {0.0, 0.0},
                                                u, theta);
        CHECK(est.value >= -est.tail_error - 1e-9);
        CHECK(est.value <= 1.0 + est.tail_error + 1e-9);
    }
    const Evaluation theta = Evaluation::uniform(0.0, 2.0);
    const ControlSignal u = ControlSignal::constant(0.0, 2.0);
    // The tail beyond the effective support (mass 1e-6) is dropped.
    CHECK(evaluate_cost(sys, {0.1, 0.0}, u, theta).value ==
          doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("late-window control drives the cost to zero") {
    const ControlSystem sys = make_system("bang-cost");
    const int k = 10;
    ControlSignal u;
    u.horizon = 2.0 * k;
    u.breakpoints = {0.0, static_cast<double>(k)};
    u.values = {1.0, -1.0};
    const Evaluation theta = Evaluation::uniform(static_cast<double>(k), 2.0 * k);
    CHECK(std::fabs(evaluate_cost(sys, {0.0, 0.0}, u, theta).value) <= 1e-9);
}

TEST_CASE("search agrees with the registered closed form") {
    const ControlSystem sys = make_system("bang-cost");
    SearchConfig no_oracle;
    no_oracle.allow_oracle = false;
    for (int k : {10, 50}) {
        for (double y0 : {0.0, 1.0, 5.0, static_cast<double>(k)}) {
            const Evaluation theta = Evaluation::uniform(0.0, static_cast<double>(k));
            const double ref = std::max(0.0, 0.5 - y0 / (2.0 * k));
            const ValueEstimate oracle = value(sys, {y0, 0.0}, theta);
            const ValueEstimate search = value(sys, {y0, 0.0}, theta, no_oracle);
            CHECK(oracle.bias == Bias::ExactOracle);
            CHECK(oracle.value == doctest::Approx(ref).epsilon(1e-12));
            CHECK(std::fabs(search.value - ref) <= 1e-3);
            CHECK(search.bias == Bias::UpperBound);
            // A restricted search can only undershoot by the dropped tail mass.
            CHECK(search.value >= ref - 1e-5);
        }
    }
}

TEST_CASE("zero shift is the identity") {
    const ControlSystem sys = make_system("relax-to-one");
    const Evaluation theta = Evaluation::exponential(1.0);
    CHECK(shifted_value(sys, {0.0, 0.0}, theta, 0.0).value ==
          doctest::Approx(value(sys, {0.0, 0.0}, theta).value).epsilon(1e-12));
}

TEST_CASE("shift path consistency for uncontrolled systems") {
    // Shifting the evaluation equals starting from the flowed state.
    const ControlSystem sys = make_system("relax-to-one");
    const Evaluation theta = Evaluation::uniform(0.0, 2.0);
    for (double t : {0.5, 1.0, 3.0}) {
        const double via_shift = shifted_value(sys, {0.0, 0.0}, theta, t).value;
        const double flowed = 1.0 + (0.0 - 1.0) * std::exp(-t);
        const double via_state = value(sys, {flowed, 0.0}, theta).value;
        CHECK(std::fabs(via_shift - via_state) <= 1e-8);
    }
}

TEST_CASE("monotone refinement of the control class") {
    const ControlSystem sys = make_system("stable-point");
    const Evaluation theta = Evaluation::uniform(0.0, 4.0);
    SearchConfig cfg;
    cfg.mode = SearchConfig::Mode::GridEnumeration;
    double prev = 2.0;
    for (int n : {1, 2, 4}) {
        cfg.segments = n;
        const double v = value(sys, {0.5, 0.0}, theta, cfg).value;
        CHECK(v <= prev + 1e-9);
        prev = v;
    }
}

TEST_CASE("limit value estimates") {
    const std::vector<double> t_grid = {0.0, 1.0,  2.0,   5.0,   10.0,  20.0,
                                        50.0, 100.0, 200.0, 400.0, 700.0, 1000.0};
    {
        const ControlSystem sys = make_system("bang-cost");
        const double v =
            vstar_estimate(sys, {0.0, 0.0}, EvaluationCatalog::standard(), t_grid).value;
        CHECK(v <= 0.05);
        CHECK(v >= -1e-9);
    }
    {
        const ControlSystem sys = make_system("relax-to-one");
        const double v =
            vstar_estimate(sys, {0.0, 0.0}, EvaluationCatalog::standard(), t_grid).value;
        CHECK(v >= 0.98);
    }
    {
        const ControlSystem sys = make_system("expanding");  // constant cost 1/2
        EvaluationCatalog catalog;
        catalog.add(Evaluation::uniform(0.0, 2.0), "uniform-0-2");
        const double v = vstar_estimate(sys, {0.0, 0.0}, catalog, {0.0, 1.0}).value;
        CHECK(v == doctest::Approx(0.5).epsilon(1e-5));
    }
}

TEST_CASE("catalog growth moves the estimate one way") {
    const ControlSystem sys = make_system("bang-cost");
    const std::vector<double> t_grid = {0.0, 1.0, 5.0, 20.0};
    EvaluationCatalog small;
    small.add(Evaluation::uniform(0.0, 5.0), "uniform-0-5");
    const double v_small = vstar_estimate(sys, {0.0, 0.0}, small, t_grid).value;
    EvaluationCatalog larger = small;
    larger.add(Evaluation::uniform(0.0, 40.0), "uniform-0-40");
    const double v_larger = vstar_estimate(sys, {0.0, 0.0}, larger, t_grid).value;
    CHECK(v_larger >= v_small - 1e-12);

    // A finer t grid can only lower the inner minimum.
    const std::vector<double> finer = {0.0, 1.0, 2.5, 5.0, 10.0, 20.0, 40.0};
    const double v_finer = vstar_estimate(sys, {0.0, 0.0}, larger, finer).value;
    CHECK(v_finer <= v_larger + 1e-12);
}

TEST_CASE("shift inequality reports") {
    const ControlSystem sys = make_system("bang-cost");
    {
        const CheckReport rep =
            shift_inequality_check(sys, {0.0, 0.0}, Evaluation::uniform(0.0, 10.0), 0.0);
        CHECK(rep.pass);
        CHECK(rep.lhs == doctest::Approx(rep.rhs).epsilon(1e-12));
    }
    {
        const CheckReport rep =
            shift_inequality_check(sys, {0.0, 0.0}, Evaluation::uniform(0.0, 10.0), 1.0);
        CHECK(rep.pass);
        CHECK(rep.lhs < rep.rhs - 1e-6);  // strict with room to spare
    }
    const ControlSystem relax = make_system("relax-to-one");
    for (double t : {0.5, 1.0, 2.0})
        CHECK(shift_inequality_check(relax, {0.0, 0.0}, Evaluation::exponential(1.0), t).pass);
}

TEST_CASE("sandwich chains") {
    const std::vector<double> t_grid = {0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
    const ControlSystem bang = make_system("bang-cost");
    std::vector<Evaluation> horizon, late;
    for (int k : {5, 10, 20, 40}) {
        horizon.push_back(Evaluation::uniform(0.0, static_cast<double>(k)));
        late.push_back(Evaluation::uniform(static_cast<double>(k), 2.0 * k));
    }
    const SandwichReport h = sandwich_check(bang, {0.0, 0.0}, horizon, 1.0, t_grid);
    CHECK(h.pass);
    CHECK(h.b_hi == doctest::Approx(0.5).epsilon(1e-9));
    const SandwichReport l = sandwich_check(bang, {0.0, 0.0}, late, 1.0, t_grid);
    CHECK(l.pass);
    CHECK(std::fabs(l.b_hi) <= 1e-9);
    CHECK(std::fabs(l.c) <= 1e-9);

    const ControlSystem expanding = make_system("expanding");
    const SandwichReport flat = sandwich_check(expanding, {0.0, 0.0},
                                               {Evaluation::uniform(0.0, 1.0),
                                                Evaluation::uniform(0.0, 2.0)},
                                               1.0, {0.0, 0.5, 1.0});
    CHECK(flat.pass);
    CHECK(flat.a == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(flat.c == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("pointwise but not uniform convergence table") {
    const auto rows = nonuniform_convergence_probe({0.0, 5.0, 20.0}, {10, 20, 50});
    for (const auto& row : rows) CHECK(row.value == doctest::Approx(row.oracle).epsilon(1e-9));
    const ControlSystem sys = make_system("bang-cost");
    CHECK(value(sys, {20.0, 0.0}, Evaluation::uniform(0.0, 20.0)).value ==
          doctest::Approx(0.0));
    CHECK(value(sys, {0.0, 0.0}, Evaluation::uniform(0.0, 50.0)).value ==
          doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("horizon validation") {
    const ControlSystem sys = make_system("relax-to-one");
    const Evaluation theta = Evaluation::uniform(0.0, 5.0);
    CHECK_THROWS(evaluate_cost(sys, {0.0, 0.0}, ControlSignal::constant(0.0, 1.0), theta));
}
