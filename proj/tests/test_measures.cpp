#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "meanvalue/evaluation.hpp"
#include "meanvalue/quadrature.hpp"
#include "meanvalue/total_variation.hpp"

using namespace meanvalue;

namespace {

std::vector<Evaluation> small_catalog() {
    return {Evaluation::uniform(0.0, 2.0),    Evaluation::uniform(1.0, 3.0),
            Evaluation::exponential(1.0),     Evaluation::exponential(0.1),
            Evaluation::folded_normal(3.0, 1.0),
            Evaluation::step_density({0.25, 0.5, 0.25}),
            Evaluation::comb(3),
            Evaluation::shifted(Evaluation::uniform(0.0, 1.0), 2.0)};
}

Evaluation as_generic(const Evaluation& theta, double bound) {
    return Evaluation::generic([theta](double t) { return theta.density(t); }, bound);
}

}  // namespace

TEST_CASE("density closed forms") {
    CHECK(Evaluation::uniform(0.0, 2.0).density(1.0) == doctest::Approx(0.5));
    CHECK(Evaluation::exponential(0.5).density(0.0) == doctest::Approx(0.5));
    CHECK(Evaluation::comb(2).density(0.25) == doctest::Approx(1.0));
    CHECK(Evaluation::comb(2).density(0.75) == doctest::Approx(0.0));
    CHECK(Evaluation::shifted(Evaluation::uniform(0.0, 1.0), 5.0).density(4.0) == 0.0);
}

TEST_CASE("cdf closed forms") {
    CHECK(Evaluation::uniform(1.0, 3.0).cdf(2.0) == doctest::Approx(0.5));
    for (double lambda : {0.3, 1.0, 2.0})
        for (double T : {0.5, 1.0, 4.0})
            CHECK(Evaluation::exponential(lambda).cdf(T) ==
                  doctest::Approx(1.0 - std::exp(-lambda * T)).epsilon(1e-12));
    CHECK(Evaluation::shifted(Evaluation::uniform(0.0, 1.0), 5.0).cdf(4.0) == 0.0);
}

TEST_CASE("quantile closed forms and rounding") {
    CHECK(Evaluation::uniform(0.0, 10.0).quantile(0.9) == doctest::Approx(9.0));
    CHECK(Evaluation::exponential(1.0).quantile(1.0 - std::exp(-3.0)) ==
          doctest::Approx(3.0).epsilon(1e-9));
    // Lattice quantiles round up to the next bin boundary.
    CHECK(Evaluation::step_density({1.0, 0.0, 0.0}).quantile(0.999) == doctest::Approx(1.0));
    CHECK_THROWS(Evaluation::uniform(0.0, 1.0).quantile(1.0));
}

TEST_CASE("total mass via quadrature") {
    for (const Evaluation& theta : small_catalog()) {
        const double hi = theta.effective_support();
        const QuadratureResult r = integrate_with_breakpoints(
            [&](double t) { return theta.density(t); }, 0.0, hi, theta.density_breakpoints(),
            1e-10);
        CHECK(r.value == doctest::Approx(theta.cdf(hi)).epsilon(1e-8));
        CHECK(theta.cdf(hi) >= 1.0 - theta.tail_tolerance() - 1e-12);
    }
}

TEST_CASE("uniform tv closed form vs quadrature") {
    for (double k : {2.0, 10.0}) {
        const Evaluation theta = Evaluation::uniform(0.0, k);
        const Evaluation generic = as_generic(theta, k);
        for (double s : {0.1, 0.5, 1.0}) {
            CHECK(std::fabs(total_variation_shift(theta, s) - s / k) <= 1e-12);
            CHECK(std::fabs(total_variation_shift(generic, s) - s / k) <= 1e-6);
        }
        // Large shifts saturate.
        CHECK(total_variation_shift(theta, k + 1.0) == doctest::Approx(1.0));
    }
}

TEST_CASE("exponential shift distance: closed form, quadrature and Riemann oracle") {
    for (double lambda : {0.1, 1.0}) {
        const Evaluation theta = Evaluation::exponential(lambda);
        const double bound = theta.quantile(1.0 - 1e-9);
        const Evaluation generic = as_generic(theta, bound);
        for (double s : {0.5, 1.0, 2.0}) {
            const double closed = 1.0 - std::exp(-lambda * s);
            CHECK(std::fabs(l1_shift_distance(theta, s) - closed) <= 1e-12);
            CHECK(std::fabs(l1_shift_distance(generic, s) - closed) <= 1e-6);
            CHECK(total_variation_shift(theta, s) == doctest::Approx(closed).epsilon(1e-12));
        }
    }
    // Brute-force Riemann sum on a million-point grid.
    const double lambda = 1.0, s = 0.7;
    const double hi = 40.0;
    const long n = 1000000;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.5) * hi / static_cast<double>(n);
        sum += std::fabs(lambda * std::exp(-lambda * (t + s)) - lambda * std::exp(-lambda * t));
    }
    sum *= hi / static_cast<double>(n);
    CHECK(std::fabs(sum - (1.0 - std::exp(-lambda * s))) <= 1e-5);
}

TEST_CASE("interval-subset supremum agrees with the computed tv on step densities") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 8;
        std::vector<double> w(n);
        double total = 0.0;
        for (double& x : w) {
            x = unit(rng);
            total += x;
        }
        for (double& x : w) x /= total;
        const Evaluation theta = Evaluation::step_density(w);
        for (int s = 0; s <= 3; ++s) {
            double sup = 0.0;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                double direct = 0.0, shifted = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (!(mask & (1u << i))) continue;
                    direct += w[static_cast<std::size_t>(i)];
                    if (i + s < n) shifted += w[static_cast<std::size_t>(i + s)];
                }
                sup = std::max(sup, std::fabs(direct - shifted));
            }
            CHECK(std::fabs(total_variation_shift(theta, static_cast<double>(s)) - sup) <= 1e-12);
        }
    }
}

TEST_CASE("tv subadditivity on sampled grids") {
    for (const Evaluation& theta : small_catalog()) {
        for (int i = 1; i <= 6; ++i) {
            for (int j = 1; j <= 6; ++j) {
                const double s = 0.3 * i, t = 0.3 * j;
                double es = 0.0, et = 0.0, est = 0.0;
                const double excess = total_variation_shift(theta, s + t, &est) -
                                      total_variation_shift(theta, s, &es) -
                                      total_variation_shift(theta, t, &et);
                CHECK(excess <= 2.0 * (es + et + est) + 1e-9);
            }
        }
    }
}

TEST_CASE("pushforward preserves mass and respects the shift bound") {
    for (const Evaluation& theta : small_catalog()) {
        for (double t : {0.0, 0.5, 2.0}) {
            const Evaluation pushed = theta.shift_pushforward(t);
            CHECK(pushed.cdf(theta.effective_support() + t + 1.0) ==
                  doctest::Approx(theta.cdf(theta.effective_support() + 1.0)).epsilon(1e-12));
            for (double s : {0.25, 1.0})
                CHECK(total_variation_shift(pushed, s) <=
                      total_variation_shift(theta, s) + theta.cdf(s) + 1e-9);
        }
    }
    // Exponential shifted right by 2 has no mass before 2.
    CHECK(Evaluation::exponential(1.0).shift_pushforward(2.0).cdf(2.0) == 0.0);
}

TEST_CASE("step density identity") {
    {
        const auto [i_s, prod] = step_density_tv_identity({1.0}, 0.5);
        CHECK(i_s == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(prod == doctest::Approx(0.5).epsilon(1e-14));
    }
    {
        const auto [i_s, prod] = step_density_tv_identity({0.4, 0.6}, 0.0);
        CHECK(i_s == 0.0);
        CHECK(prod == 0.0);
    }
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(1, 20);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> xi(static_cast<std::size_t>(len(rng)));
        double total = 0.0;
        for (double& x : xi) {
            x = unit(rng);
            total += x;
        }
        for (double& x : xi) x /= total;
        for (int i = 0; i <= 10; ++i) {
            const auto [i_s, prod] = step_density_tv_identity(xi, 0.1 * i);
            CHECK(std::fabs(i_s - prod) <= 1e-12);
        }
    }
}

TEST_CASE("discrete tv values and validation") {
    CHECK(discrete_tv({1.0}) == doctest::Approx(1.0));
    CHECK(discrete_tv({0.5, 0.5}) == doctest::Approx(0.5));
    CHECK_THROWS(discrete_tv({0.5, 0.4}));
}

TEST_CASE("folded normal mode") {
    CHECK(folded_normal_mode(1.0, 2.0) == 0.0);
    for (auto [m, sigma] : {std::pair{1.0, 2.0}, {3.0, 1.0}, {5.0, 0.5}}) {
        const double t = folded_normal_mode(m, sigma);
        CHECK(t * t >= m * m - sigma * sigma - 1e-9);
        CHECK(t < m);
        // Unimodality: the density rises until the mode and falls after it.
        const Evaluation theta = Evaluation::folded_normal(m, sigma);
        const double hi = m + 6.0 * sigma;
        int sign_changes = 0;
        int last_sign = 1;
        for (int i = 1; i < 10000; ++i) {
            const double a = theta.density(hi * (i - 1) / 10000.0);
            const double b = theta.density(hi * i / 10000.0);
            const int sign = b >= a - 1e-13 ? 1 : -1;
            if (sign != last_sign) {
                ++sign_changes;
                last_sign = sign;
            }
        }
        CHECK(sign_changes <= 1);
    }
    const double t31 = folded_normal_mode(3.0, 1.0);
    CHECK(t31 >= std::sqrt(8.0) - 1e-9);
    CHECK(t31 < 3.0);
}

TEST_CASE("comb shift distances") {
    for (int k : {2, 4, 8}) {
        const double i_s = l1_shift_distance(Evaluation::comb(k), 1.0 / k);
        CHECK(i_s == doctest::Approx(2.0 - 2.0 / (static_cast<double>(k) * k)).epsilon(1e-12));
        CHECK(i_s >= 2.0 - 1.0 / k - 1e-12);
        CHECK(total_variation_shift(Evaluation::comb(k), 1.0 / k) == doctest::Approx(1.0));
    }
    CHECK(l1_shift_distance(Evaluation::comb(24), 0.5) ==
          doctest::Approx(12.0 / (24.0 * 24.0)).epsilon(1e-12));
}

TEST_CASE("sup tv over a shift window") {
    const SupTV uni = sup_total_variation(Evaluation::uniform(0.0, 4.0), 1.0, 33);
    CHECK(uni.lower == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(uni.upper >= uni.lower - 1e-12);
    const SupTV expo = sup_total_variation(Evaluation::exponential(0.5), 1.0, 33);
    CHECK(expo.lower == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-9));
    const SupTV comb = sup_total_variation(Evaluation::comb(4), 1.0, 129);
    CHECK(comb.lower >= 1.0 - 1.0 / 8.0 - 1e-9);
}

TEST_CASE("step function bound checks") {
    // Constant step functions see no difference when nothing sits below t.
    StepFunction flat;
    flat.breaks = {0.0};
    flat.values = {0.7};
    const HahnBound hb0 = hahn_bound_check(Evaluation::uniform(3.0, 4.0), 1.0, flat);
    CHECK(hb0.diff_minus <= 1e-12);
    CHECK(hb0.diff_plus <= 1e-12);
    CHECK(hb0.pass);

    StepFunction half;
    half.breaks = {0.0, 5.0};
    half.values = {1.0, 0.0};
    const HahnBound hb1 = hahn_bound_check(Evaluation::uniform(0.0, 10.0), 1.0, half);
    CHECK(hb1.diff_minus <= 0.1 + 1e-12);
    CHECK(hb1.diff_plus <= 0.2 + 1e-12);
    CHECK(hb1.pass);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto catalog = small_catalog();
    for (int rep = 0; rep < 300; ++rep) {
        const Evaluation& theta = catalog[static_cast<std::size_t>(rep) % catalog.size()];
        const double t = 2.0 * unit(rng);
        StepFunction h;
        h.breaks.push_back(0.0);
        const double span = theta.effective_support() * 1.2 + 2.0;
        std::vector<double> cuts;
        for (int i = 0; i < 9; ++i) cuts.push_back(span * unit(rng));
        std::sort(cuts.begin(), cuts.end());
        for (double c : cuts)
            if (c > h.breaks.back() + 1e-9) h.breaks.push_back(c);
        for (std::size_t i = 0; i < h.breaks.size(); ++i) h.values.push_back(unit(rng));
        CHECK(hahn_bound_check(theta, t, h).pass);
    }
}

TEST_CASE("serialization round trip") {
    for (const Evaluation& theta : small_catalog()) {
        const Evaluation copy = Evaluation::from_json(theta.to_json());
        CHECK(copy.kind() == theta.kind());
        for (double t : {0.1, 0.7, 1.9, 3.4})
            CHECK(copy.cdf(t) == doctest::Approx(theta.cdf(t)).epsilon(1e-14));
    }
    const Evaluation generic = Evaluation::generic([](double t) { return t < 1.0 ? 1.0 : 0.0; },
                                                   1.0);
    CHECK_THROWS(generic.to_json());
}

TEST_CASE("mean growth along shift-stable families") {
    // Families whose shift discrepancy vanishes push their mass out to
    // infinity; the truncated mean grows without bound along k.
    for (double M : {5.0, 50.0}) {
        double prev = 0.0;
        for (int k : {10, 100, 1000}) {
            const Evaluation theta = Evaluation::uniform(0.0, static_cast<double>(k));
            const double mean_bound = M * (1.0 - theta.cdf(M));
            CHECK(mean_bound >= prev - 1e-12);
            prev = mean_bound;
        }
        CHECK(prev >= M * 0.9);
    }
}

TEST_CASE("input validation") {
    CHECK_THROWS(Evaluation::uniform(2.0, 1.0));
    CHECK_THROWS(Evaluation::exponential(0.0));
    CHECK_THROWS(total_variation_shift(Evaluation::uniform(0.0, 1.0), -0.5));
    CHECK_THROWS(Evaluation::step_density({-0.5, 1.5}));
    CHECK_THROWS(Evaluation::generic([](double) { return 5.0; }, 1.0));  // mass far from 1
}
