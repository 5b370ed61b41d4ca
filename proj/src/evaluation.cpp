#include "meanvalue/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "meanvalue/quadrature.hpp"

namespace meanvalue {

namespace {

const std::string kKindNames[] = {"uniform",  "exponential", "folded_normal", "step_density",
                                  "comb",     "shifted",     "generic"};

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

const std::string& Evaluation::kind_name() const { return kKindNames[static_cast<int>(kind_)]; }

Evaluation Evaluation::uniform(double a, double b) {
    if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("uniform: need 0 <= a < b");
    Evaluation e;
    e.kind_ = Kind::Uniform;
    e.a_ = a;
    e.b_ = b;
    return e;
}

Evaluation Evaluation::exponential(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exponential: lambda must be positive");
    Evaluation e;
    e.kind_ = Kind::Exponential;
    e.lambda_ = lambda;
    return e;
}

Evaluation Evaluation::folded_normal(double m, double sigma) {
    if (!(m >= 0.0) || !(sigma > 0.0)) throw std::invalid_argument("folded_normal: need m >= 0, sigma > 0");
    Evaluation e;
    e.kind_ = Kind::FoldedNormal;
    e.m_ = m;
    e.sigma_ = sigma;
    return e;
}

Evaluation Evaluation::step_density(std::vector<double> weights, double bin_width) {
    if (weights.empty()) throw std::invalid_argument("step_density: empty weight sequence");
    if (!(bin_width > 0.0)) throw std::invalid_argument("step_density: bin width must be positive");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("step_density: negative weight");
        sum += w;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("step_density: zero total weight");
    Evaluation e;
    e.kind_ = Kind::StepDensity;
    e.bin_width_ = bin_width;
    e.weights_ = std::move(weights);
    for (double& w : e.weights_) w /= sum;
    e.prefix_.resize(e.weights_.size() + 1, 0.0);
    for (std::size_t j = 0; j < e.weights_.size(); ++j)
        e.prefix_[j + 1] = e.prefix_[j] + e.weights_[j];
    e.prefix_.back() = 1.0;
    return e;
}

Evaluation Evaluation::comb(int k) {
    if (k < 1) throw std::invalid_argument("comb: k must be a positive integer");
    Evaluation e;
    e.kind_ = Kind::Comb;
    e.comb_k_ = k;
    // Support length = (number of even-indexed cells)/k; equals k/2 for even k,
    // giving the density value 2/k.
    const long long cells = (static_cast<long long>(k) * k + 1) / 2;
    e.comb_value_ = static_cast<double>(k) / static_cast<double>(cells);
    return e;
}

Evaluation Evaluation::shifted(Evaluation base, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("shifted: shift must be nonnegative");
    if (t == 0.0) return base;
    Evaluation e;
    e.kind_ = Kind::Shifted;
    e.tail_tol_ = base.tail_tol_;
    e.shift_t_ = t;
    e.base_ = std::make_shared<Evaluation>(std::move(base));
    return e;
}

Evaluation Evaluation::generic(std::function<double(double)> density, double support_bound,
                               double mass_tolerance) {
    if (!(support_bound > 0.0)) throw std::invalid_argument("generic: support bound must be positive");
    Evaluation e;
    e.kind_ = Kind::Generic;
    e.generic_density_ = std::move(density);
    e.generic_bound_ = support_bound;
    QuadratureResult mass =
        adaptive_simpson(e.generic_density_, 0.0, support_bound, 0.1 * mass_tolerance);
    if (std::fabs(mass.value - 1.0) > mass_tolerance)
        throw std::invalid_argument("generic: density does not integrate to 1 over the support");
    return e;
}

Evaluation Evaluation::with_tail_tolerance(double tol) const {
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tail tolerance must lie in (0,1)");
    Evaluation e = *this;
    e.tail_tol_ = tol;
    return e;
}

double Evaluation::density(double t) const {
    if (t < 0.0) throw std::invalid_argument("density: negative time");
    switch (kind_) {
        case Kind::Uniform:
            return (t >= a_ && t <= b_) ? 1.0 / (b_ - a_) : 0.0;
        case Kind::Exponential:
            return lambda_ * std::exp(-lambda_ * t);
        case Kind::FoldedNormal: {
            const double c = 1.0 / (sigma_ * std::sqrt(2.0 * M_PI));
            const double u = (t - m_) / sigma_;
            const double v = (t + m_) / sigma_;
            return c * (std::exp(-0.5 * u * u) + std::exp(-0.5 * v * v));
        }
        case Kind::StepDensity: {
            const auto j = static_cast<long long>(std::floor(t / bin_width_));
            if (j < 0 || j >= static_cast<long long>(weights_.size())) return 0.0;
            return weights_[static_cast<std::size_t>(j)] / bin_width_;
        }
        case Kind::Comb: {
            if (t >= static_cast<double>(comb_k_)) return 0.0;
            const auto cell = static_cast<long long>(std::floor(t * comb_k_));
            return (cell % 2 == 0) ? comb_value_ : 0.0;
        }
        case Kind::Shifted:
            return t < shift_t_ ? 0.0 : base_->density(t - shift_t_);
        case Kind::Generic:
            return t <= generic_bound_ ? generic_density_(t) : 0.0;
    }
    return 0.0;
}

double Evaluation::cdf(double t) const {
    if (t < 0.0) return 0.0;
    switch (kind_) {
        case Kind::Uniform:
            if (t <= a_) return 0.0;
            if (t >= b_) return 1.0;
            return (t - a_) / (b_ - a_);
        case Kind::Exponential:
            return -std::expm1(-lambda_ * t);
        case Kind::FoldedNormal:
            return normal_cdf((t - m_) / sigma_) + normal_cdf((t + m_) / sigma_) - 1.0;
        case Kind::StepDensity: {
            const double u = t / bin_width_;
            const auto j = static_cast<long long>(std::floor(u));
            if (j >= static_cast<long long>(weights_.size())) return 1.0;
            const auto jj = static_cast<std::size_t>(j);
            return prefix_[jj] + weights_[jj] * (u - static_cast<double>(j));
        }
        case Kind::Comb: {
            const double k = static_cast<double>(comb_k_);
            if (t >= k) return 1.0;
            const double u = t * k;  // position in cell units
            const double pairs = std::floor(u / 2.0);
            const double covered = pairs + std::min(u - 2.0 * pairs, 1.0);
            return comb_value_ * covered / k;
        }
        case Kind::Shifted:
            return t < shift_t_ ? 0.0 : base_->cdf(t - shift_t_);
        case Kind::Generic: {
            if (t >= generic_bound_) return 1.0;
            QuadratureResult r = adaptive_simpson(generic_density_, 0.0, t, 1e-10);
            return std::clamp(r.value, 0.0, 1.0);
        }
    }
    return 0.0;
}

double Evaluation::quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("quantile: p must lie in [0,1)");
    switch (kind_) {
        case Kind::Uniform:
            return a_ + p * (b_ - a_);
        case Kind::Exponential:
            return -std::log1p(-p) / lambda_;
        case Kind::StepDensity: {
            for (std::size_t j = 0; j < prefix_.size(); ++j)
                if (prefix_[j] >= p) return static_cast<double>(j) * bin_width_;
            return static_cast<double>(weights_.size()) * bin_width_;
        }
        case Kind::Comb: {
            const double w = 1.0 / static_cast<double>(comb_k_);
            const long long cells = static_cast<long long>(comb_k_) * comb_k_;
            for (long long j = 0; j <= cells; ++j) {
                if (cdf(static_cast<double>(j) * w) >= p) return static_cast<double>(j) * w;
            }
            return static_cast<double>(comb_k_);
        }
        case Kind::Shifted:
            return shift_t_ + base_->quantile(p);
        case Kind::FoldedNormal:
        case Kind::Generic: {
            // Bisection on the CDF; expand the upper bracket until it covers p.
            double hi = (kind_ == Kind::Generic) ? generic_bound_ : m_ + 8.0 * sigma_;
            while (cdf(hi) < p) hi *= 2.0;
            double lo = 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                (cdf(mid) >= p ? hi : lo) = mid;
            }
            return hi;
        }
    }
    return 0.0;
}

Evaluation Evaluation::shift_pushforward(double t) const { return shifted(*this, t); }

double Evaluation::effective_support() const { return quantile(1.0 - tail_tol_); }

std::vector<double> Evaluation::density_breakpoints() const {
    switch (kind_) {
        case Kind::Uniform:
            return {a_, b_};
        case Kind::Exponential:
        case Kind::FoldedNormal:
            return {};
        case Kind::StepDensity: {
            std::vector<double> out;
            out.reserve(weights_.size() + 1);
            for (std::size_t j = 0; j <= weights_.size(); ++j)
                out.push_back(static_cast<double>(j) * bin_width_);
            return out;
        }
        case Kind::Comb: {
            std::vector<double> out;
            const long long cells = static_cast<long long>(comb_k_) * comb_k_;
            out.reserve(static_cast<std::size_t>(cells) + 1);
            for (long long j = 0; j <= cells; ++j)
                out.push_back(static_cast<double>(j) / comb_k_);
            return out;
        }
        case Kind::Shifted: {
            std::vector<double> out = base_->density_breakpoints();
            for (double& x : out) x += shift_t_;
            out.push_back(shift_t_);
            return out;
        }
        case Kind::Generic:
            return {generic_bound_};
    }
    return {};
}

LatticeDensity Evaluation::lattice() const {
    LatticeDensity lat;
    if (kind_ == Kind::StepDensity) {
        lat.width = bin_width_;
        lat.values = weights_;
        for (double& v : lat.values) v /= bin_width_;
        return lat;
    }
    if (kind_ == Kind::Comb) {
        lat.width = 1.0 / static_cast<double>(comb_k_);
        const long long cells = static_cast<long long>(comb_k_) * comb_k_;
        lat.values.resize(static_cast<std::size_t>(cells), 0.0);
        for (long long j = 0; j < cells; j += 2) lat.values[static_cast<std::size_t>(j)] = comb_value_;
        return lat;
    }
    throw std::logic_error("lattice(): not a piecewise-constant evaluation");
}

double Evaluation::shift_offset() const {
    return kind_ == Kind::Shifted ? shift_t_ + base_->shift_offset() : 0.0;
}

const Evaluation& Evaluation::shift_base() const {
    if (kind_ != Kind::Shifted) throw std::logic_error("shift_base(): not a shifted evaluation");
    return base_->kind_ == Kind::Shifted ? base_->shift_base() : *base_;
}

std::optional<std::pair<double, double>> Evaluation::as_uniform_interval() const {
    if (kind_ == Kind::Uniform) return std::make_pair(a_, b_);
    if (kind_ == Kind::Shifted) {
        auto inner = base_->as_uniform_interval();
        if (!inner) return std::nullopt;
        return std::make_pair(inner->first + shift_t_, inner->second + shift_t_);
    }
    return std::nullopt;
}

double Evaluation::uniform_a() const {
    if (kind_ != Kind::Uniform) throw std::logic_error("not a uniform evaluation");
    return a_;
}
double Evaluation::uniform_b() const {
    if (kind_ != Kind::Uniform) throw std::logic_error("not a uniform evaluation");
    return b_;
}
double Evaluation::exponential_lambda() const {
    if (kind_ != Kind::Exponential) throw std::logic_error("not an exponential evaluation");
    return lambda_;
}
double Evaluation::folded_m() const {
    if (kind_ != Kind::FoldedNormal) throw std::logic_error("not a folded normal evaluation");
    return m_;
}
double Evaluation::folded_sigma() const {
    if (kind_ != Kind::FoldedNormal) throw std::logic_error("not a folded normal evaluation");
    return sigma_;
}
int Evaluation::comb_k() const {
    if (kind_ != Kind::Comb) throw std::logic_error("not a comb evaluation");
    return comb_k_;
}
const std::vector<double>& Evaluation::step_weights() const {
    if (kind_ != Kind::StepDensity) throw std::logic_error("not a step density");
    return weights_;
}
double Evaluation::step_bin_width() const {
    if (kind_ != Kind::StepDensity) throw std::logic_error("not a step density");
    return bin_width_;
}

nlohmann::json Evaluation::to_json() const {
    nlohmann::json j;
    j["kind"] = kind_name();
    j["tail_tolerance"] = tail_tol_;
    switch (kind_) {
        case Kind::Uniform:
            j["a"] = a_;
            j["b"] = b_;
            break;
        case Kind::Exponential:
            j["lambda"] = lambda_;
            break;
        case Kind::FoldedNormal:
            j["m"] = m_;
            j["sigma"] = sigma_;
            break;
        case Kind::StepDensity:
            j["weights"] = weights_;
            j["bin_width"] = bin_width_;
            break;
        case Kind::Comb:
            j["k"] = comb_k_;
            break;
        case Kind::Shifted:
            j["t"] = shift_t_;
            j["base"] = base_->to_json();
            break;
        case Kind::Generic:
            throw std::logic_error("generic evaluations are not serializable");
    }
    return j;
}

Evaluation Evaluation::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    Evaluation e = [&]() {
        if (kind == "uniform") return uniform(j.at("a"), j.at("b"));
        if (kind == "exponential") return exponential(j.at("lambda"));
        if (kind == "folded_normal") return folded_normal(j.at("m"), j.at("sigma"));
        if (kind == "step_density")
            return step_density(j.at("weights").get<std::vector<double>>(),
                                j.value("bin_width", 1.0));
        if (kind == "comb") return comb(j.at("k").get<int>());
        if (kind == "shifted") return shifted(from_json(j.at("base")), j.at("t"));
        throw std::invalid_argument("unknown evaluation kind: " + kind);
    }();
    if (j.contains("tail_tolerance")) e = e.with_tail_tolerance(j.at("tail_tolerance"));
    return e;
}

std::string Evaluation::describe() const {
    switch (kind_) {
        case Kind::Uniform:
            return "uniform[" + std::to_string(a_) + "," + std::to_string(b_) + "]";
        case Kind::Exponential:
            return "exponential(" + std::to_string(lambda_) + ")";
        case Kind::FoldedNormal:
            return "folded_normal(m=" + std::to_string(m_) + ",sigma=" + std::to_string(sigma_) + ")";
        case Kind::StepDensity:
            return "step_density(n=" + std::to_string(weights_.size()) + ")";
        case Kind::Comb:
            return "comb(k=" + std::to_string(comb_k_) + ")";
        case Kind::Shifted:
            return "shift(" + std::to_string(shift_t_) + ")+" + base_->describe();
        case Kind::Generic:
            return "generic(bound=" + std::to_string(generic_bound_) + ")";
    }
    return "?";
}

}  // namespace meanvalue
