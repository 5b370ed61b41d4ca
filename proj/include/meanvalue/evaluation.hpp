#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace meanvalue {

/// Piecewise-constant density on a uniform lattice: f = values[j] on
/// [j*width, (j+1)*width), zero elsewhere.
struct LatticeDensity {
    double width = 1.0;
    std::vector<double> values;
};

/// A probability measure on the nonnegative half-line, accessed through its
/// density, CDF and quantile function. All supported families are absolutely
/// continuous; atoms are deliberately not representable.
class Evaluation {
public:
    enum class Kind { Uniform, Exponential, FoldedNormal, StepDensity, Comb, Shifted, Generic };

    static Evaluation uniform(double a, double b);
    static Evaluation exponential(double lambda);
    static Evaluation folded_normal(double m, double sigma);
    /// Weights are accumulated exactly and normalized; each weight covers one
    /// bin of the given width starting at zero.
    static Evaluation step_density(std::vector<double> weights, double bin_width = 1.0);
    /// Uniform over the even-indexed length-1/k subintervals of [0,k].
    static Evaluation comb(int k);
    static Evaluation shifted(Evaluation base, double t);
    static Evaluation generic(std::function<double(double)> density, double support_bound,
                              double mass_tolerance = 1e-6);

    Kind kind() const { return kind_; }
    const std::string& kind_name() const;

    double density(double t) const;
    double cdf(double t) const;
    /// Smallest time T with cdf(T) >= p; for lattice densities T is rounded up
    /// to the next bin boundary so that it can serve as a truncation point.
    double quantile(double p) const;

    /// The image of this measure under s -> s+t.
    Evaluation shift_pushforward(double t) const;

    double tail_tolerance() const { return tail_tol_; }
    Evaluation with_tail_tolerance(double tol) const;
    /// quantile(1 - tail_tolerance)
    double effective_support() const;

    /// Discontinuity points of the density, for quadrature cell alignment.
    std::vector<double> density_breakpoints() const;

    bool is_lattice() const { return kind_ == Kind::StepDensity || kind_ == Kind::Comb; }
    LatticeDensity lattice() const;

    /// Total shift accumulated through Shifted wrappers.
    double shift_offset() const;
    const Evaluation& shift_base() const;

    /// If this evaluation is uniform on an interval (possibly through Shifted
    /// wrappers), the interval [a,b].
    std::optional<std::pair<double, double>> as_uniform_interval() const;

    // Parameter access (throws on kind mismatch).
    double uniform_a() const;
    double uniform_b() const;
    double exponential_lambda() const;
    double folded_m() const;
    double folded_sigma() const;
    int comb_k() const;
    const std::vector<double>& step_weights() const;
    double step_bin_width() const;

    nlohmann::json to_json() const;
    static Evaluation from_json(const nlohmann::json& j);
    std::string describe() const;

private:
    Evaluation() = default;

    Kind kind_ = Kind::Uniform;
    double tail_tol_ = 1e-6;

    // Uniform
    double a_ = 0.0, b_ = 1.0;
    // Exponential
    double lambda_ = 1.0;
    // FoldedNormal
    double m_ = 0.0, sigma_ = 1.0;
    // StepDensity / Comb
    std::vector<double> weights_;
    std::vector<double> prefix_;  // prefix_[j] = mass of bins [0, j)
    double bin_width_ = 1.0;
    int comb_k_ = 0;
    double comb_value_ = 0.0;
    // Shifted
    std::shared_ptr<const Evaluation> base_;
    double shift_t_ = 0.0;
    // Generic
    std::function<double(double)> generic_density_;
    double generic_bound_ = 0.0;
};

}  // namespace meanvalue
