#pragma once

// Closed-form layer of the Everett-branching decay model.
//
// The model: an excited particle's wave function branches at a constant rate
// lambda_B; at each branching event an observer lineage follows the
// still-excited branch with probability epsilon and the decayed branch with
// probability 1 - epsilon. Every distribution below is a consequence of that
// topology:
//
//   branch index   ~ Geometric(1 - epsilon) on {1, 2, ...}
//   decay time | i ~ Erlang(i, lambda_B)
//   mixture        = exactly Exponential(lambda_A), lambda_A = (1-eps)*lambda_B
//
// All functions are pure and depend on t only through lambda * t.

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "everett/special.hpp"

namespace everett {

/// The model's two free parameters plus the derived rates, validated once at
/// construction so downstream code can rely on them.
///
/// epsilon = 0 is accepted as the conventional-theory limit (the branch walk
/// degenerates to a single decay); epsilon = 1 is rejected because no decay
/// would ever be observed. strict_interior() reports whether the parameters
/// lie in the open interval 0 < epsilon < 1 that the branching identities
/// assume.
class RateParams {
public:
    RateParams(double lambda_B, double epsilon)
        : lambda_B_(lambda_B), epsilon_(epsilon) {
        if (!(lambda_B > 0.0) || !std::isfinite(lambda_B)) {
            throw std::domain_error("RateParams: lambda_B must be positive and finite");
        }
        if (!(epsilon >= 0.0) || !(epsilon < 1.0)) {
            throw std::domain_error(
                "RateParams: epsilon must lie in [0, 1); epsilon = 1 would mean "
                "no decay event is ever observed");
        }
        lambda_A_ = (1.0 - epsilon) * lambda_B;
        W_ = 1.0 / lambda_B;
        tau_A_ = W_ / (1.0 - epsilon);
    }

    double lambda_B() const noexcept { return lambda_B_; }
    double epsilon() const noexcept { return epsilon_; }
    /// Apparent decay rate lambda_A = (1 - epsilon) * lambda_B.
    double lambda_A() const noexcept { return lambda_A_; }
    /// Mean waiting time between branching events, W = 1 / lambda_B.
    double waiting_time() const noexcept { return W_; }
    /// Apparent lifetime tau_A = W / (1 - epsilon) = 1 / lambda_A.
    double tau_A() const noexcept { return tau_A_; }
    /// True when 0 < epsilon < 1 (the case the branching identities assume).
    bool strict_interior() const noexcept { return epsilon_ > 0.0; }

private:
    double lambda_B_;
    double epsilon_;
    double lambda_A_;
    double W_;
    double tau_A_;
};

/// Parameters of the waiting-time law on ground branch i: the decay on that
/// branch is the i-th branching event, so its time is Erlang(i, rate).
struct ErlangSpec {
    ErlangSpec(std::int64_t shape_in, double rate_in)
        : shape(shape_in), rate(rate_in) {
        if (shape < 1) {
            throw std::domain_error("ErlangSpec: shape must be >= 1");
        }
        if (!(rate > 0.0) || !std::isfinite(rate)) {
            throw std::domain_error("ErlangSpec: rate must be positive and finite");
        }
    }

    std::int64_t shape;
    double rate;
};

/// Complex amplitudes of a normalized superposition; squared magnitudes are
/// the Born-rule branch weights.
struct AmplitudeVector {
    std::vector<std::complex<double>> amplitudes;

    double norm_sq() const noexcept {
        double s = 0.0;
        for (const auto& a : amplitudes) {
            s += std::norm(a);
        }
        return s;
    }
};

/// Survival probability of a single excited state at time t under a pure
/// exponential law: S(t) = exp(-lambda t).
inline double exp_survival(double lambda, double t) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::domain_error("exp_survival: lambda must be positive and finite");
    }
    if (!(t >= 0.0)) {
        throw std::domain_error("exp_survival: t must be >= 0");
    }
    return std::exp(-lambda * t);
}

/// Golden-rule transition rate (2 pi / hbar) * |V|^2 rho, taking the already
/// combined product |V_eg(E)|^2 rho(E) as input. Natural units by default
/// (hbar = 1).
inline double golden_rule_rate(double matrix_element_sq_density, double hbar = 1.0) {
    if (!(matrix_element_sq_density > 0.0) || !std::isfinite(matrix_element_sq_density)) {
        throw std::domain_error("golden_rule_rate: |V|^2 rho must be positive and finite");
    }
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
        throw std::domain_error("golden_rule_rate: hbar must be positive and finite");
    }
    return 2.0 * 3.14159265358979323846 / hbar * matrix_element_sq_density;
}

/// Erlang density f_i(t) = lambda e^(-lambda t) (lambda t)^(i-1) / (i-1)!,
/// evaluated in log space via lgamma so large shapes neither overflow the
/// factorial nor underflow the power prematurely.
inline double erlang_pdf(const ErlangSpec& spec, double t) {
    if (!(t >= 0.0)) {
        throw std::domain_error("erlang_pdf: t must be >= 0");
    }
    if (t == 0.0) {
        return (spec.shape == 1) ? spec.rate : 0.0;
    }
    const double u = spec.rate * t;
    const double shape = static_cast<double>(spec.shape);
    const double log_pdf =
        std::log(spec.rate) - u + (shape - 1.0) * std::log(u) - std::lgamma(shape);
    return std::exp(log_pdf);
}

/// Erlang CDF F_i(t) = 1 - S_i(t), the regularized lower incomplete gamma
/// P(i, lambda t).
inline double erlang_cdf(const ErlangSpec& spec, double t) {
    if (!(t >= 0.0)) {
        throw std::domain_error("erlang_cdf: t must be >= 0");
    }
    if (t == 0.0) {
        return 0.0;
    }
    return special::gamma_p(static_cast<double>(spec.shape), spec.rate * t);
}

/// Survival function of the excited state on ground branch i:
/// S_i(t) = e^(-lambda t) sum_{n=1..i} (lambda t)^(n-1) / (n-1)!,
/// equal to the regularized upper incomplete gamma Q(i, lambda t).
inline double erlang_survival(const ErlangSpec& spec, double t) {
    if (!(t >= 0.0)) {
        throw std::domain_error("erlang_survival: t must be >= 0");
    }
    if (t == 0.0) {
        return 1.0;
    }
    return special::gamma_q(static_cast<double>(spec.shape), spec.rate * t);
}

/// Fraction of observer lineages that see their decay at the i-th branching
/// event: N_i / N = (1 - epsilon) * epsilon^(i-1).
inline double branch_weight(double epsilon, std::int64_t i) {
    if (!(epsilon >= 0.0) || !(epsilon < 1.0)) {
        throw std::domain_error("branch_weight: epsilon must lie in [0, 1)");
    }
    if (i < 1) {
        throw std::domain_error("branch_weight: branch index must be >= 1");
    }
    if (i == 1) {
        return 1.0 - epsilon; // epsilon^0 = 1 even at epsilon = 0
    }
    return (1.0 - epsilon) * std::pow(epsilon, static_cast<double>(i - 1));
}

/// Weighted-average apparent lifetime tau_A = W / (1 - epsilon).
inline double apparent_lifetime(const RateParams& params) {
    return params.tau_A();
}

/// Apparent decay-time density: the geometric mixture of Erlang laws
/// collapses exactly to f_A(t) = lambda_A e^(-lambda_A t).
inline double mixture_pdf(const RateParams& params, double t) {
    if (!(t >= 0.0)) {
        throw std::domain_error("mixture_pdf: t must be >= 0");
    }
    return params.lambda_A() * std::exp(-params.lambda_A() * t);
}

/// Apparent survival function S_A(t) = e^(-(1 - epsilon) lambda_B t).
inline double mixture_survival(const RateParams& params, double t) {
    if (!(t >= 0.0)) {
        throw std::domain_error("mixture_survival: t must be >= 0");
    }
    return std::exp(-params.lambda_A() * t);
}

/// beta = epsilon / (1 - epsilon) = sum_{i>=1} epsilon^i. Only defined on the
/// open interval: the geometric rearrangement behind it degenerates at both
/// endpoints.
inline double beta(double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw std::domain_error("beta: epsilon must lie strictly in (0, 1)");
    }
    return epsilon / (1.0 - epsilon);
}

/// Born-rule branch weights |a_j|^2 of a normalized superposition.
/// Rejects input whose squared magnitudes do not sum to 1 within 1e-9,
/// reporting the deficit.
inline std::vector<double> born_weights(const AmplitudeVector& amps) {
    if (amps.amplitudes.empty()) {
        throw std::invalid_argument("born_weights: empty amplitude vector");
    }
    const double norm_sq = amps.norm_sq();
    const double deficit = norm_sq - 1.0;
    if (std::abs(deficit) > 1e-9) {
        std::ostringstream msg;
        msg << "born_weights: amplitudes are not normalized; |a|^2 sums to "
            << norm_sq << " (deficit " << deficit << ")";
        throw std::invalid_argument(msg.str());
    }
    std::vector<double> weights;
    weights.reserve(amps.amplitudes.size());
    for (const auto& a : amps.amplitudes) {
        weights.push_back(std::norm(a));
    }
    return weights;
}

} // namespace everett
