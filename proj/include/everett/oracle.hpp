// Brute-force verification of the closed forms in analytic.hpp. Every
// identity the model rests on (the geometric branch-weight sum, the mean
// lifetime, the mixture density, the double-sum survival law, Erlang
// normalization) is re-evaluated here by truncated series or quadrature and
// compared against the closed form, with the truncation point chosen from an
// a-priori tail bound so the reported error budget is honest.
//
// Nothing in this header reuses the closed-form shortcuts it is checking:
// series are summed term by term and integrals are done numerically.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "everett/analytic.hpp"

namespace everett::oracle {

/// Identities this module can check, named after the quantity each one pins
/// down.
enum class Identity {
    beta_series,
    tau_A_series,
    f_A_series,
    S_A_column_sum,
    pdf_normalization,
};

inline const char* to_string(Identity id) {
    switch (id) {
        case Identity::beta_series: return "beta_series";
        case Identity::tau_A_series: return "tau_A_series";
        case Identity::f_A_series: return "f_A_series";
        case Identity::S_A_column_sum: return "S_A_column_sum";
        case Identity::pdf_normalization: return "pdf_normalization";
    }
    throw std::invalid_argument("to_string: unknown identity");
}

/// Outcome of one check: the largest deviation found between the truncated
/// series (or quadrature) and the closed form it is supposed to reproduce.
///
/// `params` records the rate parameters the check ran at; for the Erlang
/// normalization check `shape` carries the Erlang shape and epsilon is
/// irrelevant (stored as 0). `t_grid` is empty for identities that do not
/// sweep over time. pass is exactly max_abs_error <= tolerance.
struct IdentityReport {
    Identity identity_name;
    RateParams params;
    std::int64_t shape;
    std::vector<double> t_grid;
    double max_abs_error;
    std::int64_t terms_used;
    double tolerance;
    bool pass;
};

namespace detail {

/// Fraction of the tolerance granted to truncation; the rest is headroom for
/// accumulated rounding, so a passing report never hinges on the tail bound
/// being exactly tight.
constexpr double kTailFraction = 0.25;

/// Compensated accumulator: the carry term recovers what plain addition
/// rounds away, keeping thousands-term series accurate to a few ulps of the
/// total.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) noexcept {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const noexcept { return sum; }
};

inline void check_tol(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw std::domain_error("oracle: tolerance must be positive and finite");
    }
}

inline void check_grid(const std::vector<double>& t_grid) {
    if (t_grid.empty()) {
        throw std::invalid_argument("oracle: t_grid must contain at least one point");
    }
    for (double t : t_grid) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("oracle: t_grid entries must be finite and >= 0");
        }
    }
}

/// Smallest M >= 1 whose geometric tail eps^(M+1)/(1-eps) drops below target.
/// Jumps near the closed-form solution first so that eps close to 1 does not
/// turn the search into a unit-step crawl.
inline std::int64_t geometric_terms(double epsilon, double target) {
    auto tail = [&](std::int64_t k) {
        return std::pow(epsilon, static_cast<double>(k) + 1.0) / (1.0 - epsilon);
    };
    std::int64_t m = 1;
    const double rhs = std::log(target * (1.0 - epsilon));
    if (rhs < 0.0) {
        const double est = rhs / std::log(epsilon) - 1.0;
        if (est > 1.0) {
            m = static_cast<std::int64_t>(est);
        }
    }
    while (m > 1 && tail(m - 1) < target) {
        --m;
    }
    while (tail(m) >= target) {
        ++m;
    }
    return m;
}

/// Smallest M >= 1 for which the exact tail of the mean-lifetime series,
/// W eps^M (M + 1/(1-eps)), drops below target. Solved by a short fixed-point
/// iteration on the log form, then settled exactly.
inline std::int64_t lifetime_terms(double epsilon, double W, double target) {
    const double guard = 1.0 / (1.0 - epsilon);
    auto tail = [&](std::int64_t k) {
        const double kk = static_cast<double>(k);
        return W * std::pow(epsilon, kk) * (kk + guard);
    };
    const double log_eps = std::log(epsilon);
    double est = std::max(1.0, guard);
    for (int pass = 0; pass < 4; ++pass) {
        const double rhs = std::log(target / W) - std::log(est + guard);
        if (!(rhs < 0.0)) {
            est = 1.0;
            break;
        }
        est = std::max(1.0, rhs / log_eps);
    }
    std::int64_t m = static_cast<std::int64_t>(est);
    if (m < 1) {
        m = 1;
    }
    while (m > 1 && tail(m - 1) < target) {
        --m;
    }
    while (tail(m) >= target) {
        ++m;
    }
    return m;
}

/// Smallest M >= 1 with eps^M < target; eps^M is the exact total weight of
/// branches beyond the M-th, which bounds any series whose terms are branch
/// weights times numbers in [0, 1].
inline std::int64_t weight_tail_terms(double epsilon, double target) {
    if (epsilon == 0.0) {
        return 1;
    }
    std::int64_t m = 1;
    const double est = std::log(target) / std::log(epsilon);
    if (est > 1.0) {
        m = static_cast<std::int64_t>(est);
    }
    while (m > 1 && std::pow(epsilon, static_cast<double>(m) - 1.0) < target) {
        --m;
    }
    while (std::pow(epsilon, static_cast<double>(m)) >= target) {
        ++m;
    }
    return m;
}

/// Number of leading terms of a series prefac * sum_k x^k/k! (k from 0) that
/// must be kept so the remainder falls below target. Past k >= x the
/// remainder is dominated by a geometric series with ratio x/(k+1), giving
/// the bound prefac * x^k/k! * (k+1)/(k+1-x); prefac is passed in log form.
/// prefac * e^x bounds the whole sum, so if that is already below target a
/// single term suffices.
inline std::int64_t poisson_terms(double x, double prefac_log, double target) {
    if (x == 0.0) {
        return 1;
    }
    const double log_target = std::log(target);
    if (prefac_log + x < log_target) {
        return 1;
    }
    const double log_x = std::log(x);
    std::int64_t k = static_cast<std::int64_t>(x) + 1;
    for (;; ++k) {
        const double kk = static_cast<double>(k);
        const double log_tail = prefac_log + kk * log_x - std::lgamma(kk + 1.0) +
                                std::log((kk + 1.0) / (kk + 1.0 - x));
        if (log_tail < log_target) {
            break;
        }
    }
    return k;
}

/// One Poisson-type series term x^k/k! * exp(-u), evaluated in log space so
/// that large k and large u never overflow an intermediate value.
inline double poisson_weight(std::int64_t k, double x, double u) {
    if (k == 0) {
        return std::exp(-u);
    }
    const double kk = static_cast<double>(k);
    return std::exp(kk * std::log(x) - u - std::lgamma(kk + 1.0));
}

inline double simpson_slice(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

/// Classic adaptive Simpson with Richardson correction. `depth` counts down;
/// the first few levels always split so a deceptively symmetric integrand
/// cannot pass the error test before the peak has been seen.
inline double integrate_pdf(const ErlangSpec& spec, double a, double m, double b, double fa,
                            double fm, double fb, double whole, double eps, int depth,
                            int forced_splits, std::int64_t& evals) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = erlang_pdf(spec, lm);
    const double frm = erlang_pdf(spec, rm);
    evals += 2;
    const double left = simpson_slice(a, m, fa, flm, fm);
    const double right = simpson_slice(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || (forced_splits <= 0 && std::abs(delta) <= 15.0 * eps)) {
        return left + right + delta / 15.0;
    }
    return integrate_pdf(spec, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1,
                         forced_splits - 1, evals) +
           integrate_pdf(spec, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1,
                         forced_splits - 1, evals);
}

}  // namespace detail

/// Checks the geometric identity sum_{i>=1} eps^i = eps/(1-eps) by summing
/// until the exact tail eps^(M+1)/(1-eps) is negligible. The identity only
/// makes sense strictly inside (0, 1): the sum is empty at 0 and divergent
/// at 1.
inline IdentityReport verify_beta_series(double epsilon, double tol) {
    detail::check_tol(tol);
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw std::domain_error(
            "verify_beta_series: epsilon must lie strictly inside (0, 1); the "
            "series is empty at 0 and divergent at 1");
    }
    const std::int64_t m = detail::geometric_terms(epsilon, detail::kTailFraction * tol);
    detail::KahanSum series;
    for (std::int64_t i = 1; i <= m; ++i) {
        series.add(std::pow(epsilon, static_cast<double>(i)));
    }
    const double err = std::abs(series.value() - beta(epsilon));
    return IdentityReport{Identity::beta_series, RateParams(1.0, epsilon),
                          0,       {},
                          err,     m,
                          tol,     err <= tol};
}

/// Checks that the branch-weighted mean decay time, sum_i weight_i * (i W),
/// equals the closed-form apparent lifetime W/(1-eps). At eps = 0 only the
/// first branch exists and the sum is a single exact term.
inline IdentityReport verify_tau_series(const RateParams& params, double tol) {
    detail::check_tol(tol);
    const double eps = params.epsilon();
    const double W = params.waiting_time();
    if (eps == 0.0) {
        const double err = std::abs(W - params.tau_A());
        return IdentityReport{Identity::tau_A_series, params, 0, {}, err, 1, tol, err <= tol};
    }
    const std::int64_t m = detail::lifetime_terms(eps, W, detail::kTailFraction * tol);
    detail::KahanSum series;
    for (std::int64_t i = 1; i <= m; ++i) {
        series.add(branch_weight(eps, i) * static_cast<double>(i) * W);
    }
    const double err = std::abs(series.value() - params.tau_A());
    return IdentityReport{Identity::tau_A_series, params, 0, {}, err, m, tol, err <= tol};
}

/// Checks that the branch-weighted mixture of Erlang densities collapses to
/// the single exponential density at the apparent rate, at every grid time.
/// Branch terms beyond the tail bound contribute less than a quarter of the
/// tolerance in total.
inline IdentityReport verify_fA_series(const RateParams& params, const std::vector<double>& t_grid,
                                       double tol) {
    detail::check_tol(tol);
    detail::check_grid(t_grid);
    const double eps = params.epsilon();
    const double lam = params.lambda_B();
    double max_err = 0.0;
    std::int64_t max_terms = 1;
    for (double t : t_grid) {
        const double u = lam * t;
        const double x = eps * u;
        const std::int64_t m = detail::poisson_terms(x, std::log((1.0 - eps) * lam) - u,
                                                     detail::kTailFraction * tol);
        detail::KahanSum series;
        for (std::int64_t i = 1; i <= m; ++i) {
            series.add(branch_weight(eps, i) * erlang_pdf(ErlangSpec(i, lam), t));
        }
        max_err = std::max(max_err, std::abs(series.value() - mixture_pdf(params, t)));
        max_terms = std::max(max_terms, m);
    }
    return IdentityReport{Identity::f_A_series, params, 0,   t_grid,
                          max_err,              max_terms, tol, max_err <= tol};
}

/// Checks the survival double sum both ways against exp(-lambda_A t).
///
/// Column order groups the double sum by powers of (eps u): the inner
/// geometric sums telescope, leaving exp(-u) * sum_k (eps u)^k / k!. Row
/// order walks branch by branch, accumulating each branch's survival
/// probability from a running Poisson partial sum. Both truncations carry
/// their own tail bounds, and both results are compared to the closed form,
/// so a pass certifies that exchanging the summation order was legitimate.
inline IdentityReport verify_SA_column_sum(const RateParams& params,
                                           const std::vector<double>& t_grid, double tol) {
    detail::check_tol(tol);
    detail::check_grid(t_grid);
    const double eps = params.epsilon();
    const double lam = params.lambda_B();
    double max_err = 0.0;
    std::int64_t max_terms = 1;
    for (double t : t_grid) {
        const double u = lam * t;
        double row = 1.0;
        double col = 1.0;
        std::int64_t used = 1;
        if (u > 0.0) {
            const double x = eps * u;
            const std::int64_t col_count =
                detail::poisson_terms(x, -u, detail::kTailFraction * tol);
            detail::KahanSum col_sum;
            for (std::int64_t k = 0; k < col_count; ++k) {
                col_sum.add(detail::poisson_weight(k, x, u));
            }
            col = col_sum.value();

            const std::int64_t row_count =
                detail::weight_tail_terms(eps, detail::kTailFraction * tol);
            detail::KahanSum row_sum;
            detail::KahanSum survival;
            for (std::int64_t i = 1; i <= row_count; ++i) {
                survival.add(detail::poisson_weight(i - 1, u, u));
                row_sum.add(branch_weight(eps, i) * survival.value());
            }
            row = row_sum.value();
            used = row_count + col_count;
        }
        const double closed = mixture_survival(params, t);
        max_err = std::max({max_err, std::abs(col - closed), std::abs(row - closed)});
        max_terms = std::max(max_terms, used);
    }
    return IdentityReport{Identity::S_A_column_sum, params, 0,   t_grid,
                          max_err,                  max_terms, tol, max_err <= tol};
}

/// Checks that the Erlang density integrates to 1: adaptive Simpson over
/// [0, T*] with T* = (shape + 10 sqrt(shape))/rate, plus the exact survival
/// probability at T* standing in for the tail. terms_used counts density
/// evaluations.
inline IdentityReport verify_pdf_normalization(const ErlangSpec& spec, double tol) {
    detail::check_tol(tol);
    const double shape = static_cast<double>(spec.shape);
    const double t_star = (shape + 10.0 * std::sqrt(shape)) / spec.rate;
    const double mid = 0.5 * t_star;
    const double fa = erlang_pdf(spec, 0.0);
    const double fm = erlang_pdf(spec, mid);
    const double fb = erlang_pdf(spec, t_star);
    std::int64_t evals = 3;
    const double whole = detail::simpson_slice(0.0, t_star, fa, fm, fb);
    const double integral = detail::integrate_pdf(spec, 0.0, mid, t_star, fa, fm, fb, whole,
                                                  0.1 * tol, 48, 4, evals);
    const double total = integral + erlang_survival(spec, t_star);
    const double err = std::abs(total - 1.0);
    return IdentityReport{Identity::pdf_normalization, RateParams(spec.rate, 0.0),
                          spec.shape, {},
                          err,        evals,
                          tol,        err <= tol};
}

/// Parameter lattice for a full sweep of all five identities. The time grids
/// are chosen per rate so that lambda_B * t covers [0, u_max] uniformly.
struct SuiteConfig {
    std::vector<double> epsilons = {0.01, 0.1, 0.5, 0.9, 0.99};
    std::vector<double> rates = {0.1, 1.0, 10.0};
    std::vector<std::int64_t> shapes = {1, 2, 5, 10, 100};
    double u_max = 20.0;
    std::size_t grid_points = 41;
    double tol_series = 1e-12;
    double tol_quadrature = 1e-8;
};

/// Runs every identity over the whole lattice and returns the reports in a
/// fixed order (beta per epsilon, then tau/f_A/S_A per epsilon and rate, then
/// normalization per shape and rate). Epsilon values must lie strictly inside
/// (0, 1); the degenerate endpoints have their own dedicated unit checks.
inline std::vector<IdentityReport> run_identity_suite(const SuiteConfig& config = {}) {
    if (config.grid_points < 2) {
        throw std::invalid_argument("run_identity_suite: need at least two grid points");
    }
    if (!(config.u_max > 0.0) || !std::isfinite(config.u_max)) {
        throw std::invalid_argument("run_identity_suite: u_max must be positive and finite");
    }
    std::vector<IdentityReport> reports;
    for (double eps : config.epsilons) {
        reports.push_back(verify_beta_series(eps, config.tol_series));
    }
    for (double eps : config.epsilons) {
        for (double rate : config.rates) {
            const RateParams params(rate, eps);
            std::vector<double> grid(config.grid_points);
            for (std::size_t j = 0; j < config.grid_points; ++j) {
                const double u = config.u_max * static_cast<double>(j) /
                                 static_cast<double>(config.grid_points - 1);
                grid[j] = u / rate;
            }
            reports.push_back(verify_tau_series(params, config.tol_series));
            reports.push_back(verify_fA_series(params, grid, config.tol_series));
            reports.push_back(verify_SA_column_sum(params, grid, config.tol_series));
        }
    }
    for (std::int64_t shape : config.shapes) {
        for (double rate : config.rates) {
            reports.push_back(
                verify_pdf_normalization(ErlangSpec(shape, rate), config.tol_quadrature));
        }
    }
    return reports;
}

}  // namespace everett::oracle
