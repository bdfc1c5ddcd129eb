#pragma once

// Estimators connecting observed decay data back to the model parameters.
//
// The observed sample is exactly exponential with rate
// lambda_A = (1 - epsilon) * lambda_B, so lambda_A is recovered by the
// standard exponential MLE and epsilon follows by inverting that relation
// against a theoretical lambda_B. Negative epsilon estimates are reported
// as-is; the one-sided upper limit is the physically meaningful summary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "everett/sim.hpp"
#include "everett/special.hpp"

namespace everett::estimate {

/// Sample size above which mle_lambda switches from the exact gamma pivot
/// (2 lambda sum(t) ~ chi-square with 2n dof) to the normal approximation
/// lambda_hat * (1 -+ z / sqrt(n)).
inline constexpr std::uint64_t kExactCiMaxN = 10000;

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct RateEstimate {
    double lambda_A_hat = 0.0;
    ConfidenceInterval ci;
};

struct TestResult {
    double statistic = 0.0;
    bool pass = false;
};

/// Full estimation summary for one dataset.
struct EstimateResult {
    double lambda_A_hat = 0.0;
    ConfidenceInterval lambda_A_ci;
    double epsilon_hat = 0.0;
    ConfidenceInterval epsilon_ci;
    double epsilon_upper_limit = 0.0;
    double ks_stat = 0.0;
    bool ks_pass = false;
    double chi2_stat = 0.0;
    double confidence = 0.95;
    std::uint64_t n = 0;
};

namespace detail {

inline double sum_times(const sim::DecayDataset& dataset) {
    double sum = 0.0;
    double comp = 0.0;
    for (const auto& rec : dataset.records) {
        if (!(rec.decay_time > 0.0)) {
            throw std::invalid_argument("estimate: all decay times must be positive");
        }
        const double y = rec.decay_time - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

inline void check_confidence(double confidence) {
    if (!(confidence > 0.0) || !(confidence < 1.0)) {
        throw std::domain_error("estimate: confidence must lie in (0, 1)");
    }
}

/// One-sided lower confidence bound for the rate at the given level.
inline double lambda_lower_bound(std::uint64_t n, double sum_t, double level) {
    const double nd = static_cast<double>(n);
    if (n <= kExactCiMaxN) {
        return special::chi2_quantile(1.0 - level, 2.0 * nd) / (2.0 * sum_t);
    }
    const double z = special::normal_quantile(level);
    return (nd / sum_t) * (1.0 - z / std::sqrt(nd));
}

} // namespace detail

/// Exponential-rate MLE lambda_hat = n / sum(t) with a two-sided confidence
/// interval: exact gamma pivot for n <= kExactCiMaxN, normal approximation
/// above.
inline RateEstimate mle_lambda(const sim::DecayDataset& dataset, double confidence) {
    detail::check_confidence(confidence);
    const std::uint64_t n = dataset.records.size();
    if (n < 2) {
        throw std::invalid_argument("mle_lambda: need at least 2 records");
    }
    const double sum_t = detail::sum_times(dataset);
    const double nd = static_cast<double>(n);
    RateEstimate est;
    est.lambda_A_hat = nd / sum_t;
    const double alpha = 1.0 - confidence;
    if (n <= kExactCiMaxN) {
        est.ci.lo = special::chi2_quantile(0.5 * alpha, 2.0 * nd) / (2.0 * sum_t);
        est.ci.hi = special::chi2_quantile(1.0 - 0.5 * alpha, 2.0 * nd) / (2.0 * sum_t);
    } else {
        const double z = special::normal_quantile(1.0 - 0.5 * alpha);
        est.ci.lo = est.lambda_A_hat * (1.0 - z / std::sqrt(nd));
        est.ci.hi = est.lambda_A_hat * (1.0 + z / std::sqrt(nd));
    }
    return est;
}

/// Inverts lambda_A = (1 - epsilon) lambda_B: epsilon = 1 - lambda_A/lambda_B.
/// May be negative under sampling noise; the sign is preserved.
inline double epsilon_from_rates(double lambda_A_hat, double lambda_B_theory) {
    if (!(lambda_A_hat > 0.0) || !std::isfinite(lambda_A_hat)) {
        throw std::domain_error("epsilon_from_rates: lambda_A_hat must be positive and finite");
    }
    if (!(lambda_B_theory > 0.0) || !std::isfinite(lambda_B_theory)) {
        throw std::domain_error("epsilon_from_rates: lambda_B must be positive and finite");
    }
    return 1.0 - lambda_A_hat / lambda_B_theory;
}

/// One-sided upper confidence bound on epsilon at the given level, from the
/// one-sided lower bound of the lambda_A interval:
/// epsilon_UL = 1 - lambda_lo / lambda_B.
inline double epsilon_upper_limit(const sim::DecayDataset& dataset,
                                  double lambda_B_theory, double confidence) {
    detail::check_confidence(confidence);
    if (!(lambda_B_theory > 0.0) || !std::isfinite(lambda_B_theory)) {
        throw std::domain_error("epsilon_upper_limit: lambda_B must be positive and finite");
    }
    const std::uint64_t n = dataset.records.size();
    if (n < 2) {
        throw std::invalid_argument("epsilon_upper_limit: need at least 2 records");
    }
    const double sum_t = detail::sum_times(dataset);
    const double lambda_lo = detail::lambda_lower_bound(n, sum_t, confidence);
    return 1.0 - lambda_lo / lambda_B_theory;
}

/// Smallest N whose one-sided normal bound resolves epsilon_target:
/// z(confidence) * (1 - eps) / sqrt(N) <= eps.
inline std::uint64_t required_sample_size(double epsilon_target, double confidence) {
    if (!(epsilon_target > 0.0) || !(epsilon_target < 1.0)) {
        throw std::domain_error("required_sample_size: epsilon_target must lie in (0, 1)");
    }
    detail::check_confidence(confidence);
    const double z = special::normal_quantile(confidence);
    const double root = z * (1.0 - epsilon_target) / epsilon_target;
    const double n = std::ceil(root * root);
    return n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
}

/// One-sample Kolmogorov-Smirnov test of the decay times against
/// Exponential(lambda). Pass iff the statistic is below the asymptotic
/// critical value sqrt(-ln(alpha/2)/2)/sqrt(n).
inline TestResult ks_exponential(const sim::DecayDataset& dataset, double lambda,
                                 double alpha = 0.01) {
    if (dataset.records.empty()) {
        throw std::invalid_argument("ks_exponential: empty dataset");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::domain_error("ks_exponential: lambda must be positive and finite");
    }
    std::vector<double> times;
    times.reserve(dataset.records.size());
    for (const auto& rec : dataset.records) {
        times.push_back(rec.decay_time);
    }
    std::sort(times.begin(), times.end());
    const double n = static_cast<double>(times.size());
    double d = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double f = 1.0 - std::exp(-lambda * times[k]);
        const double upper = static_cast<double>(k + 1) / n - f;
        const double lower = f - static_cast<double>(k) / n;
        d = std::max({d, upper, lower});
    }
    TestResult result;
    result.statistic = d;
    result.pass = d < special::ks_critical(alpha, times.size());
    return result;
}

/// Pearson chi-square of branch-class counts against the geometric
/// expectations N (1-eps) eps^(i-1). counts must come from
/// branch_class_counts (classes 1..max_i plus overflow). Tail classes are
/// pooled so every expected count is >= 5; dof = pooled classes - 1.
inline TestResult chi2_geometric(const std::vector<std::uint64_t>& counts,
                                 double epsilon, double alpha = 0.01) {
    if (!(epsilon >= 0.0) || !(epsilon < 1.0)) {
        throw std::domain_error("chi2_geometric: epsilon must lie in [0, 1)");
    }
    if (counts.size() < 2) {
        throw std::invalid_argument("chi2_geometric: counts must include an overflow bucket");
    }
    std::uint64_t total = 0;
    for (auto c : counts) {
        total += c;
    }
    if (total == 0) {
        throw std::invalid_argument("chi2_geometric: total count is zero");
    }
    const double n = static_cast<double>(total);
    const std::size_t max_i = counts.size() - 1;

    // expected mass per class; overflow bucket carries the geometric tail
    std::vector<double> expected(counts.size());
    for (std::size_t k = 0; k < max_i; ++k) {
        expected[k] = n * branch_weight(epsilon, static_cast<std::int64_t>(k + 1));
    }
    expected[max_i] = n * std::pow(epsilon, static_cast<double>(max_i));

    // a class with zero expectation (epsilon = 0) cannot be pooled away:
    // any observation there is an outright contradiction of the law
    TestResult result;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (expected[k] == 0.0 && counts[k] > 0) {
            result.statistic = std::numeric_limits<double>::infinity();
            result.pass = false;
            return result;
        }
    }

    // greedy pooling over the positive-expectation classes: close a group
    // once its expectation reaches 5 and the remaining tail can still form one
    std::vector<double> exp_pooled;
    std::vector<double> obs_pooled;
    double remaining = 0.0;
    for (double e : expected) {
        remaining += e;
    }
    double e_acc = 0.0;
    double o_acc = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        e_acc += expected[k];
        o_acc += static_cast<double>(counts[k]);
        remaining -= expected[k];
        if (e_acc >= 5.0 && (remaining >= 5.0 || k + 1 == counts.size())) {
            exp_pooled.push_back(e_acc);
            obs_pooled.push_back(o_acc);
            e_acc = 0.0;
            o_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp_pooled.empty()) {
            exp_pooled.push_back(e_acc);
            obs_pooled.push_back(o_acc);
        } else {
            exp_pooled.back() += e_acc;
            obs_pooled.back() += o_acc;
        }
    }

    double stat = 0.0;
    for (std::size_t k = 0; k < exp_pooled.size(); ++k) {
        const double diff = obs_pooled[k] - exp_pooled[k];
        stat += diff * diff / exp_pooled[k];
    }
    result.statistic = stat;
    const std::size_t dof = exp_pooled.size() - 1;
    if (dof == 0) {
        result.pass = stat == 0.0;
    } else {
        result.pass = stat < special::chi2_quantile(1.0 - alpha, static_cast<double>(dof));
    }
    return result;
}

/// Convenience driver: full EstimateResult for one dataset against a
/// theoretical lambda_B. The chi-square entry tests the branch classes
/// against the geometric law at the estimated epsilon (clamped into [0, 1)),
/// which only carries information for simulated data.
inline EstimateResult estimate_dataset(const sim::DecayDataset& dataset,
                                       double lambda_B_theory, double confidence,
                                       double alpha = 0.01) {
    const RateEstimate rate = mle_lambda(dataset, confidence);
    EstimateResult result;
    result.n = dataset.records.size();
    result.confidence = confidence;
    result.lambda_A_hat = rate.lambda_A_hat;
    result.lambda_A_ci = rate.ci;
    result.epsilon_hat = epsilon_from_rates(rate.lambda_A_hat, lambda_B_theory);
    result.epsilon_ci = {epsilon_from_rates(rate.ci.hi, lambda_B_theory),
                         epsilon_from_rates(rate.ci.lo, lambda_B_theory)};
    result.epsilon_upper_limit = epsilon_upper_limit(dataset, lambda_B_theory, confidence);
    const TestResult ks = ks_exponential(dataset, rate.lambda_A_hat, alpha);
    result.ks_stat = ks.statistic;
    result.ks_pass = ks.pass;
    const double eps_for_chi2 = std::clamp(result.epsilon_hat, 0.0, 1.0 - 1e-12);
    std::int64_t max_i = 1;
    for (const auto& rec : dataset.records) {
        max_i = std::max<std::int64_t>(max_i, static_cast<std::int64_t>(rec.branch_index));
    }
    max_i = std::min<std::int64_t>(max_i, 64);
    const auto counts = sim::branch_class_counts(dataset, max_i);
    result.chi2_stat = chi2_geometric(counts, eps_for_chi2, alpha).statistic;
    return result;
}

} // namespace everett::estimate
