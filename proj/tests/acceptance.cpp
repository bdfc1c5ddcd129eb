// Acceptance gate: eight release criteria, one verdict line each, exit code
// equal to the number of failures. Runs the library in-process where that is
// the honest subject (distributional and estimator checks) and drives the
// evdecay binary where the criterion is about the shipped artifact (figure
// data, power output, file determinism).
//
// Every stochastic criterion runs at a pinned seed, so the verdicts are
// reproducible bit for bit. The seeds were chosen once, in the open: the
// underlying pass probabilities per random seed range from ~0.93 to ~0.999,
// and the pinned values sit comfortably inside their bands (margins are
// printed for inspection).

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "everett/everett.hpp"
#include "support/cli_runner.hpp"
#include "support/stats.hpp"

using namespace everett;

namespace {

int g_failures = 0;

void verdict(int num, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", num, detail.c_str());
    if (!pass) {
        ++g_failures;
    }
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

sim::DecayDataset simulate(double epsilon, std::uint64_t n, std::uint64_t seed,
                           sim::Sampler sampler, unsigned threads = 8) {
    sim::ExperimentConfig cfg;
    cfg.lambda_B = 1.0;
    cfg.epsilon = epsilon;
    cfg.n_particles = n;
    cfg.seed = seed;
    cfg.sampler = sampler;
    cfg.threads = threads;
    return sim::simulate_sample(cfg);
}

std::vector<double> times_of(const sim::DecayDataset& ds) {
    std::vector<double> out;
    out.reserve(ds.records.size());
    for (const auto& r : ds.records) {
        out.push_back(r.decay_time);
    }
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::vector<double> split_row(const std::string& row) {
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= row.size()) {
        std::size_t end = row.find(',', start);
        if (end == std::string::npos) {
            end = row.size();
        }
        vals.push_back(std::strtod(row.substr(start, end - start).c_str(), nullptr));
        start = end + 1;
    }
    return vals;
}

// 1. All five closed-form identities hold to 1e-12 (series) / 1e-8
//    (quadrature) across the full parameter lattice, in under 10 seconds.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    double worst = 0.0;
    std::size_t count = 0;
    try {
        const auto reports = oracle::run_identity_suite();
        count = reports.size();
        for (const auto& r : reports) {
            pass = pass && r.pass;
            worst = std::max(worst, r.max_abs_error / r.tolerance);
        }
    } catch (const std::exception& ex) {
        verdict(1, false, std::string("identity suite threw: ") + ex.what());
        return;
    }
    const double elapsed = seconds_since(t0);
    pass = pass && count == 65 && elapsed < 10.0;
    verdict(1, pass,
            fmt("identity suite: %zu/65 checks pass, worst error %.2f%% of tolerance, "
                "%.2f s (< 10 s)",
                count, 100.0 * worst, elapsed));
}

// 2. The survival-curve table has (S1..S5) = (0.367879, 0.735759, 0.919699,
//    0.981012, 0.996340) +- 1e-6 at normalized time 1, ordered S1 <= ... <= S5
//    at every grid point.
void criterion_2() {
    const auto r = testsupport::run_cli("figure2");
    if (r.exit_code != 0) {
        verdict(2, false, fmt("figure2 exited with %d", r.exit_code));
        return;
    }
    const auto lines = split_lines(r.out);
    const double want[] = {0.367879, 0.735759, 0.919699, 0.981012, 0.996340};
    bool found_unit_row = false;
    double worst_dev = 0.0;
    bool ordered = true;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto vals = split_row(lines[k]);
        if (vals.size() != 6) {
            verdict(2, false, fmt("row %zu has %zu columns", k, vals.size()));
            return;
        }
        for (std::size_t i = 2; i < 6; ++i) {
            ordered = ordered && vals[i] >= vals[i - 1];
        }
        if (vals[0] == 1.0) {
            found_unit_row = true;
            for (std::size_t i = 0; i < 5; ++i) {
                worst_dev = std::max(worst_dev, std::fabs(vals[i + 1] - want[i]));
            }
        }
    }
    const bool pass = found_unit_row && worst_dev <= 1e-6 && ordered;
    verdict(2, pass,
            fmt("figure2 at t/W=1: worst |S_i - ref| = %.2e (<= 1e-6), ordering %s "
                "on %zu rows",
                worst_dev, ordered ? "holds" : "BROKEN", lines.size() - 1));
}

// 3. The mixture of Erlang laws is exponential: KS vs Exponential(0.5) at
//    alpha = 0.01 for N = 1e6, mean lifetime 2.000 +- 0.006, under 30 s.
void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ds = simulate(0.5, 1000000, 300000, sim::Sampler::direct);
    const auto ks = estimate::ks_exponential(ds, 0.5, 0.01);
    double sum = 0.0;
    for (const auto& rec : ds.records) {
        sum += rec.decay_time;
    }
    const double mean = sum / static_cast<double>(ds.records.size());
    const double elapsed = seconds_since(t0);
    const bool pass = ks.pass && std::fabs(mean - 2.0) <= 0.006 && elapsed < 30.0;
    verdict(3, pass,
            fmt("N=1e6 at epsilon=0.5: KS D=%.5f (crit %.5f), mean lifetime "
                "%.4f (2.000 +- 0.006), %.1f s (< 30 s)",
                ks.statistic, special::ks_critical(0.01, ds.records.size()), mean,
                elapsed));
}

// 4. Mechanistic and direct samplers are statistically indistinguishable at
//    N = 1e5 for epsilon in {0, 0.1, 0.5, 0.9}: two-sample KS and branch-class
//    homogeneity chi-square, both at alpha = 0.01.
void criterion_4() {
    bool pass = true;
    std::string detail = "mechanistic vs direct at N=1e5:";
    for (double eps : {0.0, 0.1, 0.5, 0.9}) {
        const auto seed = 400000 + static_cast<std::uint64_t>(eps * 1000.0);
        const auto mech = simulate(eps, 100000, seed, sim::Sampler::mechanistic);
        const auto dir = simulate(eps, 100000, seed + 17, sim::Sampler::direct);
        const double d = testsupport::ks_two_sample(times_of(mech), times_of(dir));
        const double dcrit = special::ks_critical_two_sample(0.01, mech.records.size(),
                                                             dir.records.size());
        const auto chi = testsupport::chi2_homogeneity(sim::branch_class_counts(mech, 30),
                                                       sim::branch_class_counts(dir, 30));
        const bool chi_ok = chi.dof == 0
                                ? chi.statistic == 0.0
                                : chi.statistic < special::chi2_quantile(
                                                      0.99, static_cast<double>(chi.dof));
        pass = pass && d < dcrit && chi_ok;
        detail += fmt(" [eps=%.1f KS %.4f/%.4f chi2 %s]", eps, d, dcrit,
                      chi_ok ? "ok" : "FAIL");
    }
    verdict(4, pass, detail);
}

// 5. Branch classes follow the geometric law at epsilon = 0.5, N = 1e6:
//    class-1 fraction 0.500 +- 0.0015 and chi-square pass at alpha = 0.01.
void criterion_5() {
    const auto ds = simulate(0.5, 1000000, 500000, sim::Sampler::direct);
    const auto counts = sim::branch_class_counts(ds, 40);
    const double frac =
        static_cast<double>(counts[0]) / static_cast<double>(ds.records.size());
    const auto chi = estimate::chi2_geometric(counts, 0.5, 0.01);
    const bool pass = std::fabs(frac - 0.5) <= 0.0015 && chi.pass;
    verdict(5, pass,
            fmt("N=1e6 at epsilon=0.5: class-1 fraction %.4f (0.500 +- 0.0015), "
                "chi2 %.2f %s at alpha=0.01",
                frac, chi.statistic, chi.pass ? "passes" : "FAILS"));
}

// 6. Estimation round trip at N = 1e4 over 1000 replicates for epsilon in
//    {0, 0.1, 0.5}: the replicate-mean epsilon_hat lands within 3 standard
//    errors of the truth and the 95% intervals cover it at >= 94%.
void criterion_6() {
    bool pass = true;
    std::string detail = "1000 replicates of N=1e4:";
    const double epsilons[] = {0.0, 0.1, 0.5};
    for (int e = 0; e < 3; ++e) {
        const double eps = epsilons[e];
        const std::uint64_t base = 610000 + 1000ull * static_cast<std::uint64_t>(e);
        int covered = 0;
        std::vector<double> hats;
        hats.reserve(1000);
        for (int rep = 0; rep < 1000; ++rep) {
            const auto ds = simulate(eps, 10000, base + static_cast<std::uint64_t>(rep),
                                     sim::Sampler::direct, 2);
            const auto est = estimate::mle_lambda(ds, 0.95);
            hats.push_back(estimate::epsilon_from_rates(est.lambda_A_hat, 1.0));
            const double lo = 1.0 - est.ci.hi;
            const double hi = 1.0 - est.ci.lo;
            if (lo <= eps && eps <= hi) {
                ++covered;
            }
        }
        const double m = testsupport::mean(hats);
        const double se_mean =
            std::sqrt(testsupport::sample_variance(hats) / static_cast<double>(hats.size()));
        const bool mean_ok = std::fabs(m - eps) <= 3.0 * se_mean;
        const bool cov_ok = covered >= 940;
        pass = pass && mean_ok && cov_ok;
        detail += fmt(" [eps=%.1f mean %.5f (truth +- %.5f) coverage %d/1000]", eps, m,
                      3.0 * se_mean, covered);
    }
    verdict(6, pass, detail);
}

// 7. Upper-limit scaling at true epsilon = 0, N = 1e7: the one-sided 95%
//    upper limit is <= 1e-3 in at least 48 of 50 replicates, and
//    `power 0.001 0.95` reports the consistent ~2.7e6 sample size.
void criterion_7() {
    int hits = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto ds = simulate(0.0, 10000000, 700000 + static_cast<std::uint64_t>(rep),
                                 sim::Sampler::direct);
        const double ul = estimate::epsilon_upper_limit(ds, 1.0, 0.95);
        worst = std::max(worst, ul);
        if (ul <= 1e-3) {
            ++hits;
        }
    }
    const auto power = testsupport::run_cli("power 0.001 0.95");
    const long long n = std::strtoll(power.out.c_str(), nullptr, 10);
    const bool power_ok = power.exit_code == 0 && n >= 2500000 && n <= 2900000;
    const bool pass = hits >= 48 && power_ok;
    verdict(7, pass,
            fmt("epsilon_UL <= 1e-3 in %d/50 replicates at N=1e7 (need >= 48; "
                "worst %.2e); power 0.001 0.95 -> %lld (~2.7e6 %s)",
                hits, worst, n, power_ok ? "ok" : "FAIL"));
}

// 8. Dataset files are byte-identical across reruns and across thread counts
//    1 and 8 for a fixed (config, seed).
void criterion_8() {
    testsupport::CommandResult runs[3];
    std::string bytes[3];
    const char* tags[3] = {"first run", "second run", "threads=8"};
    bool pass = true;
    std::string detail = "simulate determinism:";
    for (int k = 0; k < 3; ++k) {
        const auto out = testsupport::temp_file(fmt("acceptance_det_%d", k));
        const std::string extra = (k == 2) ? " --threads 8" : " --threads 1";
        runs[k] = testsupport::run_cli(
            "simulate --lambda-b 1 --epsilon 0.5 --n 100000 --seed 42 --out " +
            out.string() + extra);
        bytes[k] = testsupport::slurp(out);
        std::error_code ec;
        std::filesystem::remove(out, ec);
        if (runs[k].exit_code != 0 || bytes[k].empty()) {
            pass = false;
            detail += fmt(" [%s: exit %d]", tags[k], runs[k].exit_code);
        }
    }
    const bool rerun_same = bytes[0] == bytes[1];
    const bool threads_same = bytes[0] == bytes[2];
    pass = pass && rerun_same && threads_same;
    detail += fmt(" rerun %s, threads 1 vs 8 %s (%zu bytes)",
                  rerun_same ? "identical" : "DIFFER",
                  threads_same ? "identical" : "DIFFER", bytes[0].size());
    verdict(8, pass, detail);
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("acceptance: %d/8 criteria pass in %.1f s\n", 8 - g_failures,
                seconds_since(t0));
    return g_failures;
}
