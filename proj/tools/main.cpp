// evdecay: command-line front end for the branching-decay library.
//
// Subcommands:
//   simulate   draw a decay dataset and write it as CSV
//   estimate   fit a dataset: apparent rate, epsilon, goodness of fit (JSON)
//   figure2    survival curves S1..S5 on a normalized time grid (CSV)
//   verify     run the brute-force identity checks over a parameter lattice
//   power      sample size needed to resolve a target epsilon
//   tree       export one branching spine as CSV
//
// Exit codes: 0 success, 1 at least one verification failed, 2 usage or
// validation error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "everett/everett.hpp"

namespace {

using namespace everett;

struct SimulateArgs {
    double lambda_B = 1.0;
    double epsilon = 0.0;
    std::uint64_t n = 1000;
    std::uint64_t seed = 0;
    std::string sampler = "direct";
    std::string out;
    unsigned threads = 1;
};

int run_simulate(const SimulateArgs& a) {
    sim::ExperimentConfig config;
    config.lambda_B = a.lambda_B;
    config.epsilon = a.epsilon;
    config.n_particles = a.n;
    config.seed = a.seed;
    config.sampler = sim::sampler_from_string(a.sampler);
    config.threads = a.threads;

    const sim::DecayDataset dataset = sim::simulate_sample(config);
    io::write_dataset_csv(a.out, dataset);

    double sum = 0.0;
    for (const auto& rec : dataset.records) {
        sum += rec.decay_time;
    }
    const double n = static_cast<double>(dataset.records.size());
    std::printf("n=%llu\n", static_cast<unsigned long long>(dataset.records.size()));
    std::printf("mean_lifetime=%s\n", io::format_double(sum / n).c_str());
    std::printf("lambda_A_hat=%s\n", io::format_double(n / sum).c_str());
    return 0;
}

struct EstimateArgs {
    std::string path;
    double lambda_B = 1.0;
    double confidence = 0.95;
    double alpha = 0.01;
    bool csv = false;
};

int run_estimate(const EstimateArgs& a) {
    const sim::DecayDataset dataset = io::read_dataset_csv(a.path);
    const estimate::EstimateResult result =
        estimate::estimate_dataset(dataset, a.lambda_B, a.confidence, a.alpha);
    if (a.csv) {
        std::fputs(io::to_csv(result).c_str(), stdout);
    } else {
        std::printf("%s\n", io::to_json(result).c_str());
    }
    return 0; // failed goodness-of-fit tests are results, not errors
}

struct Figure2Args {
    double lambda_B = 1.0;
    double t_max = 6.0;
    std::size_t points = 121;
};

int run_figure2(const Figure2Args& a) {
    const double W = 1.0 / a.lambda_B;
    std::printf("t_over_W,S1,S2,S3,S4,S5\n");
    for (std::size_t j = 0; j < a.points; ++j) {
        // (t_max * j) / (points - 1) lands exactly on integer grid values
        const double u = a.t_max * static_cast<double>(j) / static_cast<double>(a.points - 1);
        std::fputs(io::format_double(u).c_str(), stdout);
        for (std::int64_t i = 1; i <= 5; ++i) {
            const double s = erlang_survival(ErlangSpec(i, a.lambda_B), u * W);
            std::printf(",%s", io::format_double(s).c_str());
        }
        std::fputs("\n", stdout);
    }
    return 0;
}

struct VerifyArgs {
    std::vector<double> epsilons = {0.01, 0.1, 0.5, 0.9, 0.99};
    std::vector<double> rates = {0.1, 1.0, 10.0};
    std::vector<std::int64_t> shapes = {1, 2, 5, 10, 100};
    double tol = 1e-12;
    double tol_quad = 1e-8;
    double u_max = 20.0;
    std::size_t grid_points = 41;
    bool json = false;
};

void print_verify_row(const oracle::IdentityReport& r, const std::string& params, bool json) {
    if (json) {
        std::printf("%s\n", io::to_json(r).c_str());
        return;
    }
    std::printf("%-18s %-30s %-13.3e %9lld   %s\n", oracle::to_string(r.identity_name),
                params.c_str(), r.max_abs_error, static_cast<long long>(r.terms_used),
                r.pass ? "pass" : "FAIL");
}

std::string short_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

int run_verify(const VerifyArgs& a) {
    std::size_t checks = 0;
    std::size_t failed = 0;
    std::size_t skipped = 0;

    if (!a.json) {
        std::printf("%-18s %-30s %-13s %9s   %s\n", "identity", "parameters", "max_abs_error",
                    "terms", "status");
    }
    auto account = [&](const oracle::IdentityReport& r, const std::string& params) {
        ++checks;
        if (!r.pass) {
            ++failed;
        }
        print_verify_row(r, params, a.json);
    };

    for (double eps : a.epsilons) {
        const std::string params = "epsilon=" + short_g(eps);
        if (eps == 0.0) {
            // the geometric identity is undefined at the endpoints
            ++skipped;
            if (a.json) {
                std::fprintf(stderr, "note: beta_series skipped at epsilon=0 "
                                     "(defined only for 0 < epsilon < 1)\n");
            } else {
                std::printf("%-18s %-30s %-13s %9s   %s\n", "beta_series", params.c_str(), "-",
                            "-", "skip (needs 0 < epsilon < 1)");
            }
            continue;
        }
        account(oracle::verify_beta_series(eps, a.tol), params);
    }
    for (double eps : a.epsilons) {
        for (double rate : a.rates) {
            const RateParams params(rate, eps);
            std::vector<double> grid(a.grid_points);
            for (std::size_t j = 0; j < a.grid_points; ++j) {
                grid[j] = a.u_max * static_cast<double>(j) /
                          static_cast<double>(a.grid_points - 1) / rate;
            }
            const std::string desc = "lambda_B=" + short_g(rate) + " epsilon=" + short_g(eps);
            account(oracle::verify_tau_series(params, a.tol), desc);
            account(oracle::verify_fA_series(params, grid, a.tol), desc);
            account(oracle::verify_SA_column_sum(params, grid, a.tol), desc);
        }
    }
    for (std::int64_t shape : a.shapes) {
        for (double rate : a.rates) {
            const std::string desc =
                "rate=" + short_g(rate) + " shape=" + std::to_string(shape);
            account(oracle::verify_pdf_normalization(ErlangSpec(shape, rate), a.tol_quad), desc);
        }
    }

    if (a.json) {
        std::fprintf(stderr, "%zu checks: %zu passed, %zu failed, %zu skipped\n", checks,
                     checks - failed, failed, skipped);
    } else {
        std::printf("\n%zu checks: %zu passed, %zu failed, %zu skipped\n", checks,
                    checks - failed, failed, skipped);
    }
    return failed == 0 ? 0 : 1;
}

struct PowerArgs {
    double epsilon_target = 0.0;
    double confidence = 0.95;
};

int run_power(const PowerArgs& a) {
    const std::uint64_t n = estimate::required_sample_size(a.epsilon_target, a.confidence);
    std::printf("%llu\n", static_cast<unsigned long long>(n));
    return 0;
}

struct TreeArgs {
    double lambda_B = 1.0;
    double epsilon = 0.0;
    double horizon = 10.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_tree(const TreeArgs& a) {
    const RateParams params(a.lambda_B, a.epsilon);
    RngStream stream(a.seed, 0);
    const sim::BranchTree tree = sim::sample_branch_tree(params, a.horizon, stream);
    if (a.out.empty()) {
        io::write_tree_csv(std::cout, tree);
    } else {
        io::write_tree_csv(a.out, tree);
        std::printf("events=%zu\n", tree.spine_event_times.size());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branching-model decay laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read key=value defaults from a file; flags win on conflict");

    SimulateArgs sim_args;
    CLI::App* cmd_simulate = app.add_subcommand("simulate", "draw a decay dataset, write CSV");
    cmd_simulate->add_option("--lambda-b", sim_args.lambda_B, "branching rate lambda_B")
        ->capture_default_str();
    cmd_simulate->add_option("--epsilon", sim_args.epsilon, "excited-branch probability in [0,1)")
        ->capture_default_str();
    cmd_simulate->add_option("--n", sim_args.n, "number of particles")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--seed", sim_args.seed, "64-bit master seed")->capture_default_str();
    cmd_simulate->add_option("--sampler", sim_args.sampler, "sampling algorithm")
        ->check(CLI::IsMember({"direct", "mechanistic"}))
        ->capture_default_str();
    cmd_simulate->add_option("--out", sim_args.out, "output CSV path")->required();
    cmd_simulate->add_option("--threads", sim_args.threads,
                             "worker threads; never changes the output bytes")
        ->capture_default_str();

    EstimateArgs est_args;
    CLI::App* cmd_estimate = app.add_subcommand("estimate", "fit a dataset, print JSON");
    cmd_estimate->add_option("dataset", est_args.path, "dataset CSV path")->required();
    cmd_estimate->add_option("--lambda-b", est_args.lambda_B, "theoretical lambda_B")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_estimate->add_option("--confidence", est_args.confidence, "CI level in (0,1)")
        ->capture_default_str();
    cmd_estimate->add_option("--alpha", est_args.alpha, "goodness-of-fit significance level")
        ->capture_default_str();
    cmd_estimate->add_flag("--csv", est_args.csv, "print the one-row CSV form instead of JSON");

    Figure2Args fig_args;
    CLI::App* cmd_figure2 =
        app.add_subcommand("figure2", "survival curves S1..S5 over t/W, CSV to stdout");
    cmd_figure2->add_option("--lambda-b", fig_args.lambda_B, "branching rate lambda_B")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_figure2->add_option("--t-max", fig_args.t_max, "largest t/W on the grid")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_figure2->add_option("--points", fig_args.points, "grid size")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}))
        ->capture_default_str();

    VerifyArgs ver_args;
    CLI::App* cmd_verify = app.add_subcommand("verify", "brute-force identity checks");
    cmd_verify->add_option("--epsilon", ver_args.epsilons, "epsilon lattice (repeatable)")
        ->capture_default_str();
    cmd_verify->add_option("--lambda-b", ver_args.rates, "lambda_B lattice (repeatable)")
        ->capture_default_str();
    cmd_verify->add_option("--shape", ver_args.shapes, "Erlang shapes for normalization checks")
        ->capture_default_str();
    cmd_verify->add_option("--tol", ver_args.tol, "series tolerance")->capture_default_str();
    cmd_verify->add_option("--tol-quad", ver_args.tol_quad, "quadrature tolerance")
        ->capture_default_str();
    cmd_verify->add_option("--u-max", ver_args.u_max, "time grids span lambda_B*t in [0,u-max]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_verify->add_option("--grid-points", ver_args.grid_points, "points per time grid")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}))
        ->capture_default_str();
    cmd_verify->add_flag("--json", ver_args.json, "one JSON object per check instead of a table");

    PowerArgs pow_args;
    CLI::App* cmd_power =
        app.add_subcommand("power", "sample size needed to resolve a target epsilon");
    cmd_power->add_option("epsilon_target", pow_args.epsilon_target, "smallest epsilon to resolve")
        ->required();
    cmd_power->add_option("confidence", pow_args.confidence, "one-sided confidence level")
        ->capture_default_str();

    TreeArgs tree_args;
    CLI::App* cmd_tree = app.add_subcommand("tree", "export one branching spine as CSV");
    cmd_tree->add_option("--lambda-b", tree_args.lambda_B, "branching rate lambda_B")
        ->capture_default_str();
    cmd_tree->add_option("--epsilon", tree_args.epsilon, "excited-branch probability in [0,1)")
        ->capture_default_str();
    cmd_tree->add_option("--horizon", tree_args.horizon, "time horizon of the spine")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_tree->add_option("--seed", tree_args.seed, "64-bit master seed")->capture_default_str();
    cmd_tree->add_option("--out", tree_args.out, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e); // --help and friends
    } catch (const CLI::ParseError& e) {
        std::cerr << "evdecay: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*cmd_simulate) {
            return run_simulate(sim_args);
        }
        if (*cmd_estimate) {
            return run_estimate(est_args);
        }
        if (*cmd_figure2) {
            return run_figure2(fig_args);
        }
        if (*cmd_verify) {
            return run_verify(ver_args);
        }
        if (*cmd_power) {
            return run_power(pow_args);
        }
        if (*cmd_tree) {
            return run_tree(tree_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "evdecay: " << e.what() << '\n';
        return 2;
    }
    return 2; // unreachable with require_subcommand(1)
}
