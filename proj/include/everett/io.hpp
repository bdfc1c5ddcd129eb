// File formats: dataset and tree CSV, estimate and identity-report JSON.
//
// Every floating-point number is written with 17 significant digits
// (lowercase e exponent), which round-trips any double exactly, so files
// written from the same inputs are byte-identical and safe to diff. The CSV
// reader is strict: anything it does not recognize raises ParseError with the
// 1-based line number.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "everett/estimate.hpp"
#include "everett/oracle.hpp"
#include "everett/sim.hpp"

namespace everett::io {

/// Malformed input; line() is the 1-based line the problem was found on and
/// what() already includes it.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Shortest exact decimal form of x, up to 17 significant digits.
inline std::string format_double(double x) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(len));
}

namespace detail {

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    return out;
}

inline std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    return in;
}

inline double parse_double(const std::string& text, std::size_t line, const char* what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(line, std::string("expected a number for ") + what + ", got '" + text +
                                   "'");
    }
    return value;
}

inline std::uint64_t parse_u64(const std::string& text, std::size_t line, const char* what) {
    std::uint64_t value = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(line, std::string("expected a nonnegative integer for ") + what +
                                   ", got '" + text + "'");
    }
    return value;
}

/// Splits on commas; no quoting or escaping exists in these files.
inline std::vector<std::string> split_fields(const std::string& line_text) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line_text.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line_text.substr(start));
            return fields;
        }
        fields.push_back(line_text.substr(start, comma - start));
        start = comma + 1;
    }
}

/// getline that tolerates a CRLF-terminated file by dropping the trailing CR.
inline bool next_line(std::istream& in, std::string& line_text) {
    if (!std::getline(in, line_text)) {
        return false;
    }
    if (!line_text.empty() && line_text.back() == '\r') {
        line_text.pop_back();
    }
    return true;
}

} // namespace detail

inline constexpr const char* kDatasetHeader = "particle_id,branch_index,decay_time";

/// Dataset CSV: four metadata comment lines, the column header, one row per
/// record in particle order.
inline void write_dataset_csv(std::ostream& out, const sim::DecayDataset& dataset) {
    out << "# lambda_B=" << format_double(dataset.params.lambda_B()) << '\n'
        << "# epsilon=" << format_double(dataset.params.epsilon()) << '\n'
        << "# seed=" << dataset.seed << '\n'
        << "# sampler=" << sim::to_string(dataset.sampler) << '\n'
        << kDatasetHeader << '\n';
    char buf[96];
    for (const auto& rec : dataset.records) {
        const int len = std::snprintf(buf, sizeof(buf), "%llu,%llu,%.17g\n",
                                      static_cast<unsigned long long>(rec.particle_id),
                                      static_cast<unsigned long long>(rec.branch_index),
                                      rec.decay_time);
        out.write(buf, len);
    }
}

inline void write_dataset_csv(const std::string& path, const sim::DecayDataset& dataset) {
    auto out = detail::open_for_write(path);
    write_dataset_csv(out, dataset);
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

/// Strict inverse of write_dataset_csv. All four metadata keys must appear
/// (in any order) before the header; rows must have exactly three fields with
/// a positive finite decay time and branch index >= 1.
inline sim::DecayDataset read_dataset_csv(std::istream& in) {
    std::string line_text;
    std::size_t line_no = 0;

    bool have_lambda = false, have_epsilon = false, have_seed = false, have_sampler = false;
    double lambda_B = 0.0, epsilon = 0.0;
    std::uint64_t seed = 0;
    sim::Sampler sampler = sim::Sampler::direct;

    // metadata block
    for (;;) {
        if (!detail::next_line(in, line_text)) {
            throw ParseError(line_no + 1, "missing column header");
        }
        ++line_no;
        if (line_text.rfind("# ", 0) != 0) {
            break;
        }
        const std::string body = line_text.substr(2);
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "metadata line is not key=value: '" + line_text + "'");
        }
        const std::string key = body.substr(0, eq);
        const std::string value = body.substr(eq + 1);
        if (key == "lambda_B") {
            lambda_B = detail::parse_double(value, line_no, "lambda_B");
            have_lambda = true;
        } else if (key == "epsilon") {
            epsilon = detail::parse_double(value, line_no, "epsilon");
            have_epsilon = true;
        } else if (key == "seed") {
            seed = detail::parse_u64(value, line_no, "seed");
            have_seed = true;
        } else if (key == "sampler") {
            try {
                sampler = sim::sampler_from_string(value);
            } catch (const std::invalid_argument& ex) {
                throw ParseError(line_no, ex.what());
            }
            have_sampler = true;
        } else {
            throw ParseError(line_no, "unknown metadata key '" + key + "'");
        }
    }

    if (!have_lambda || !have_epsilon || !have_seed || !have_sampler) {
        throw ParseError(line_no, "metadata must define lambda_B, epsilon, seed and sampler");
    }
    if (line_text != kDatasetHeader) {
        throw ParseError(line_no, "expected header '" + std::string(kDatasetHeader) + "', got '" +
                                      line_text + "'");
    }

    sim::DecayDataset dataset;
    try {
        dataset.params = RateParams(lambda_B, epsilon);
    } catch (const std::domain_error& ex) {
        throw ParseError(line_no, ex.what());
    }
    dataset.seed = seed;
    dataset.sampler = sampler;

    while (detail::next_line(in, line_text)) {
        ++line_no;
        const auto fields = detail::split_fields(line_text);
        if (fields.size() != 3) {
            throw ParseError(line_no, "expected 3 comma-separated fields, got " +
                                          std::to_string(fields.size()));
        }
        sim::ObserverRecord rec;
        rec.particle_id = detail::parse_u64(fields[0], line_no, "particle_id");
        rec.branch_index = detail::parse_u64(fields[1], line_no, "branch_index");
        rec.decay_time = detail::parse_double(fields[2], line_no, "decay_time");
        if (rec.branch_index < 1) {
            throw ParseError(line_no, "branch_index must be >= 1");
        }
        if (!(rec.decay_time > 0.0) || !std::isfinite(rec.decay_time)) {
            throw ParseError(line_no, "decay_time must be positive and finite");
        }
        dataset.records.push_back(rec);
    }
    return dataset;
}

inline sim::DecayDataset read_dataset_csv(const std::string& path) {
    auto in = detail::open_for_read(path);
    return read_dataset_csv(in);
}

/// Branch-tree CSV: one row per spine branching event, 1-based ordinal.
inline void write_tree_csv(std::ostream& out, const sim::BranchTree& tree) {
    out << "event_ordinal,event_time\n";
    char buf[64];
    for (std::size_t k = 0; k < tree.spine_event_times.size(); ++k) {
        const int len = std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", k + 1,
                                      tree.spine_event_times[k]);
        out.write(buf, len);
    }
}

inline void write_tree_csv(const std::string& path, const sim::BranchTree& tree) {
    auto out = detail::open_for_write(path);
    write_tree_csv(out, tree);
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

namespace detail {

/// JSON number token; JSON has no literal for non-finite values, so those
/// become null (the convention most parsers accept).
inline std::string json_number(double x) {
    if (!std::isfinite(x)) {
        return "null";
    }
    return format_double(x);
}

inline const char* json_bool(bool b) { return b ? "true" : "false"; }

} // namespace detail

/// Flat single-line JSON object; interval fields are [lo, hi] arrays.
inline std::string to_json(const estimate::EstimateResult& result) {
    std::string out;
    out.reserve(400);
    out += "{\"lambda_A_hat\":";
    out += detail::json_number(result.lambda_A_hat);
    out += ",\"lambda_A_ci\":[";
    out += detail::json_number(result.lambda_A_ci.lo);
    out += ",";
    out += detail::json_number(result.lambda_A_ci.hi);
    out += "],\"epsilon_hat\":";
    out += detail::json_number(result.epsilon_hat);
    out += ",\"epsilon_ci\":[";
    out += detail::json_number(result.epsilon_ci.lo);
    out += ",";
    out += detail::json_number(result.epsilon_ci.hi);
    out += "],\"epsilon_upper_limit\":";
    out += detail::json_number(result.epsilon_upper_limit);
    out += ",\"ks_stat\":";
    out += detail::json_number(result.ks_stat);
    out += ",\"ks_pass\":";
    out += detail::json_bool(result.ks_pass);
    out += ",\"chi2_stat\":";
    out += detail::json_number(result.chi2_stat);
    out += ",\"confidence\":";
    out += detail::json_number(result.confidence);
    out += ",\"n\":";
    out += std::to_string(result.n);
    out += "}";
    return out;
}

/// Two-line CSV (header plus one row) carrying the same fields as the JSON
/// form; interval fields split into _lo/_hi columns.
inline std::string to_csv(const estimate::EstimateResult& result) {
    std::string out =
        "lambda_A_hat,lambda_A_ci_lo,lambda_A_ci_hi,epsilon_hat,epsilon_ci_lo,epsilon_ci_hi,"
        "epsilon_upper_limit,ks_stat,ks_pass,chi2_stat,confidence,n\n";
    out += format_double(result.lambda_A_hat);
    out += ",";
    out += format_double(result.lambda_A_ci.lo);
    out += ",";
    out += format_double(result.lambda_A_ci.hi);
    out += ",";
    out += format_double(result.epsilon_hat);
    out += ",";
    out += format_double(result.epsilon_ci.lo);
    out += ",";
    out += format_double(result.epsilon_ci.hi);
    out += ",";
    out += format_double(result.epsilon_upper_limit);
    out += ",";
    out += format_double(result.ks_stat);
    out += ",";
    out += result.ks_pass ? "1" : "0";
    out += ",";
    out += format_double(result.chi2_stat);
    out += ",";
    out += format_double(result.confidence);
    out += ",";
    out += std::to_string(result.n);
    out += "\n";
    return out;
}

/// One JSON object per identity check. t_grid is included only when the
/// identity swept a time grid; shape is nonzero only for the normalization
/// check.
inline std::string to_json(const oracle::IdentityReport& report) {
    std::string out;
    out.reserve(220 + 20 * report.t_grid.size());
    out += "{\"identity_name\":\"";
    out += oracle::to_string(report.identity_name);
    out += "\",\"params\":{\"lambda_B\":";
    out += detail::json_number(report.params.lambda_B());
    out += ",\"epsilon\":";
    out += detail::json_number(report.params.epsilon());
    out += "},\"shape\":";
    out += std::to_string(report.shape);
    if (!report.t_grid.empty()) {
        out += ",\"t_grid\":[";
        for (std::size_t k = 0; k < report.t_grid.size(); ++k) {
            if (k > 0) {
                out += ",";
            }
            out += detail::json_number(report.t_grid[k]);
        }
        out += "]";
    }
    out += ",\"max_abs_error\":";
    out += detail::json_number(report.max_abs_error);
    out += ",\"terms_used\":";
    out += std::to_string(report.terms_used);
    out += ",\"tolerance\":";
    out += detail::json_number(report.tolerance);
    out += ",\"pass\":";
    out += detail::json_bool(report.pass);
    out += "}";
    return out;
}

} // namespace everett::io
