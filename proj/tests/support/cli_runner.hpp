// Minimal subprocess harness for exercising the evdecay binary from the
// tests. The binary path arrives via the EVDECAY_BIN environment variable
// (set by CTest); stdout and stderr are captured through temp files since
// std::system gives us nothing better without platform code.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef _WIN32
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace testsupport {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string evdecay_path() {
    const char* p = std::getenv("EVDECAY_BIN");
    if (p == nullptr || *p == '\0') {
        throw std::runtime_error("EVDECAY_BIN is not set; run through CTest");
    }
    return p;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs `evdecay <args>` with stdout/stderr redirected to scratch files.
// args is passed through the shell, so quote anything exotic yourself.
inline CommandResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    const auto tag = std::to_string(static_cast<long>(getpid())) + "_" +
                     std::to_string(counter++);
    const auto out_path = dir / ("evdecay_out_" + tag + ".txt");
    const auto err_path = dir / ("evdecay_err_" + tag + ".txt");

    const std::string cmd = "\"" + evdecay_path() + "\" " + args + " > \"" +
                            out_path.string() + "\" 2> \"" + err_path.string() + "\"";
    const int raw = std::system(cmd.c_str());

    CommandResult result;
#ifdef _WIN32
    result.exit_code = raw;
#else
    result.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
#endif
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    std::error_code ec;
    std::filesystem::remove(out_path, ec);
    std::filesystem::remove(err_path, ec);
    return result;
}

// Scratch file path helper; caller owns cleanup.
inline std::filesystem::path temp_file(const std::string& stem) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    return dir / (stem + "_" + std::to_string(static_cast<long>(getpid())) + "_" +
                  std::to_string(counter++));
}

} // namespace testsupport
