#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sbm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
    std::string subcommand;
    std::optional<std::string> config_path;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::filesystem::path out_dir = "runs";
    std::vector<std::string> overrides;
    unsigned threads = 0;
};

struct RunResult {
    int exit_code = kExitOk;
    std::filesystem::path run_dir;
    std::string message;
};

const std::vector<std::string>& subcommands();

/// Resolves the config, runs one experiment and writes its artifacts.
/// Never throws: schema problems give exit 2, numerical aborts exit 3.
RunResult run(const RunOptions& options);

}  // namespace sbm
