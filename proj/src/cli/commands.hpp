#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frugal/datasets.hpp"
#include "frugal/samplers.hpp"
#include "frugal/session.hpp"
#include "frugal/types.hpp"

namespace frugal::cli {

enum ExitCode : int { ok = 0, config_error = 2, data_error = 3, numeric_error = 4 };

// Failure tagged with the exit code it maps to.
class CommandError : public std::runtime_error {
public:
    CommandError(ExitCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

struct RunConfig {
    std::optional<std::filesystem::path> dataset;
    std::optional<std::string> synthetic;
    Hyperparams hp;
    std::vector<SamplerKind> strategies{SamplerKind::proposed};
    std::vector<std::uint64_t> seeds{1};
    std::filesystem::path out = "out";
    unsigned jobs = 1;
};

// "1..10", "4", "1,3,5" and mixes such as "1..3,8".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
// Comma-separated strategy names, or "all".
std::vector<SamplerKind> parse_strategy_list(const std::string& text);

// Pool and ground truth for one seed, already split into train and eval.
struct Experiment {
    TrainEvalSplit split;
    std::uint64_t seed = 0;
};
Experiment prepare_experiment(const RunConfig& config, std::uint64_t seed);

// Each command writes its artifacts under config.out and a short report to out.
int cmd_run(const RunConfig& config, std::ostream& out);
int cmd_compare(const RunConfig& config, std::ostream& out);
int cmd_ablate(const RunConfig& config, std::ostream& out);

// Full command line entry point; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace frugal::cli
