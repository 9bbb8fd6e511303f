#ifndef QHSUB_CLI_HPP
#define QHSUB_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "qhsub/certify.hpp"

namespace qhsub {

struct SweepSpec {
    double xi_min = 1e2;
    double xi_max = 1e5;
    int n_points = 13;
};

enum class RunDirection { Pos, Neg, Both };

struct RunConfig {
    std::string symbol_text;  // JSON object describing the symbol
    RunDirection direction = RunDirection::Pos;
    GridSpec grid;
    SweepSpec sweep;
    std::string output_dir = ".";
    std::uint64_t seed = 42;
    int n_samples = 4096;
    bool operator_ratio = true;
};

/// Assemble a run configuration from an optional JSON config file plus
/// command-line overrides. Throws MalformedInput on anything ill-formed.
RunConfig load_config(const std::optional<std::string>& config_path, const std::optional<std::string>& builtin,
                      const std::optional<std::string>& direction, const std::optional<std::string>& out_dir,
                      const std::optional<std::uint64_t>& seed);

// Exit codes: 0 pass, 1 malformed input, 2 failed check/certificate, 3 unstable fit.
int cmd_check(const RunConfig& config);
int cmd_certify(const RunConfig& config);
int cmd_estimate(const RunConfig& config);
int cmd_examples_list();

}  // namespace qhsub

#endif
