#ifndef CARNOT_TOOLS_COMMANDS_HPP
#define CARNOT_TOOLS_COMMANDS_HPP

#include "carnot/suite.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace carnot::cli {

enum ExitCode { kPass = 0, kCheckFailure = 1, kUsage = 2, kNumerical = 3 };

struct Overrides {
    std::string config_path;
    std::string group;
    std::string gauge; ///< comma-separated list
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> resolution;
    std::optional<int> levels;
};

/// Config file (or defaults) with command-line overrides applied and re-validated.
ExperimentConfig resolve_config(const Overrides& o);

int cmd_rearrange(const ExperimentConfig& c, bool json, std::ostream& out);
int cmd_verify(const ExperimentConfig& c, bool json, std::ostream& out, std::ostream& log);
int cmd_constants(const ExperimentConfig& c, bool json, std::ostream& out);
/// axis: "h" (grid and K refined together), "K" or "eps".
int cmd_sweep(const ExperimentConfig& c, const std::string& axis, int steps, bool json, std::ostream& out);
int cmd_validate(const ExperimentConfig& c, bool json, std::ostream& out);

/// Full command line; errors are reported on `err` and mapped to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace carnot::cli

#endif // CARNOT_TOOLS_COMMANDS_HPP
