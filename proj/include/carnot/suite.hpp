#ifndef CARNOT_SUITE_HPP
#define CARNOT_SUITE_HPP

#include "carnot/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace carnot {

struct SuiteResult {
    std::vector<VerificationReport> reports;
    std::vector<ConstantsRecord> constants;
    std::vector<std::string> warnings;
    bool pass = true;
    /// Some constants record failed its refinement agreement.
    bool nonconverged = false;
    nlohmann::json bundle;
};

/// Runs every requested check for each configured gauge. Progress lines (with timings)
/// go to `log` when given; the bundle holds no timings, so equal configs give equal bundles.
SuiteResult run_suite(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Field from a builder (cones follow `gauge`) or a file, on the config's grid.
GridField make_field(const ExperimentConfig& config, const FieldSpec& spec, const GroupSpec& g, const Gauge& gauge);

/// Fields of the config, or every analytic builder plus the gauge cone when none are listed.
std::vector<FieldSpec> config_fields(const ExperimentConfig& config);

/// Rearrangement context: volume function from the config's sampler and, when
/// `with_constants`, a fresh constants record.
CheckContext make_context(const ExperimentConfig& config, const GroupSpec& g, const Gauge& gauge,
                          bool with_constants);

/// Constants record for one gauge with the config's options and derived seed.
ConstantsRecord config_constants(const ExperimentConfig& config, const Gauge& gauge);

} // namespace carnot

#endif // CARNOT_SUITE_HPP
