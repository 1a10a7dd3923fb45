#ifndef CARNOT_CONFIG_HPP
#define CARNOT_CONFIG_HPP

#include "carnot/verify.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace carnot {

/// Bad configuration; `key` names the offending entry.
class ConfigError : public InputError {
public:
    ConfigError(const std::string& key, const std::string& what)
        : InputError("config '" + key + "': " + what), key_(key)
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// One input field: an analytic builder ("tent", ..., "cone") or a field file.
struct FieldSpec {
    std::string builder;
    std::string file;
    double height = 1.0; ///< cone only
    double radius = 1.0; ///< cone only

    std::string label() const { return file.empty() ? builder : file; }
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::string group = "heisenberg1";
    std::vector<std::string> gauges{"koranyi"};
    std::vector<FieldSpec> fields;
    int nodes = 0;            ///< per axis; 0 picks 256 (1D), 128 (2D), 64 (3D)
    double resolution = 0.0;  ///< spacing along axis 0; overrides nodes when > 0
    int levels = 512;
    std::vector<std::string> checks; ///< empty runs every applicable check
    std::vector<double> p{1.0, 2.0};
    std::vector<double> quasimonotone_levels{0.25, 0.5, 0.75}; ///< fractions of max u
    std::vector<double> homogeneity_radii{1.0, 1.5, 2.0};
    std::vector<double> sphere_radii{1.0, 2.0};
    int coarea_slices = 128;
    int homogeneity_nodes = 0;
    int validation_samples = 2000;
    bool balls_only = false;
    ConstantsOptions constants;
    VolumeOptions volume;
    PerimeterOptions perimeter;
    Tolerances tolerances;
    std::string output = "out";
    std::uint64_t seed = 7;
    /// Negative control: swaps the group law for a broken one.
    bool corrupt_law = false;
};

/// Every check name understood by the suite.
const std::vector<std::string>& known_checks();

ExperimentConfig config_from_json(const nlohmann::json& j);

/// Checks ids and value ranges; run again after command-line overrides.
void validate_config(const ExperimentConfig& c);
nlohmann::json to_json(const ExperimentConfig& c);

/// YAML (.yaml/.yml) or JSON (.json) file. Throws IoError / ConfigError.
ExperimentConfig load_config(const std::string& path);

/// Hex FNV-1a 64 of the canonical JSON dump of the resolved config.
std::string config_hash(const ExperimentConfig& c);

/// Group named by the config, with the corrupted law when requested.
GroupSpec config_group(const ExperimentConfig& c);

/// Gauge over the uncorrupted group; a corrupted law only reaches group validation.
Gauge config_gauge(const ExperimentConfig& c, const std::string& id);

/// Grid nodes per axis for the config's group.
int config_nodes(const ExperimentConfig& c, int n);

/// Seeds for the volume and sphere samplers, drawn from one generator seeded by c.seed.
struct DerivedSeeds {
    std::uint64_t volume = 0;
    std::uint64_t sphere = 0;
    std::uint64_t validation = 0;
};
DerivedSeeds derive_seeds(std::uint64_t seed);

} // namespace carnot

#endif // CARNOT_CONFIG_HPP
