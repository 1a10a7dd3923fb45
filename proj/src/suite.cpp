#include "carnot/suite.hpp"

#include "carnot/field_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

namespace carnot {

namespace {

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool wants(const ExperimentConfig& c, const std::string& check)
{
    return c.checks.empty() || std::find(c.checks.begin(), c.checks.end(), check) != c.checks.end();
}

bool needs_constants(const ExperimentConfig& c)
{
    for (const char* check : {"constants", "polar", "quasimonotone", "energy_p1", "energy_weighted", "energy_carnot"})
        if (wants(c, check))
            return true;
    return false;
}

bool needs_fields(const ExperimentConfig& c)
{
    for (const char* check : {"equimeasurability", "fixed_point", "coarea", "quasimonotone", "energy_p1",
                              "energy_weighted", "energy_carnot", "dual_perimeter", "level_bands"})
        if (wants(c, check))
            return true;
    return false;
}

// Jump discontinuities: no level band between the plateaus.
bool discontinuous(const FieldSpec& f) { return f.builder == "plateau" || f.builder == "two-plateaus"; }

bool radial_for(const FieldSpec& f, const GroupSpec& g)
{
    return f.builder == "cone" || (f.builder == "tent" && g.n == 1);
}

void tag(VerificationReport& rep, const std::string& prefix) { rep.claim_id = prefix + rep.claim_id; }

} // namespace

std::vector<FieldSpec> config_fields(const ExperimentConfig& config)
{
    if (!config.fields.empty())
        return config.fields;
    std::vector<FieldSpec> out;
    for (const std::string& name : analytic_field_names())
        if (name != "zero")
            out.push_back(FieldSpec{name, "", 1.0, 1.0});
    out.push_back(FieldSpec{"cone", "", 1.0, 1.0});
    return out;
}

GridField make_field(const ExperimentConfig& config, const FieldSpec& spec, const GroupSpec& g, const Gauge& gauge)
{
    if (!spec.file.empty())
        return read_field(spec.file, g);
    const AnalyticField f = spec.builder == "cone" ? gauge_cone(gauge, spec.height, spec.radius)
                                                   : analytic_field(spec.builder, g);
    const Grid grid = config.resolution > 0.0 ? grid_around_spacing(f.support, config.resolution)
                                              : grid_around(f.support, config_nodes(config, g.n));
    return build_field(f, g, grid);
}

ConstantsRecord config_constants(const ExperimentConfig& config, const Gauge& gauge)
{
    ConstantsOptions opts = config.constants;
    opts.seed = derive_seeds(config.seed).sphere;
    return estimate_constants(gauge, default_set_family(gauge, config.balls_only), opts, config.tolerances);
}

CheckContext make_context(const ExperimentConfig& config, const GroupSpec& g, const Gauge& gauge, bool with_constants)
{
    VolumeOptions vopts = config.volume;
    vopts.seed = derive_seeds(config.seed).volume;
    CheckContext ctx{g, gauge, volume_function(gauge, vopts), {}, {}, config.perimeter, config.tolerances};
    ctx.rearrange.levels = config.levels;
    if (with_constants)
        ctx.constants = config_constants(config, gauge);
    return ctx;
}

SuiteResult run_suite(const ExperimentConfig& config, std::ostream* log)
{
    validate_config(config);
    SuiteResult result;
    const GroupSpec g = group_by_id(config.group);
    const DerivedSeeds seeds = derive_seeds(config.seed);
    Stopwatch total;
    auto note = [&](const std::string& what, const Stopwatch& sw) {
        if (log) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " (%.1f s)", sw.seconds());
            *log << what << buf << '\n';
        }
    };
    auto add = [&](VerificationReport rep, const std::string& prefix) {
        tag(rep, prefix);
        result.pass = result.pass && rep.pass;
        result.reports.push_back(std::move(rep));
    };

    if (wants(config, "validate")) {
        Stopwatch sw;
        const GroupSpec law = config_group(config);
        add(validate_group(law, config.validation_samples, seeds.validation), "");
        note("validate_group " + law.id, sw);
    }

    for (const std::string& gauge_id : config.gauges) {
        const Gauge gauge = config_gauge(config, gauge_id);
        const std::string gprefix = gauge_id + "/";

        if (wants(config, "validate")) {
            Stopwatch sw;
            const bool carnot = gauge.smoothness == GaugeSmoothness::carnot;
            // the Carnot gauge solves for the geodesic at every sample
            const int samples = carnot ? std::min(config.validation_samples, 400) : config.validation_samples;
            add(validate_gauge(gauge, samples, seeds.validation, carnot ? carnot_validation_options()
                                                                        : GaugeValidationOptions{}),
                "");
            note("validate_gauge " + gauge_id, sw);
        }

        Stopwatch sw_ctx;
        CheckContext ctx = make_context(config, g, gauge, needs_constants(config));
        if (needs_constants(config)) {
            const ConstantsRecord& c = ctx.constants;
            note("constants " + gauge_id, sw_ctx);
            for (const std::string& w : c.warnings)
                result.warnings.push_back(gprefix + w);
            if (!c.converged)
                result.nonconverged = true;
            result.constants.push_back(c);
            if (wants(config, "constants")) {
                VerificationReport ref = VerificationReport::bound("constants_refinement", c.refinement_change,
                                                                   config.tolerances.refinement);
                ref.resolution = {{"nodes", c.nodes}, {"refined_nodes", c.refined_nodes}};
                add(ref, gprefix);
                // the unit ball is in the family, so the scan can only raise the ratio
                VerificationReport lower = VerificationReport::inequality("cper_at_least_one", 1.0, c.Cper_bound, 1.0,
                                                                          config.tolerances.inequality);
                add(lower, gprefix);
            }
            if (wants(config, "polar"))
                add(polar_consistency(c, g.Q, config.tolerances.polar), gprefix);
        }

        if (wants(config, "homogeneity")) {
            Stopwatch sw;
            HomogeneityOptions h;
            h.nodes = config.homogeneity_nodes;
            h.eps_cells = config.perimeter.eps_cells;
            h.tolerance = config.tolerances.homogeneity;
            add(perimeter_homogeneity_check(g, gauge, config.homogeneity_radii, h), gprefix);
            note("homogeneity " + gauge_id, sw);
        }

        if (wants(config, "sphere_weight")) {
            Stopwatch sw;
            SphereWeightOptions s;
            s.nodes = config.homogeneity_nodes;
            s.eps_cells = config.perimeter.eps_cells;
            s.tolerance = config.tolerances.sphere_weight;
            s.seed = seeds.sphere;
            for (double R : config.sphere_radii) {
                VerificationReport rep = sphere_weight_integral(gauge, g, R, s);
                for (const std::string& w : rep.warnings)
                    result.warnings.push_back(gprefix + rep.claim_id + ": " + w);
                add(rep, gprefix);
            }
            note("sphere_weight " + gauge_id, sw);
        }

        for (const FieldSpec& spec : needs_fields(config) ? config_fields(config) : std::vector<FieldSpec>{}) {
            Stopwatch sw;
            const std::string prefix = gprefix + spec.label() + "/";
            const GridField u = make_field(config, spec, g, gauge);
            const Rearrangement r = rearrange(ctx, u);
            const double top = u.max_value();

            if (wants(config, "equimeasurability"))
                for (VerificationReport& rep : check_equimeasurability(ctx, u, r, default_phis()))
                    add(rep, prefix);
            if (wants(config, "fixed_point") && radial_for(spec, g))
                add(check_fixed_point(ctx, u, r), prefix);
            if (wants(config, "coarea"))
                add(coarea_check(u, g, config.coarea_slices, config.tolerances.coarea, config.perimeter), prefix);
            if (wants(config, "quasimonotone") && top > 0.0) {
                std::vector<double> levels;
                for (double q : config.quasimonotone_levels)
                    levels.push_back(q * top);
                for (VerificationReport& rep : check_perimeter_quasimonotone(ctx, u, r, levels))
                    add(rep, prefix);
            }
            if (wants(config, "energy_p1"))
                add(energy_p1(ctx, u, r), prefix);
            // Psi-based energies need a Sobolev field: a jump has no finite profile slope
            if (wants(config, "energy_weighted") && !discontinuous(spec))
                for (double p : config.p)
                    add(energy_weighted_p(ctx, u, r, p), prefix);
            if (wants(config, "energy_carnot") && gauge.smoothness == GaugeSmoothness::carnot && !discontinuous(spec))
                for (double p : config.p)
                    add(energy_carnot_p(ctx, u, r, p), prefix);
            if (wants(config, "dual_perimeter") && top > 0.0) {
                const double t = 0.5 * top;
                const double dual = perimeter_dual_lower_bound(u, t, g, default_dual_dictionary(gauge));
                PerimeterOptions opts = config.perimeter;
                const double P = horizontal_perimeter(u, t, g, opts).value;
                add(VerificationReport::inequality("dual_perimeter[t=max/2]", dual, P, 1.0,
                                                   config.tolerances.inequality),
                    prefix);
            }
            if (wants(config, "level_bands") && top > 0.0 && !discontinuous(spec)) {
                std::int64_t empty = 0;
                for (double q : config.quasimonotone_levels)
                    if (level_band_count(u, q * top, (q + 0.125) * top) == 0)
                        ++empty;
                add(VerificationReport::bound("level_bands_nonempty", static_cast<double>(empty), 0.0), prefix);
            }
            note("field " + gauge_id + "/" + spec.label(), sw);
        }
    }
    note("suite", total);

    std::size_t passed = 0;
    nlohmann::json reports = nlohmann::json::array();
    for (const VerificationReport& rep : result.reports) {
        reports.push_back(to_json(rep));
        passed += rep.pass ? 1 : 0;
    }
    nlohmann::json constants = nlohmann::json::array();
    for (const ConstantsRecord& c : result.constants)
        constants.push_back(to_json(c));
    result.bundle = {{"config_hash", config_hash(config)},
                     {"config", to_json(config)},
                     {"constants", constants},
                     {"reports", reports},
                     {"summary",
                      {{"total", result.reports.size()},
                       {"passed", passed},
                       {"failed", result.reports.size() - passed},
                       {"nonconverged_constants", result.nonconverged}}},
                     {"pass", result.pass},
                     {"warnings", result.warnings}};
    return result;
}

} // namespace carnot
