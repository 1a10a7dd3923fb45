#include "commands.hpp"

#include "carnot/field_io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace carnot::cli {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

fs::path out_dir(const ExperimentConfig& c)
{
    fs::path dir(c.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + c.output + "': " + ec.message());
    return dir;
}

void write_json(const fs::path& path, const nlohmann::json& j)
{
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write '" + path.string() + "'");
    f << j.dump(2) << '\n';
}

CsvMeta meta_for(const ExperimentConfig& c, const std::string& what)
{
    return {{"config_hash", config_hash(c)}, {"content", what}};
}

std::string slug(const std::string& s)
{
    std::string out = fs::path(s).filename().string();
    std::replace_if(out.begin(), out.end(), [](char ch) { return !std::isalnum(static_cast<unsigned char>(ch)) && ch != '-'; }, '_');
    return out;
}

int status_of(bool pass, bool nonconverged)
{
    if (!pass)
        return kCheckFailure;
    return nonconverged ? kNumerical : kPass;
}

double rel_gap(double a, double b)
{
    if (a == 0.0 && b == 0.0)
        return 0.0;
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

ExperimentConfig resolve_config(const Overrides& o)
{
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (!o.group.empty())
        c.group = o.group;
    if (!o.gauge.empty())
        c.gauges = split_list(o.gauge);
    if (!o.out.empty())
        c.output = o.out;
    if (o.seed)
        c.seed = *o.seed;
    if (o.resolution) {
        if (!(*o.resolution > 0.0))
            throw ConfigError("--resolution", "must be positive");
        c.resolution = *o.resolution;
    }
    if (o.levels)
        c.levels = *o.levels;
    validate_config(c);
    return c;
}

int cmd_rearrange(const ExperimentConfig& c, bool json, std::ostream& out)
{
    const fs::path dir = out_dir(c);
    const GroupSpec g = group_by_id(c.group);
    nlohmann::json reports = nlohmann::json::array();
    std::vector<VerificationReport> all;
    bool pass = true;
    for (const std::string& gauge_id : c.gauges) {
        const Gauge gauge = config_gauge(c, gauge_id);
        const CheckContext ctx = make_context(c, g, gauge, false);
        for (const FieldSpec& spec : config_fields(c)) {
            const GridField u = make_field(c, spec, g, gauge);
            const Rearrangement r = rearrange(ctx, u);
            const std::string stem = gauge_id + "_" + slug(spec.label());
            write_field_csv((dir / (stem + "_ustar.csv")).string(), r.field, meta_for(c, "rearranged field"));
            std::vector<std::vector<double>> rows;
            for (Eigen::Index j = 0; j < r.profile.radii.size(); ++j)
                rows.push_back({r.profile.radii(j), r.profile.profile(j)});
            write_table_csv((dir / (stem + "_profile.csv")).string(), {"r", "value"}, rows,
                            meta_for(c, "rearrangement profile"));
            for (VerificationReport rep : check_equimeasurability(ctx, u, r, default_phis())) {
                rep.claim_id = gauge_id + "/" + spec.label() + "/" + rep.claim_id;
                pass = pass && rep.pass;
                reports.push_back(to_json(rep));
                all.push_back(std::move(rep));
            }
        }
    }
    const nlohmann::json bundle{{"config_hash", config_hash(c)}, {"reports", reports}, {"pass", pass}};
    write_json(dir / "rearrange.json", bundle);
    out << (json ? bundle.dump(2) + "\n" : format_table(all));
    return status_of(pass, false);
}

int cmd_verify(const ExperimentConfig& c, bool json, std::ostream& out, std::ostream& log)
{
    const fs::path dir = out_dir(c);
    const SuiteResult result = run_suite(c, &log);
    write_json(dir / "verify.json", result.bundle);
    if (json) {
        out << result.bundle.dump(2) << '\n';
    } else {
        out << format_table(result.reports);
        for (const std::string& w : result.warnings)
            out << "warning: " << w << '\n';
        out << (result.pass ? "PASS" : "FAIL") << ": " << result.bundle["summary"]["passed"] << "/"
            << result.reports.size() << " checks\n";
    }
    return status_of(result.pass, result.nonconverged);
}

int cmd_constants(const ExperimentConfig& c, bool json, std::ostream& out)
{
    const fs::path dir = out_dir(c);
    const GroupSpec g = group_by_id(c.group);
    nlohmann::json records = nlohmann::json::array();
    std::vector<VerificationReport> reports;
    bool pass = true, nonconverged = false;
    for (const std::string& gauge_id : c.gauges) {
        const Gauge gauge = config_gauge(c, gauge_id);
        const ConstantsRecord rec = config_constants(c, gauge);
        VerificationReport polar = polar_consistency(rec, g.Q, c.tolerances.polar);
        pass = pass && polar.pass;
        nonconverged = nonconverged || !rec.converged;
        nlohmann::json j = to_json(rec);
        j["polar_consistency"] = to_json(polar);
        records.push_back(j);
        reports.push_back(polar);
    }
    const nlohmann::json bundle{{"config_hash", config_hash(c)}, {"constants", records}, {"pass", pass}};
    write_json(dir / "constants.json", bundle);
    if (json) {
        out << bundle.dump(2) << '\n';
    } else {
        for (const nlohmann::json& r : records) {
            char line[256];
            std::snprintf(line, sizeof line,
                          "%s/%s: C0 %.6g  Ciso_emp %.6g (%s)  Cper_bound %.6g  sigmaB1 %.6g  PhB1 %.6g  Csym %.6g  "
                          "refinement %.3g\n",
                          r["group"].get<std::string>().c_str(), r["gauge"].get<std::string>().c_str(),
                          r["C0"].get<double>(), r["Ciso_emp"].get<double>(),
                          r["iso_witness"].get<std::string>().c_str(), r["Cper_bound"].get<double>(),
                          r["sigmaB1"].get<double>(), r["PhB1"].get<double>(), r["Csym"].get<double>(),
                          r["refinement_change"].get<double>());
            out << line;
        }
        out << format_table(reports);
    }
    return status_of(pass, nonconverged);
}

int cmd_sweep(const ExperimentConfig& c, const std::string& axis, int steps, bool json, std::ostream& out)
{
    if (axis != "h" && axis != "K" && axis != "eps")
        throw ConfigError("--axis", "expected h, K or eps");
    if (steps < 2)
        throw ConfigError("--steps", "need at least 2 steps");
    const fs::path dir = out_dir(c);
    const GroupSpec g = group_by_id(c.group);
    const std::vector<std::string> columns{"step",  "h", "levels", "eps_cells", "equimeasurability_gap",
                                           "coarea_gap", "perimeter_mid"};
    nlohmann::json files = nlohmann::json::array();
    for (const std::string& gauge_id : c.gauges) {
        const Gauge gauge = config_gauge(c, gauge_id);
        const CheckContext base = make_context(c, g, gauge, false);
        for (const FieldSpec& spec : config_fields(c)) {
            std::vector<std::vector<double>> rows;
            for (int s = 0; s < steps; ++s) {
                ExperimentConfig cs = c;
                CheckContext ctx = base;
                int slices = c.coarea_slices;
                const int coarse = steps - 1 - s; // halvings still to go
                if (axis == "h") {
                    cs.resolution = 0.0;
                    cs.nodes = std::max(8, config_nodes(c, g.n) >> coarse);
                    ctx.rearrange.levels = std::max(16, c.levels >> coarse);
                } else if (axis == "K") {
                    ctx.rearrange.levels = 16 << s;
                    slices = 16 << s;
                } else {
                    ctx.perimeter.eps_cells = 2.0 + s;
                }
                const GridField u = make_field(cs, spec, g, gauge);
                const Rearrangement r = rearrange(ctx, u);
                double equi = 0.0;
                for (const NamedPhi& phi : default_phis())
                    equi = std::max(equi, rel_gap(integrate(r.field, phi.phi), integrate(u, phi.phi)));
                const VerificationReport co = coarea_check(u, g, slices, c.tolerances.coarea, ctx.perimeter);
                const double top = u.max_value();
                const double mid = top > 0.0 ? horizontal_perimeter(u, 0.5 * top, g, ctx.perimeter).value : 0.0;
                rows.push_back({static_cast<double>(s), u.grid().spacing().maxCoeff(),
                                static_cast<double>(ctx.rearrange.levels), ctx.perimeter.eps_cells, equi,
                                rel_gap(co.lhs, co.rhs), mid});
            }
            const fs::path path = dir / ("sweep_" + axis + "_" + gauge_id + "_" + slug(spec.label()) + ".csv");
            CsvMeta meta = meta_for(c, "convergence sweep");
            meta.push_back({"axis", axis});
            meta.push_back({"field", spec.label()});
            meta.push_back({"gauge", gauge_id});
            write_table_csv(path.string(), columns, rows, meta);
            files.push_back({{"path", path.string()}, {"field", spec.label()}, {"gauge", gauge_id}, {"rows", rows}});
        }
    }
    if (json) {
        out << nlohmann::json{{"config_hash", config_hash(c)}, {"columns", columns}, {"sweeps", files}}.dump(2)
            << '\n';
    } else {
        for (const auto& f : files)
            out << f["path"].get<std::string>() << '\n';
    }
    return kPass;
}

int cmd_validate(const ExperimentConfig& c, bool json, std::ostream& out)
{
    const GroupSpec g = config_group(c);
    const DerivedSeeds seeds = derive_seeds(c.seed);
    std::vector<VerificationReport> reports{validate_group(g, c.validation_samples, seeds.validation)};
    for (const std::string& gauge_id : c.gauges) {
        const Gauge gauge = config_gauge(c, gauge_id);
        const bool carnot = gauge.smoothness == GaugeSmoothness::carnot;
        const int samples = carnot ? std::min(c.validation_samples, 400) : c.validation_samples;
        reports.push_back(validate_gauge(gauge, samples, seeds.validation,
                                         carnot ? carnot_validation_options() : GaugeValidationOptions{}));
    }
    const bool pass = std::all_of(reports.begin(), reports.end(), [](const VerificationReport& r) { return r.pass; });
    if (json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports)
            arr.push_back(to_json(r));
        out << nlohmann::json{{"config_hash", config_hash(c)}, {"reports", arr}, {"pass", pass}}.dump(2) << '\n';
    } else {
        out << format_table(reports);
    }
    return status_of(pass, false);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Anisotropic rearrangement on Carnot groups: rearrange fields and check the inequalities"};
    app.require_subcommand(1);
    Overrides o;
    bool json = false;
    std::string axis = "h";
    int steps = 4;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "YAML or JSON experiment config");
        sub->add_option("--group", o.group, "group id (euclidean1, euclidean2, euclidean3, heisenberg1)");
        sub->add_option("--gauge", o.gauge, "gauge id(s), comma separated (euclidean, koranyi, box, carnot)");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--resolution", o.resolution, "grid spacing along the first axis");
        sub->add_option("--levels", o.levels, "threshold count K");
        sub->add_flag("--json", json, "print JSON instead of a table");
    };
    CLI::App* rearr = app.add_subcommand("rearrange", "rearrange the configured fields; write u*, profiles, reports");
    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    CLI::App* consts = app.add_subcommand("constants", "estimate C0, Cper_bound, sigma(B_1), Csym");
    CLI::App* sweep = app.add_subcommand("sweep", "convergence sweep along one resolution axis");
    CLI::App* valid = app.add_subcommand("validate", "group and gauge self-tests");
    for (CLI::App* sub : {rearr, verify, consts, sweep, valid})
        common(sub);
    sweep->add_option("--axis", axis, "h, K or eps")->check(CLI::IsMember({"h", "K", "eps"}));
    sweep->add_option("--steps", steps, "number of refinement steps")->check(CLI::Range(2, 12));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kPass;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    try {
        const ExperimentConfig c = resolve_config(o);
        if (*rearr)
            return cmd_rearrange(c, json, out);
        if (*verify)
            return cmd_verify(c, json, out, err);
        if (*consts)
            return cmd_constants(c, json, out);
        if (*sweep)
            return cmd_sweep(c, axis, steps, json, out);
        return cmd_validate(c, json, out);
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kUsage;
    } catch (const TruncationError& e) {
        err << "truncation: " << e.what() << '\n';
        return kUsage;
    } catch (const StructureError& e) {
        err << "structure error: " << e.what() << '\n';
        return kUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace carnot::cli
