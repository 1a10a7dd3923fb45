#include "carnot/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace carnot {

namespace {

using nlohmann::json;

json yaml_to_json(const YAML::Node& node)
{
    switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
        return nullptr;
    case YAML::NodeType::Sequence: {
        json arr = json::array();
        for (const auto& item : node)
            arr.push_back(yaml_to_json(item));
        return arr;
    }
    case YAML::NodeType::Map: {
        json obj = json::object();
        for (const auto& kv : node)
            obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
        return obj;
    }
    case YAML::NodeType::Scalar:
        break;
    }
    const std::string text = node.Scalar();
    if (node.Tag() == "!")
        return text; // quoted
    bool b = false;
    if (YAML::convert<bool>::decode(node, b))
        return b;
    long long i = 0;
    if (YAML::convert<long long>::decode(node, i))
        return i;
    double d = 0.0;
    if (YAML::convert<double>::decode(node, d))
        return d;
    return text;
}

// Reads a JSON object while tracking which keys were consumed, so leftovers can be
// reported as unknown.
class Reader {
public:
    Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix))
    {
        if (!obj_.is_object())
            throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected a mapping");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json* take(const std::string& key)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() || it->is_null() ? nullptr : &*it;
    }

    std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    void str(const std::string& key, std::string& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_string())
                throw ConfigError(path(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void boolean(const std::string& key, bool& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_boolean())
                throw ConfigError(path(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void number(const std::string& key, double& out, double min_exclusive = -HUGE_VAL)
    {
        if (const json* v = take(key)) {
            if (!v->is_number())
                throw ConfigError(path(key), "expected a number");
            const double d = v->get<double>();
            if (!std::isfinite(d) || !(d > min_exclusive))
                throw ConfigError(path(key), "must be a finite number > " + fmt(min_exclusive));
            out = d;
        }
    }

    template <typename Int>
    void integer(const std::string& key, Int& out, long long min_value)
    {
        const json* v = take(key);
        if (!v)
            return;
        const std::string msg = "expected an integer >= " + std::to_string(min_value);
        if (v->is_number_unsigned()) {
            const auto x = v->get<std::uint64_t>();
            if (min_value > 0 && x < static_cast<std::uint64_t>(min_value))
                throw ConfigError(path(key), msg);
            out = static_cast<Int>(x);
        } else if (v->is_number_integer()) {
            const auto x = v->get<long long>();
            if (x < min_value)
                throw ConfigError(path(key), msg);
            out = static_cast<Int>(x);
        } else if (v->is_number_float()) {
            // YAML writes 1e7 as a float
            const double d = v->get<double>();
            if (d != std::floor(d) || d < static_cast<double>(min_value) || d > 9.0e18)
                throw ConfigError(path(key), msg);
            out = static_cast<Int>(d);
        } else {
            throw ConfigError(path(key), msg);
        }
    }

    void numbers(const std::string& key, std::vector<double>& out, double min_exclusive)
    {
        if (const json* v = take(key)) {
            const json arr = v->is_array() ? *v : json::array({*v});
            std::vector<double> vals;
            for (const json& x : arr) {
                if (!x.is_number() || !(x.get<double>() > min_exclusive))
                    throw ConfigError(path(key), "expected numbers > " + fmt(min_exclusive));
                vals.push_back(x.get<double>());
            }
            out = std::move(vals);
        }
    }

    void strings(const std::string& key, std::vector<std::string>& out)
    {
        if (const json* v = take(key)) {
            const json arr = v->is_array() ? *v : json::array({*v});
            std::vector<std::string> vals;
            for (const json& x : arr) {
                if (!x.is_string())
                    throw ConfigError(path(key), "expected strings");
                vals.push_back(x.get<std::string>());
            }
            out = std::move(vals);
        }
    }

    void finish() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError(path(it.key()), "unknown key");
    }

private:
    static std::string fmt(double d)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", d);
        return buf;
    }

    const json& obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};

FieldSpec parse_field(const json& j, const std::string& where)
{
    FieldSpec f;
    if (j.is_string()) {
        f.builder = j.get<std::string>();
    } else {
        Reader r(j, where);
        r.str("builder", f.builder);
        r.str("file", f.file);
        r.number("height", f.height, 0.0);
        r.number("radius", f.radius, 0.0);
        r.finish();
    }
    if (f.builder.empty() == f.file.empty())
        throw ConfigError(where, "give exactly one of 'builder' and 'file'");
    if (!f.builder.empty()) {
        auto names = analytic_field_names();
        names.push_back("cone");
        if (std::find(names.begin(), names.end(), f.builder) == names.end())
            throw ConfigError(where, "unknown field builder '" + f.builder + "'");
    }
    return f;
}

void check_ids(const ExperimentConfig& c)
{
    const auto groups = group_ids();
    if (std::find(groups.begin(), groups.end(), c.group) == groups.end())
        throw ConfigError("group", "unknown group id '" + c.group + "'");
    if (c.gauges.empty())
        throw ConfigError("gauges", "at least one gauge is required");
    const GroupSpec g = group_by_id(c.group);
    for (const std::string& id : c.gauges) {
        const auto ids = gauge_ids();
        if (std::find(ids.begin(), ids.end(), id) == ids.end())
            throw ConfigError("gauges", "unknown gauge id '" + id + "'");
        try {
            gauge_by_id(id, g);
        } catch (const InputError& e) {
            throw ConfigError("gauges", e.what());
        }
    }
    for (const std::string& check : c.checks)
        if (std::find(known_checks().begin(), known_checks().end(), check) == known_checks().end())
            throw ConfigError("checks", "unknown check '" + check + "'");
    for (double p : c.p)
        if (!(p >= 1.0))
            throw ConfigError("energy.p", "exponents must be >= 1");
    for (double q : c.quasimonotone_levels)
        if (!(q > 0.0 && q < 1.0))
            throw ConfigError("perimeter.quasimonotone_levels", "fractions must lie in (0, 1)");
    if (c.homogeneity_radii.size() < 2)
        throw ConfigError("perimeter.homogeneity_radii", "need at least two radii");
    if (c.perimeter.eps_cells < 2.0)
        throw ConfigError("perimeter.eps_cells", "must be >= 2");
}

const char* perimeter_method_key(PerimeterMethod m)
{
    return m == PerimeterMethod::mollified_bv ? "mollified_bv" : "coarea_slice";
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// (x,y,t)(x',y',t') with an extra x x'^2 / 2 in t: neither associative nor dilation-compatible.
GroupSpec corrupted(const GroupSpec& g)
{
    GroupSpec out = g;
    out.id = g.id + "-corrupted";
    auto law = g.law;
    const int last = g.n - 1;
    out.law = [law, last](const Point& a, const Point& b) {
        Point p = law(a, b);
        p(last) += 0.5 * a(0) * b(0) * b(0);
        return p;
    };
    return out;
}

} // namespace

void validate_config(const ExperimentConfig& c)
{
    check_ids(c);
    if (c.levels < 2)
        throw ConfigError("grid.levels", "must be >= 2");
    if (c.nodes != 0 && c.nodes < 5)
        throw ConfigError("grid.nodes", "must be >= 5");
    if (c.resolution < 0.0)
        throw ConfigError("grid.resolution", "must be positive (0 selects grid.nodes)");
}

const std::vector<std::string>& known_checks()
{
    static const std::vector<std::string> checks{
        "validate",       "constants",      "polar",           "equimeasurability", "fixed_point",
        "coarea",         "homogeneity",    "sphere_weight",   "quasimonotone",     "energy_p1",
        "energy_weighted", "energy_carnot", "dual_perimeter",  "level_bands"};
    return checks;
}

ExperimentConfig config_from_json(const json& j)
{
    ExperimentConfig c;
    Reader root(j, "");
    root.str("name", c.name);
    if (const json* g = root.take("group")) {
        if (g->is_string()) {
            c.group = g->get<std::string>();
        } else {
            Reader r(*g, "group");
            r.str("id", c.group);
            r.boolean("corrupt_law", c.corrupt_law);
            r.finish();
        }
    }
    if (root.has("gauge") && root.has("gauges"))
        throw ConfigError("gauge", "give either 'gauge' or 'gauges'");
    root.strings("gauge", c.gauges);
    root.strings("gauges", c.gauges);
    if (const json* f = root.take("fields")) {
        const json arr = f->is_array() ? *f : json::array({*f});
        for (std::size_t k = 0; k < arr.size(); ++k)
            c.fields.push_back(parse_field(arr[k], "fields[" + std::to_string(k) + "]"));
    }
    if (const json* g = root.take("grid")) {
        Reader r(*g, "grid");
        r.integer("nodes", c.nodes, 0);
        r.number("resolution", c.resolution);
        r.integer("levels", c.levels, 2);
        r.finish();
    }
    root.strings("checks", c.checks);
    if (const json* e = root.take("energy")) {
        Reader r(*e, "energy");
        r.numbers("p", c.p, 0.0);
        r.finish();
    }
    if (const json* p = root.take("perimeter")) {
        Reader r(*p, "perimeter");
        std::string method = perimeter_method_key(c.perimeter.method);
        r.str("method", method);
        if (method == "mollified_bv")
            c.perimeter.method = PerimeterMethod::mollified_bv;
        else if (method == "coarea_slice")
            c.perimeter.method = PerimeterMethod::coarea_slice;
        else
            throw ConfigError("perimeter.method", "expected mollified_bv or coarea_slice");
        r.number("eps_cells", c.perimeter.eps_cells, 0.0);
        r.integer("coarea_slices", c.coarea_slices, 16);
        r.numbers("quasimonotone_levels", c.quasimonotone_levels, 0.0);
        r.numbers("homogeneity_radii", c.homogeneity_radii, 0.0);
        r.integer("homogeneity_nodes", c.homogeneity_nodes, 0);
        r.numbers("sphere_radii", c.sphere_radii, 0.0);
        r.finish();
    }
    if (const json* k = root.take("constants")) {
        Reader r(*k, "constants");
        r.integer("nodes", c.constants.nodes, 0);
        r.number("refinement", c.constants.refinement, 1.0);
        r.number("eps_cells", c.constants.eps_cells, 0.0);
        r.integer("sphere_samples", c.constants.sphere_samples, 1);
        r.boolean("balls_only", c.balls_only);
        r.finish();
    }
    if (const json* v = root.take("volume")) {
        Reader r(*v, "volume");
        std::string method = c.volume.method == VolumeOptions::Method::monte_carlo ? "monte_carlo" : "quadrature";
        r.str("method", method);
        if (method == "monte_carlo")
            c.volume.method = VolumeOptions::Method::monte_carlo;
        else if (method == "quadrature")
            c.volume.method = VolumeOptions::Method::quadrature;
        else
            throw ConfigError("volume.method", "expected monte_carlo or quadrature");
        r.integer("samples", c.volume.samples, 1);
        r.integer("quadrature_nodes", c.volume.quadrature_nodes, 2);
        r.finish();
    }
    if (const json* t = root.take("tolerances")) {
        Reader r(*t, "tolerances");
        r.number("identity", c.tolerances.identity, 0.0);
        r.number("inequality", c.tolerances.inequality, 0.0);
        r.number("refinement", c.tolerances.refinement, 0.0);
        r.number("coarea", c.tolerances.coarea, 0.0);
        r.number("homogeneity", c.tolerances.homogeneity, 0.0);
        r.number("sphere_weight", c.tolerances.sphere_weight, 0.0);
        r.number("polar", c.tolerances.polar, 0.0);
        r.finish();
    }
    if (const json* v = root.take("validation")) {
        Reader r(*v, "validation");
        r.integer("samples", c.validation_samples, 1);
        r.finish();
    }
    root.str("output", c.output);
    root.integer("seed", c.seed, 0);
    root.finish();
    validate_config(c);
    return c;
}

json to_json(const ExperimentConfig& c)
{
    json fields = json::array();
    for (const FieldSpec& f : c.fields) {
        if (!f.file.empty())
            fields.push_back({{"file", f.file}});
        else if (f.builder == "cone")
            fields.push_back({{"builder", f.builder}, {"height", f.height}, {"radius", f.radius}});
        else
            fields.push_back({{"builder", f.builder}});
    }
    return {{"name", c.name},
            {"group", {{"id", c.group}, {"corrupt_law", c.corrupt_law}}},
            {"gauges", c.gauges},
            {"fields", fields},
            {"grid", {{"nodes", c.nodes}, {"resolution", c.resolution}, {"levels", c.levels}}},
            {"checks", c.checks},
            {"energy", {{"p", c.p}}},
            {"perimeter",
             {{"method", perimeter_method_key(c.perimeter.method)},
              {"eps_cells", c.perimeter.eps_cells},
              {"coarea_slices", c.coarea_slices},
              {"quasimonotone_levels", c.quasimonotone_levels},
              {"homogeneity_radii", c.homogeneity_radii},
              {"homogeneity_nodes", c.homogeneity_nodes},
              {"sphere_radii", c.sphere_radii}}},
            {"constants",
             {{"nodes", c.constants.nodes},
              {"refinement", c.constants.refinement},
              {"eps_cells", c.constants.eps_cells},
              {"sphere_samples", c.constants.sphere_samples},
              {"balls_only", c.balls_only}}},
            {"volume",
             {{"method", c.volume.method == VolumeOptions::Method::monte_carlo ? "monte_carlo" : "quadrature"},
              {"samples", c.volume.samples},
              {"quadrature_nodes", c.volume.quadrature_nodes}}},
            {"tolerances",
             {{"identity", c.tolerances.identity},
              {"inequality", c.tolerances.inequality},
              {"refinement", c.tolerances.refinement},
              {"coarea", c.tolerances.coarea},
              {"homogeneity", c.tolerances.homogeneity},
              {"sphere_weight", c.tolerances.sphere_weight},
              {"polar", c.tolerances.polar}}},
            {"validation", {{"samples", c.validation_samples}}},
            {"output", c.output},
            {"seed", c.seed}};
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    json j;
    try {
        j = is_json ? json::parse(text) : yaml_to_json(YAML::Load(text));
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON in '") + path + "': " + e.what());
    } catch (const YAML::Exception& e) {
        throw ConfigError("<file>", std::string("malformed YAML in '") + path + "': " + e.what());
    }
    if (j.is_null())
        j = json::object();
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& c)
{
    const std::string text = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return hex64(h);
}

GroupSpec config_group(const ExperimentConfig& c)
{
    const GroupSpec g = group_by_id(c.group);
    return c.corrupt_law ? corrupted(g) : g;
}

Gauge config_gauge(const ExperimentConfig& c, const std::string& id) { return gauge_by_id(id, group_by_id(c.group)); }

int config_nodes(const ExperimentConfig& c, int n)
{
    if (c.nodes > 0)
        return c.nodes;
    switch (n) {
    case 1:
        return 256;
    case 2:
        return 128;
    default:
        return 64;
    }
}

DerivedSeeds derive_seeds(std::uint64_t seed)
{
    Rng rng(seed);
    DerivedSeeds s;
    s.volume = rng();
    s.sphere = rng();
    s.validation = rng();
    return s;
}

} // namespace carnot
