#include "carnot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace carnot {

namespace {

int default_constant_nodes(int n)
{
    switch (n) {
    case 1:
        return 512;
    case 2:
        return 128;
    default:
        return 64;
    }
}

struct ScanSummary {
    double volB1 = 0.0;
    double PhB1 = 0.0;
    double C0 = 0.0;
    double Ciso = 0.0;
    std::string witness;
};

ScanSummary summarize(const std::vector<SetMeasurement>& sets, int Q)
{
    ScanSummary s;
    bool have_ball = false;
    for (const SetMeasurement& m : sets) {
        if (m.unit_ball && !have_ball) {
            have_ball = true;
            s.volB1 = m.volume;
            s.PhB1 = m.perimeter;
        }
        if (m.ratio > s.Ciso) {
            s.Ciso = m.ratio;
            s.witness = m.name;
        }
    }
    if (!have_ball)
        throw InputError("estimate_constants: the set family must contain the unit gauge ball");
    if (!(s.PhB1 > 0.0))
        throw NumericalError("estimate_constants: zero perimeter for the unit ball");
    s.C0 = std::pow(s.volB1, (Q - 1.0) / Q) / s.PhB1;
    return s;
}

double rel_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double max_spacing(const Grid& grid) { return grid.spacing().maxCoeff(); }

void stamp(VerificationReport& rep, const CheckContext& ctx, const GridField& u)
{
    rep.resolution["h"] = max_spacing(u.grid());
    rep.resolution["levels"] = ctx.rearrange.levels;
    rep.resolution["constants_nodes"] = ctx.constants.refined_nodes;
}

double excluded_weight_mass(const CheckContext& ctx, const Rearrangement& r)
{
    const Grid& grid = r.field.grid();
    const Eigen::ArrayXd w = r.field.weights();
    double mass = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        if (r.field.values()(i) > 0.0 && ctx.gauge.hgrad(grid.node(i)) < ctx.hgrad_floor)
            mass += w(i);
    return mass;
}

} // namespace

ConstantsRecord estimate_constants(const Gauge& gauge, const std::vector<SetSpec>& family,
                                   const ConstantsOptions& options, const Tolerances& tol)
{
    if (family.empty())
        throw InputError("estimate_constants: empty set family");
    if (!(options.refinement > 1.0))
        throw InputError("estimate_constants: refinement factor must exceed 1");
    const GroupSpec& g = gauge.group;
    ConstantsRecord c;
    c.group_id = g.id;
    c.gauge_id = gauge.id;
    c.nodes = options.nodes > 0 ? options.nodes : default_constant_nodes(g.n);
    c.refined_nodes = static_cast<int>(std::lround(c.nodes * options.refinement));

    std::vector<SetMeasurement> coarse, fine;
    for (const SetSpec& set : family) {
        coarse.push_back(measure_set(set, g, c.nodes, options.eps_cells));
        fine.push_back(measure_set(set, g, c.refined_nodes, options.eps_cells));
    }
    const ScanSummary a = summarize(coarse, g.Q);
    const ScanSummary b = summarize(fine, g.Q);

    c.volB1 = b.volB1;
    c.PhB1 = b.PhB1;
    c.C0 = b.C0;
    c.Ciso_emp = b.Ciso;
    c.iso_witness = b.witness;
    c.Cper_bound = b.Ciso / b.C0;
    c.refinement_change =
        std::max({rel_change(a.PhB1, b.PhB1), rel_change(a.C0, b.C0), rel_change(a.Ciso / a.C0, c.Cper_bound)});
    c.converged = c.refinement_change <= tol.refinement;
    if (!c.converged)
        c.warnings.push_back("unreliable constants: refinement change " + std::to_string(c.refinement_change) +
                             " exceeds " + std::to_string(tol.refinement));
    c.sets = std::move(fine);

    const SphereSamples sphere = sample_sphere(gauge, options.sphere_samples, options.seed);
    c.sigmaB1 = sigma_unit_sphere(sphere);
    c.Csym = c.sigmaB1 / c.PhB1 * c.Cper_bound;
    return c;
}

nlohmann::json to_json(const ConstantsRecord& c)
{
    nlohmann::json sets = nlohmann::json::array();
    for (const SetMeasurement& m : c.sets)
        sets.push_back({{"name", m.name},
                        {"volume", m.volume},
                        {"perimeter", m.perimeter},
                        {"ratio", m.ratio},
                        {"unit_ball", m.unit_ball}});
    return {{"group", c.group_id},
            {"gauge", c.gauge_id},
            {"volB1", c.volB1},
            {"PhB1", c.PhB1},
            {"C0", c.C0},
            {"Ciso_emp", c.Ciso_emp},
            {"Ciso_provenance", "empirical lower bound: max ratio over " + std::to_string(c.sets.size()) + " sets"},
            {"iso_witness", c.iso_witness},
            {"Cper_bound", c.Cper_bound},
            {"sigmaB1", c.sigmaB1},
            {"Csym", c.Csym},
            {"nodes", c.nodes},
            {"refined_nodes", c.refined_nodes},
            {"refinement_change", c.refinement_change},
            {"converged", c.converged},
            {"sets", sets},
            {"warnings", c.warnings}};
}

VerificationReport polar_consistency(const ConstantsRecord& c, int Q, double tolerance)
{
    VerificationReport rep = VerificationReport::relative_identity("polar_consistency:" + c.group_id + ":" + c.gauge_id,
                                                                   c.sigmaB1, Q * c.volB1, tolerance);
    rep.resolution["nodes"] = c.refined_nodes;
    return rep;
}

std::vector<NamedPhi> default_phis()
{
    return {{"s", [](double s) { return s; }},
            {"s^2", [](double s) { return s * s; }},
            {"min(s,1)", [](double s) { return std::min(s, 1.0); }}};
}

Rearrangement rearrange(const CheckContext& ctx, const GridField& u)
{
    if (u.density())
        return rearrange_weighted(u, ctx.gauge, ctx.rearrange);
    return rearrange_field(u, ctx.gauge, ctx.volume, ctx.rearrange);
}

std::vector<VerificationReport> check_equimeasurability(const CheckContext& ctx, const GridField& u,
                                                        const Rearrangement& r, const std::vector<NamedPhi>& phis)
{
    std::vector<VerificationReport> out;
    for (const NamedPhi& phi : phis) {
        VerificationReport rep = VerificationReport::relative_identity(
            "equimeasurability[" + phi.name + "]", integrate(r.field, phi.phi), integrate(u, phi.phi), ctx.tol.identity);
        stamp(rep, ctx, u);
        out.push_back(std::move(rep));
    }
    return out;
}

VerificationReport check_fixed_point(const CheckContext& ctx, const GridField& u, const Rearrangement& r)
{
    const Grid& grid = u.grid();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double star = nu_tilde(r.distribution, r.volume, ctx.gauge.eval(grid.node(i)));
        worst = std::max(worst, std::abs(star - u.values()(i)));
    }
    const double h = max_spacing(grid);
    const double bound = 2.0 * (h + u.max_value() / ctx.rearrange.levels);
    VerificationReport rep = VerificationReport::bound("fixed_point", worst, bound);
    stamp(rep, ctx, u);
    return rep;
}

std::vector<VerificationReport> check_perimeter_quasimonotone(const CheckContext& ctx, const GridField& u,
                                                              const Rearrangement& r,
                                                              const std::vector<double>& thresholds)
{
    const double top = u.max_value();
    PerimeterOptions opts = ctx.perimeter;
    if (opts.window <= 0.0 && top > 0.0)
        opts.window = level_window(u, opts.eps_cells);
    std::vector<VerificationReport> out;
    for (double t : thresholds) {
        if (!(t >= 0.0) || !(t < top))
            throw InputError("check_perimeter_quasimonotone: threshold " + std::to_string(t) +
                             " must lie in [0, max u)");
        const double p_star = horizontal_perimeter(r.field, t, ctx.group, opts).value;
        const double p = horizontal_perimeter(u, t, ctx.group, opts).value;
        char id[64];
        std::snprintf(id, sizeof id, "perimeter_quasimonotone[t=%.4g]", t);
        VerificationReport rep = VerificationReport::inequality(id, p_star, p, ctx.constants.Cper_bound,
                                                                ctx.tol.inequality);
        stamp(rep, ctx, u);
        rep.resolution["window"] = opts.window;
        out.push_back(std::move(rep));
    }
    return out;
}

double psi_energy(const Rearrangement& r, double p)
{
    // u* is radial: integrate Psi^p shell by shell in polar form, mu(shell) = V(r_b) - V(r_a)
    const ProfileDerivative& d = r.derivative;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < d.psi.size(); ++j)
        if (d.psi(j) > 0.0)
            sum += std::pow(d.psi(j), p) * (r.volume(d.r_right(j)) - r.volume(d.r_left(j)));
    return sum;
}

VerificationReport energy_p1(const CheckContext& ctx, const GridField& u, const Rearrangement& r)
{
    VerificationReport rep = VerificationReport::inequality("energy_p1", bv_norm(r.field, ctx.group),
                                                            bv_norm(u, ctx.group), ctx.constants.Cper_bound,
                                                            ctx.tol.inequality);
    stamp(rep, ctx, u);
    return rep;
}

VerificationReport energy_weighted_p(const CheckContext& ctx, const GridField& u, const Rearrangement& r, double p)
{
    if (!(p >= 1.0))
        throw InputError("energy_weighted_p: p must be >= 1");
    char id[48];
    std::snprintf(id, sizeof id, "energy_weighted[p=%g]", p);
    VerificationReport rep = VerificationReport::inequality(id, psi_energy(r, p), energy_p(u, ctx.group, p),
                                                            std::pow(ctx.constants.Csym, p), ctx.tol.inequality);
    stamp(rep, ctx, u);
    const double excluded = excluded_weight_mass(ctx, r);
    rep.resolution["excluded_weight_mass"] = excluded;
    if (excluded > 0.0)
        rep.warnings.push_back("nodes with |D_h||x||| below the floor carry mass " + std::to_string(excluded));
    if (r.derivative.jumps > 0)
        rep.warnings.push_back(std::to_string(r.derivative.jumps) + " profile jumps carry no Psi");
    return rep;
}

VerificationReport energy_carnot_p(const CheckContext& ctx, const GridField& u, const Rearrangement& r, double p)
{
    if (!(p >= 1.0))
        throw InputError("energy_carnot_p: p must be >= 1");
    if (ctx.gauge.smoothness != GaugeSmoothness::carnot)
        throw InputError("energy_carnot_p: gauge '" + ctx.gauge.id + "' is not a Carnot gauge");
    char id[48];
    std::snprintf(id, sizeof id, "energy_carnot[p=%g]", p);
    VerificationReport rep = VerificationReport::inequality(id, psi_energy(r, p), energy_p(u, ctx.group, p),
                                                            std::pow(ctx.constants.Cper_bound, p),
                                                            ctx.tol.inequality);
    stamp(rep, ctx, u);
    if (r.derivative.jumps > 0)
        rep.warnings.push_back(std::to_string(r.derivative.jumps) + " profile jumps carry no Psi");
    return rep;
}

} // namespace carnot
