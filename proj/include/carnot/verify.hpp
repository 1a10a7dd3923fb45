#ifndef CARNOT_VERIFY_HPP
#define CARNOT_VERIFY_HPP

#include "carnot/horizontal.hpp"
#include "carnot/rearrange.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace carnot {

struct Tolerances {
    double identity = 0.01;     ///< equimeasurability, p = 1 consistency
    double inequality = 0.03;   ///< slack on energy / perimeter ratios
    double refinement = 0.05;   ///< constants under one refinement
    double coarea = 0.05;
    double homogeneity = 0.05;
    double sphere_weight = 0.05;
    double polar = 0.02;        ///< sigma(B_1) = Q L^n(B_1)
};

struct ConstantsOptions {
    int nodes = 0;              ///< per axis; 0 picks 512 (1D), 128 (2D), 64 (3D)
    double refinement = 1.5;    ///< node factor of the refined pass
    double eps_cells = 3.0;
    std::int64_t sphere_samples = 2'000'000;
    std::uint64_t seed = 11;
};

/// Empirical constants. Ciso_emp is the largest isoperimetric ratio over the scanned
/// family, a lower bound for the true constant; Cper_bound and Csym inherit that status.
struct ConstantsRecord {
    std::string group_id;
    std::string gauge_id;
    double volB1 = 0.0;
    double PhB1 = 0.0;
    double C0 = 0.0;
    double Ciso_emp = 0.0;
    double Cper_bound = 0.0;
    double sigmaB1 = 0.0;
    double Csym = 0.0;
    std::string iso_witness;
    int nodes = 0;
    int refined_nodes = 0;
    double refinement_change = 0.0; ///< max relative change of PhB1, C0, Cper_bound
    bool converged = false;
    std::vector<SetMeasurement> sets;
    std::vector<std::string> warnings;
};

ConstantsRecord estimate_constants(const Gauge& gauge, const std::vector<SetSpec>& family,
                                   const ConstantsOptions& options = {}, const Tolerances& tol = {});

nlohmann::json to_json(const ConstantsRecord& c);

/// sigma(B_1) against Q L^n(B_1) from the same record.
VerificationReport polar_consistency(const ConstantsRecord& c, int Q, double tolerance);

/// Shared inputs of the rearrangement checks. Every inequality uses `constants`.
struct CheckContext {
    GroupSpec group;
    Gauge gauge;
    VolumeFunction volume;
    ConstantsRecord constants;
    RearrangeOptions rearrange;
    PerimeterOptions perimeter;
    Tolerances tol;
    double hgrad_floor = 0.02;
};

struct NamedPhi {
    std::string name;
    std::function<double(double)> phi;
};
/// s, s^2, min(s, 1).
std::vector<NamedPhi> default_phis();

Rearrangement rearrange(const CheckContext& ctx, const GridField& u);

/// integral of phi(u*) against integral of phi(u), relative identity per phi.
std::vector<VerificationReport> check_equimeasurability(const CheckContext& ctx, const GridField& u,
                                                        const Rearrangement& r, const std::vector<NamedPhi>& phis);

/// max node |u* - u| on the shared nodes (u radial and nonincreasing); bound 2 (h + max u / K).
VerificationReport check_fixed_point(const CheckContext& ctx, const GridField& u, const Rearrangement& r);

/// P_h(E_{u*}(t)) <= Cper_bound P_h(E_u(t)) for each t; both use the window of u.
std::vector<VerificationReport> check_perimeter_quasimonotone(const CheckContext& ctx, const GridField& u,
                                                              const Rearrangement& r,
                                                              const std::vector<double>& thresholds);

/// integral |D_h u*| <= Cper_bound integral |D_h u| (both by grid differences).
VerificationReport energy_p1(const CheckContext& ctx, const GridField& u, const Rearrangement& r);

/// integral Psi(u*)^p <= Csym^p integral |D_h u|^p.
VerificationReport energy_weighted_p(const CheckContext& ctx, const GridField& u, const Rearrangement& r, double p);

/// integral Psi(u*)^p <= Cper_bound^p integral |D_h u|^p; requires the Carnot gauge.
VerificationReport energy_carnot_p(const CheckContext& ctx, const GridField& u, const Rearrangement& r, double p);

/// integral of Psi(u*)^p d mu, summed over profile segments as V(r_right) - V(r_left) times Psi^p.
double psi_energy(const Rearrangement& r, double p);

} // namespace carnot

#endif // CARNOT_VERIFY_HPP
