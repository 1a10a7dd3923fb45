#ifndef CARNOT_REARRANGE_HPP
#define CARNOT_REARRANGE_HPP

#include "carnot/gauge.hpp"
#include "carnot/grid_field.hpp"

#include <cstdint>
#include <optional>

namespace carnot {

/// V(r) = mu(B_r). Homogeneous: c1 r^Q. Tabulated: piecewise linear through (table_r, table_v),
/// valid on [0, table_r.back()].
struct VolumeFunction {
    enum class Kind { homogeneous, tabulated };

    Kind kind = Kind::homogeneous;
    std::string gauge_id;
    double c1 = 0.0;
    double c1_stderr = 0.0;
    double Q_eff = 0.0;
    Eigen::ArrayXd table_r;
    Eigen::ArrayXd table_v;

    double operator()(double r) const;
    double max_radius() const;
    double max_volume() const;
};

struct VolumeOptions {
    enum class Method { monte_carlo, quadrature };
    Method method = Method::monte_carlo;
    std::int64_t samples = 10'000'000;
    int quadrature_nodes = 160;
    std::uint64_t seed = 7;
};

/// mu = L^n: c1 = L^n(B_1) by Monte Carlo (uniform samples in the extent box of B_1,
/// stderr reported) or by midpoint node counting on a quadrature_nodes^n grid.
VolumeFunction volume_function(const Gauge& gauge, const VolumeOptions& options = {});

VolumeFunction homogeneous_volume(const Gauge& gauge, double c1, double c1_stderr = 0.0);

/// V for mu = rho L^n, measured on the nodes of `grid`: nodes are sorted by gauge value and
/// their masses accumulated. Only radii below the smallest gauge value on the boundary
/// layer are covered. Throws StructureError when V has a flat stretch (rho vanishing on a
/// shell), since V must be a bijection.
VolumeFunction tabulated_volume(const Gauge& gauge, const Grid& grid, const Eigen::ArrayXd& density);

/// V^{-1}(v). Throws InputError for v < 0 or v beyond the table.
double volume_inverse(const VolumeFunction& V, double v);

/// sup{t : nu(t) > V(r)} for the step-function nu of the table: t_{k+1} for the largest k with
/// nu(t_k) > V(r), 0 when there is none. At r = 0 this is max u.
double nu_tilde(const DistributionFunction& dist, const VolumeFunction& V, double r);

/// nu_tilde at each radius.
Eigen::ArrayXd sample_profile(const DistributionFunction& dist, const VolumeFunction& V,
                              const Eigen::ArrayXd& radii);

/// Piecewise-linear profile through (radii_j, profile_j), radii nondecreasing and profile
/// nonincreasing. Repeated radii encode jumps.
struct RearrangementProfile {
    Eigen::ArrayXd radii;
    Eigen::ArrayXd profile;
    double support_radius = 0.0;

    bool empty() const { return radii.size() < 2; }
};

/// Slopes of the profile per segment and Psi = |slope| keyed by profile value: segment j
/// covers values [value_lo_j, value_hi_j). Vertical segments (jumps) carry no Psi and are
/// counted; flat segments carry Psi = 0.
struct ProfileDerivative {
    Eigen::ArrayXd r_left;
    Eigen::ArrayXd r_right;
    Eigen::ArrayXd slope;
    Eigen::ArrayXd value_lo;
    Eigen::ArrayXd value_hi;
    Eigen::ArrayXd psi;
    int jumps = 0;

    bool empty() const { return psi.size() == 0; }
    /// Psi(v); 0 outside every tabulated segment.
    double psi_at(double v) const;
    /// Slope at radius r (segment containing r, right-open); 0 outside.
    double slope_at(double r) const;
};

ProfileDerivative profile_derivative(const RearrangementProfile& profile);

struct RearrangeOptions {
    int levels = 512;
    /// Output box; default: centred box holding B_{support radius} with two empty cells per side
    /// (or the input box for weighted fields).
    std::optional<Box> out_box;
    /// Density on the output grid for weighted fields when the output grid differs from the input.
    ScalarFn out_density;
    /// Psi is taken from a profile through `psi_segments` equally spaced levels whose
    /// distribution is window-averaged over psi_smoothing_cells typical cell steps of u
    /// (0 uses the raw threshold profile).
    double psi_smoothing_cells = 1.5;
    int psi_segments = 128;
};

struct Rearrangement {
    GridField field;
    RearrangementProfile profile;
    ProfileDerivative derivative; ///< of the smoothed profile (see RearrangeOptions)
    DistributionFunction distribution;
    VolumeFunction volume;
};

/// u*(x) = nu_tilde(||x||) on an output grid with the input spacing. For fields with a
/// density the volume is tabulated on the output grid (`volume` must then be omitted).
/// Throws TruncationError when B_{V^{-1}(nu(0))} does not fit inside the output box.
Rearrangement rearrange_field(const GridField& field, const Gauge& gauge, const VolumeFunction& volume,
                              const RearrangeOptions& options = {});
Rearrangement rearrange_weighted(const GridField& field, const Gauge& gauge, const RearrangeOptions& options = {});

/// height * max(0, 1 - ||x|| / radius).
AnalyticField gauge_cone(const Gauge& gauge, double height = 1.0, double radius = 1.0);

/// Half-extents of B_r along each axis.
Point ball_extent(const Gauge& gauge, double r);

} // namespace carnot

#endif // CARNOT_REARRANGE_HPP
