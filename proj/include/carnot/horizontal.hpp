#ifndef CARNOT_HORIZONTAL_HPP
#define CARNOT_HORIZONTAL_HPP

#include "carnot/gauge.hpp"
#include "carnot/grid_field.hpp"
#include "carnot/rearrange.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace carnot {

/// (X_1 u, ..., X_m u) at every node: one row per node, one column per frame field.
struct HorizontalGradientField {
    Grid grid;
    Eigen::ArrayXXd components;

    Eigen::ArrayXd norm() const { return components.square().rowwise().sum().sqrt(); }
};

/// Frame coefficients cached per node so repeated gradients on one grid are cheap.
class HorizontalOperator {
public:
    HorizontalOperator(const Grid& grid, const GroupSpec& g);

    const Grid& grid() const { return grid_; }
    int rank() const { return m_; }

    /// Coordinate partials by central differences, one-sided on the faces.
    Eigen::ArrayXXd partials(const Eigen::ArrayXd& values) const;
    Eigen::ArrayXXd gradient(const Eigen::ArrayXd& values) const;
    Eigen::ArrayXd gradient_norm(const Eigen::ArrayXd& values) const;
    /// sum over nodes of |D_h v|^p * cell volume
    double energy(const Eigen::ArrayXd& values, double p) const;
    /// sum_i X_i F_i at every node; F given as one column per frame field.
    Eigen::ArrayXd divergence(const Eigen::ArrayXXd& F) const;

private:
    Grid grid_;
    int n_ = 0;
    int m_ = 0;
    bool identity_frame_ = false;
    Eigen::ArrayXXd coeff_; // node x (n*m), entry j*m + i = X_i(node)_j
};

HorizontalGradientField horizontal_gradient(const GridField& field, const GroupSpec& g);

/// integral of |D_h u| dL^n (midpoint rule).
double bv_norm(const GridField& field, const GroupSpec& g);

/// integral of |D_h u|^p dL^n.
double energy_p(const GridField& field, const GroupSpec& g, double p);

enum class PerimeterMethod { mollified_bv, coarea_slice };
const char* to_string(PerimeterMethod m);

struct PerimeterOptions {
    PerimeterMethod method = PerimeterMethod::mollified_bv;
    /// Level window width in grid cells (>= 2): w = eps_cells * G, G being the 95th
    /// percentile over the support of max_j h_j |d_j u|.
    double eps_cells = 3.0;
    /// Explicit window width in u units; overrides eps_cells when > 0.
    double window = 0.0;
};

struct PerimeterEstimate {
    double value = 0.0;
    PerimeterMethod method = PerimeterMethod::mollified_bv;
    double spacing = 0.0;   ///< max grid spacing
    double eps = 0.0;       ///< window width in u units
    double level_lo = 0.0;
    double level_hi = 0.0;
};

/// Window width w in u units for `eps_cells` cells.
double level_window(const GridField& field, double eps_cells);

/// P_h(E_u(t)) from the ramp clamp((u - lo)/(hi - lo), 0, 1) over the window
/// [t - w/2, t + w/2] clipped to [0, max u]. Returns 0 when t >= max u.
PerimeterEstimate horizontal_perimeter(const GridField& field, double t, const GroupSpec& g,
                                       const PerimeterOptions& options = {});

/// Same on a fixed level band [lo, hi], reusing a prebuilt operator.
PerimeterEstimate perimeter_on_band(const HorizontalOperator& op, const Eigen::ArrayXd& u, double lo, double hi,
                                    PerimeterMethod method);

/// (t_k, P_h(E_u(t_k))) at the K midpoints t_k = (k + 1/2) max(u)/K.
struct PerimeterSweep {
    Eigen::ArrayXd levels;
    Eigen::ArrayXd perimeters;
    double dt = 0.0;
    double window = 0.0;
};
PerimeterSweep perimeter_sweep(const GridField& field, const GroupSpec& g, int K, const PerimeterOptions& options = {});

/// bv_norm(u) against the midpoint sum of P_h(E_u(t)) over K slices; relative identity.
VerificationReport coarea_check(const GridField& field, const GroupSpec& g, int K, double tolerance = 0.05,
                                const PerimeterOptions& options = {});

struct HomogeneityOptions {
    int nodes = 0;          ///< per axis; 0 picks 512 (2D), 128 (3D), 4096 (1D)
    double eps_cells = 3.0;
    double tolerance = 0.05;
};

/// P_h(B_R) for each radius from one cone field max(0, 1.25 R_max - ||x||) on a fixed grid
/// (level 1.25 R_max - R). Report: lhs = fitted log-log slope, rhs = Q - 1 (relative).
/// Perimeters are stored in `resolution` under "P(R=...)"; with two radii also "ratio".
VerificationReport perimeter_homogeneity_check(const GroupSpec& g, const Gauge& gauge, const std::vector<double>& radii,
                                               const HomogeneityOptions& options = {});

/// Samples of sigma on the unit gauge sphere: uniform points of B_1 projected by
/// x -> delta_{1/||x||} x, each of weight Q L^n(box)/samples, so the total is Q L^n(B_1).
struct SphereSamples {
    Eigen::ArrayXXd points; ///< n x count
    double weight = 0.0;
    std::int64_t drawn = 0;

    Eigen::Index count() const { return points.cols(); }
    double total() const { return weight * static_cast<double>(count()); }
    Point point(Eigen::Index j) const { return points.col(j).matrix(); }
};
SphereSamples sample_sphere(const Gauge& gauge, std::int64_t samples = 2'000'000, std::uint64_t seed = 11);

/// sigma(B_1) (measure of the unit sphere).
double sigma_unit_sphere(const SphereSamples& sphere);

/// integral over B_R of f: Gauss-Legendre in r (radial_nodes) times the sampled sphere.
double polar_integrate(const std::function<double(const Point&)>& f, const Gauge& gauge, double R,
                       const SphereSamples& sphere, int radial_nodes = 32);

struct SphereWeightOptions {
    int nodes = 0;             ///< grid nodes per axis; 0 picks the homogeneity default
    double eps_cells = 3.0;
    double hgrad_floor = 0.02; ///< nodes with |D_h||x||| below this are excluded
    double tolerance = 0.05;
    std::int64_t sphere_samples = 1'000'000;
    std::uint64_t seed = 11;
};

/// Compares sum |D_h ramp| / |D_h||x||| over grid nodes (the left side, with
/// hgrad < floor excluded) against R^{Q-1} sigma(B_1). The excluded sphere mass fraction is
/// estimated from sphere samples and reported as "excluded_fraction".
VerificationReport sphere_weight_integral(const Gauge& gauge, const GroupSpec& g, double R,
                                          const SphereWeightOptions& options = {});

/// Sets E = {x : inside(x)}, star-shaped under dilations, for the isoperimetric scan.
/// `bounding` must contain delta_{1.25} E.
struct SetSpec {
    std::string name;
    std::function<bool(const Point&)> inside;
    /// Optional homogeneous defining function (E = {f < 1}); when absent the Minkowski
    /// functional of E along dilations is computed by bisection.
    ScalarFn defining;
    Box bounding;
    bool unit_ball = false;
};

/// Unit ball of `gauge` plus (unless balls_only) boxes, ellipsoids and, on H^1, the balls
/// of the other gauges and bubble-shaped sets of revolution.
std::vector<SetSpec> default_set_family(const Gauge& gauge, bool balls_only = false);

struct SetMeasurement {
    std::string name;
    double volume = 0.0;
    double perimeter = 0.0;
    double ratio = 0.0; ///< volume^{(Q-1)/Q} / perimeter
    bool unit_ball = false;
};

SetMeasurement measure_set(const SetSpec& set, const GroupSpec& g, int nodes, double eps_cells = 3.0);

/// Lower bound on P_h(E_u(t)): max over the dictionary of the node sum over {u > t} of
/// div_h F. Each F returns its m frame components and must satisfy |F| <= 1.
using VectorFieldFn = std::function<Eigen::VectorXd(const Point&)>;
std::vector<VectorFieldFn> default_dual_dictionary(const Gauge& gauge);
double perimeter_dual_lower_bound(const GridField& field, double t, const GroupSpec& g,
                                  const std::vector<VectorFieldFn>& dictionary);

/// Number of nodes with t < u < s.
std::int64_t level_band_count(const GridField& field, double t, double s);

} // namespace carnot

#endif // CARNOT_HORIZONTAL_HPP
