#ifndef CARNOT_GAUGE_HPP
#define CARNOT_GAUGE_HPP

#include "carnot/group.hpp"

#include <functional>
#include <string>

namespace carnot {

enum class GaugeSmoothness { smooth_away_from_origin, carnot };

/// Homogeneous norm ||.|| on a group; B_r = {||x|| < r}.
///
/// `hgrad` returns |D_h ||x||| and may be empty, in which case frame-directional
/// central differences of `eval` are used. `unit_ball_extent(i)` is max |x_i| over B_1
/// and is used to size grids that must contain a ball.
struct Gauge {
    using Fn = std::function<double(const Point&)>;

    std::string id;
    GroupSpec group;
    Fn eval;
    Fn hgrad;
    GaugeSmoothness smoothness = GaugeSmoothness::smooth_away_from_origin;
    Point unit_ball_extent;
};

/// |x| on R^n.
Gauge euclidean_gauge(const GroupSpec& g);

/// max_i |x_i| on R^n; max(|x|, |y|, sqrt|t|) on H^1.
Gauge box_gauge(const GroupSpec& g);

/// ((x^2+y^2)^2 + 16 t^2)^{1/4} on H^1.
Gauge koranyi_gauge(const GroupSpec& g);

/// d_CC(x, 0). On R^n this is the Euclidean norm; on H^1 it is evaluated through the
/// geodesic family (see cc_distance_from_origin). |D_h ||x||_C| is taken as 1.
Gauge carnot_gauge(const GroupSpec& g);

/// "euclidean", "koranyi", "box", "carnot". Throws InputError for unknown ids and for
/// combinations that are not homogeneous norms (e.g. "euclidean" on H^1).
Gauge gauge_by_id(const std::string& id, const GroupSpec& g);
std::vector<std::string> gauge_ids();

double gauge_eval(const Gauge& gauge, const Point& p);

/// |D_h ||x|||(p). Throws UndefinedPointError at p = 0.
double gauge_hgrad_norm(const Gauge& gauge, const Point& p);

/// sqrt(sum_i ((||p + s X_i|| - ||p - s X_i||) / 2s)^2) with s = step * max(||p||, 1e-300)^{max weight}.
double gauge_hgrad_norm_fd(const Gauge& gauge, const Point& p, double step = 1e-6);

/// Carnot-Caratheodory distance from the identity in H^1 (coordinates (x, y, t)).
///
/// Geodesics from 0 project to circular arcs; an arc of turning angle phi and length L
/// reaches radius r = L sin(phi/2)/(phi/2) and height |t| = L^2 (phi - sin phi)/(2 phi^2).
/// phi in (0, 2 pi) is found from |t|/r^2 = (phi - sin phi)/(8 sin^2(phi/2)) by bracketed
/// Newton iteration. On the t-axis the distance is 2 sqrt(pi |t|).
double cc_distance_from_origin(const GroupSpec& g, const Point& p);
double heisenberg_cc_distance(double x, double y, double t);

struct GaugeValidationOptions {
    double homogeneity_tol = 1e-9;   ///< |‖δ_r x‖ - r‖x‖| <= tol (1 + r‖x‖)
    double hgrad_homogeneity_tol = 1e-8;
    double fd_consistency_tol = 1e-4;
    double hgrad_upper_bound = 1.0 + 1e-6; ///< checked on non-Euclidean groups
};

/// Random-sample checks of positivity, homogeneity, degree-zero homogeneity of hgrad and
/// agreement of hgrad with finite differences of eval. The report's lhs is the worst
/// violation/tolerance ratio (pass iff <= 1); raw violations are in `resolution`.
/// For the Carnot gauge the finite-difference check uses hgrad == 1 and skips samples
/// within 10% (relative) of the t-axis.
VerificationReport validate_gauge(const Gauge& gauge, int samples, std::uint64_t seed = 2,
                                  GaugeValidationOptions options = {});

/// Defaults used for the Carnot gauge: looser homogeneity of numerically derived quantities.
GaugeValidationOptions carnot_validation_options();

} // namespace carnot

#endif // CARNOT_GAUGE_HPP
