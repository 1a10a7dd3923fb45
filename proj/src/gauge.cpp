#include "carnot/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace carnot {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_heisenberg(const GroupSpec& g) { return g.id == "heisenberg1"; }
bool is_euclidean(const GroupSpec& g) { return g.n == g.m && g.Q == g.n; }

void require_dim(const Gauge& gauge, const Point& p, const char* what)
{
    if (p.size() != gauge.group.n)
        throw InputError(std::string(what) + ": point has dimension " + std::to_string(p.size()) +
                         ", gauge " + gauge.id + " lives on n = " + std::to_string(gauge.group.n));
}

// phi - sin(phi), accurate for small phi
double phi_minus_sin(double phi)
{
    if (phi < 0.05) {
        const double p2 = phi * phi;
        return phi * p2 / 6.0 * (1.0 - p2 / 20.0 * (1.0 - p2 / 42.0 * (1.0 - p2 / 72.0)));
    }
    return phi - std::sin(phi);
}

// 1 - cos(phi) = 2 sin^2(phi/2)
double one_minus_cos(double phi)
{
    const double s = std::sin(0.5 * phi);
    return 2.0 * s * s;
}

// |t| / r^2 reached by an arc of turning angle phi.
double height_ratio(double phi) { return phi_minus_sin(phi) / (4.0 * one_minus_cos(phi)); }

double height_ratio_derivative(double phi)
{
    const double omc = one_minus_cos(phi);
    return (omc * omc - phi_minus_sin(phi) * std::sin(phi)) / (4.0 * omc * omc);
}

double solve_turning_angle(double target)
{
    // height_ratio is increasing on (0, 2 pi), ~ phi / 12 near 0 and -> inf at 2 pi
    double lo = 0.0;
    double hi = 2.0 * kPi;
    double phi = std::min(12.0 * target, kPi);
    if (phi <= 0.0 || !(phi < hi))
        phi = kPi;
    for (int it = 0; it < 200; ++it) {
        const double f = height_ratio(phi) - target;
        if (f > 0.0)
            hi = phi;
        else
            lo = phi;
        const double df = height_ratio_derivative(phi);
        double next = phi - f / df;
        if (!(next > lo && next < hi) || !std::isfinite(next))
            next = 0.5 * (lo + hi);
        if (std::abs(next - phi) <= 1e-15 * std::max(phi, 1e-300) || hi - lo <= 4e-16 * hi) {
            return next;
        }
        phi = next;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "cc_distance_from_origin: turning-angle solve did not converge (target ratio " << target
        << ", bracket [" << lo << ", " << hi << "])";
    throw NumericalError(msg.str());
}

} // namespace

double heisenberg_cc_distance(double x, double y, double t)
{
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(t))
        throw NumericalError("cc_distance_from_origin: non-finite coordinates");
    const double r = std::hypot(x, y);
    const double at = std::abs(t);
    if (at == 0.0)
        return r;
    if (r == 0.0)
        return 2.0 * std::sqrt(kPi * at);

    const double target = at / (r * r);
    if (!std::isfinite(target))
        return 2.0 * std::sqrt(kPi * at);
    const double phi = solve_turning_angle(target);
    if (phi <= kPi) {
        const double half = 0.5 * phi;
        return half < 1e-8 ? r * (1.0 + half * half / 6.0) : r * half / std::sin(half);
    }
    return phi * std::sqrt(2.0 * at / phi_minus_sin(phi));
}

double cc_distance_from_origin(const GroupSpec& g, const Point& p)
{
    if (!is_heisenberg(g))
        throw InputError("cc_distance_from_origin: only implemented for heisenberg1, got " + g.id);
    if (p.size() != 3)
        throw InputError("cc_distance_from_origin: expected a 3-vector");
    return heisenberg_cc_distance(p(0), p(1), p(2));
}

Gauge euclidean_gauge(const GroupSpec& g)
{
    if (!is_euclidean(g))
        throw InputError("gauge 'euclidean' is not homogeneous on " + g.id);
    Gauge gauge;
    gauge.id = "euclidean";
    gauge.group = g;
    gauge.eval = [](const Point& p) { return p.norm(); };
    gauge.hgrad = [](const Point&) { return 1.0; };
    gauge.unit_ball_extent = Point::Ones(g.n);
    return gauge;
}

Gauge box_gauge(const GroupSpec& g)
{
    Gauge gauge;
    gauge.id = "box";
    gauge.group = g;
    if (is_euclidean(g)) {
        gauge.eval = [](const Point& p) { return p.cwiseAbs().maxCoeff(); };
        gauge.hgrad = [](const Point&) { return 1.0; };
        gauge.unit_ball_extent = Point::Ones(g.n);
    } else if (is_heisenberg(g)) {
        gauge.eval = [](const Point& p) {
            return std::max({std::abs(p(0)), std::abs(p(1)), std::sqrt(std::abs(p(2)))});
        };
        gauge.hgrad = [](const Point& p) {
            const double st = std::sqrt(std::abs(p(2)));
            if (st > std::abs(p(0)) && st > std::abs(p(1)))
                return std::hypot(p(0), p(1)) / (4.0 * st);
            return 1.0;
        };
        gauge.unit_ball_extent = Point::Ones(3);
    } else {
        throw InputError("gauge 'box' is not defined on " + g.id);
    }
    return gauge;
}

Gauge koranyi_gauge(const GroupSpec& g)
{
    if (!is_heisenberg(g))
        throw InputError("gauge 'koranyi' requires heisenberg1, got " + g.id);
    Gauge gauge;
    gauge.id = "koranyi";
    gauge.group = g;
    gauge.eval = [](const Point& p) {
        const double rho2 = p(0) * p(0) + p(1) * p(1);
        return std::sqrt(std::sqrt(rho2 * rho2 + 16.0 * p(2) * p(2)));
    };
    // X_1 N = (rho^2 x - 4 y t)/N^3, X_2 N = (rho^2 y + 4 x t)/N^3, so |D_h N| = rho / N
    gauge.hgrad = [](const Point& p) {
        const double rho2 = p(0) * p(0) + p(1) * p(1);
        const double n = std::sqrt(std::sqrt(rho2 * rho2 + 16.0 * p(2) * p(2)));
        return std::sqrt(rho2) / n;
    };
    gauge.unit_ball_extent = make_point({1.0, 1.0, 0.25});
    return gauge;
}

Gauge carnot_gauge(const GroupSpec& g)
{
    Gauge gauge;
    gauge.id = "carnot";
    gauge.group = g;
    gauge.smoothness = GaugeSmoothness::carnot;
    gauge.hgrad = [](const Point&) { return 1.0; };
    if (is_euclidean(g)) {
        gauge.eval = [](const Point& p) { return p.norm(); };
        gauge.unit_ball_extent = Point::Ones(g.n);
    } else if (is_heisenberg(g)) {
        gauge.eval = [](const Point& p) { return heisenberg_cc_distance(p(0), p(1), p(2)); };
        // |t| on B_1 peaks on half-circle arcs: L^2 (phi - sin phi)/(2 phi^2) at phi = pi
        gauge.unit_ball_extent = make_point({1.0, 1.0, 1.0 / (2.0 * kPi)});
    } else {
        throw InputError("gauge 'carnot' is not implemented on " + g.id);
    }
    return gauge;
}

Gauge gauge_by_id(const std::string& id, const GroupSpec& g)
{
    if (id == "euclidean")
        return euclidean_gauge(g);
    if (id == "koranyi")
        return koranyi_gauge(g);
    if (id == "box")
        return box_gauge(g);
    if (id == "carnot")
        return carnot_gauge(g);
    throw InputError("unknown gauge id '" + id + "'");
}

std::vector<std::string> gauge_ids() { return {"euclidean", "koranyi", "box", "carnot"}; }

double gauge_eval(const Gauge& gauge, const Point& p)
{
    require_dim(gauge, p, "gauge_eval");
    return gauge.eval(p);
}

double gauge_hgrad_norm_fd(const Gauge& gauge, const Point& p, double step)
{
    require_dim(gauge, p, "gauge_hgrad_norm_fd");
    const double s = step * std::max(gauge.eval(p), 1e-300);
    const Frame frame = gauge.group.frame(p);
    double sum = 0.0;
    for (int i = 0; i < gauge.group.m; ++i) {
        const Point v = frame.col(i);
        const double d = (gauge.eval(Point(p + s * v)) - gauge.eval(Point(p - s * v))) / (2.0 * s);
        sum += d * d;
    }
    return std::sqrt(sum);
}

double gauge_hgrad_norm(const Gauge& gauge, const Point& p)
{
    require_dim(gauge, p, "gauge_hgrad_norm");
    if ((p.array() == 0.0).all())
        throw UndefinedPointError("gauge_hgrad_norm: the gauge is not differentiable at the origin");
    if (gauge.hgrad)
        return gauge.hgrad(p);
    return gauge_hgrad_norm_fd(gauge, p);
}

GaugeValidationOptions carnot_validation_options()
{
    GaugeValidationOptions o;
    o.homogeneity_tol = 1e-9;
    o.hgrad_homogeneity_tol = 1e-3;
    o.fd_consistency_tol = 1e-3;
    return o;
}

VerificationReport validate_gauge(const Gauge& gauge, int samples, std::uint64_t seed,
                                  GaugeValidationOptions options)
{
    if (samples < 1)
        throw InputError("validate_gauge: samples must be >= 1");
    const GroupSpec& g = gauge.group;
    Rng rng(seed);
    const Box cube{Point::Constant(g.n, -3.0), Point::Constant(g.n, 3.0)};
    const double radii[] = {0.5, 2.0, 3.0};
    const bool check_upper = !is_euclidean(g);
    const bool carnot = gauge.smoothness == GaugeSmoothness::carnot;

    double zero_violation = std::abs(gauge.eval(Point::Zero(g.n)));
    double positivity = 0.0, homogeneity = 0.0, hgrad_hom = 0.0, fd = 0.0, upper = 0.0;
    int fd_skipped = 0;

    for (int k = 0; k < samples; ++k) {
        const Point x = uniform_point(rng, cube);
        const double nx = gauge.eval(x);
        if (!(nx > 0.0))
            positivity = std::max(positivity, 1.0);
        for (double r : radii) {
            const double lhs = gauge.eval(dilate(g, r, x));
            homogeneity = std::max(homogeneity, std::abs(lhs - r * nx) / (1.0 + r * nx));
        }
        const double hx = gauge_hgrad_norm(gauge, x);
        for (double r : radii)
            hgrad_hom = std::max(hgrad_hom, std::abs(gauge_hgrad_norm(gauge, dilate(g, r, x)) - hx));
        if (check_upper)
            upper = std::max(upper, hx);

        if (carnot && g.n == 3 && std::hypot(x(0), x(1)) < 0.1 * nx) {
            ++fd_skipped;
            continue;
        }
        const double step = carnot ? 1e-5 : 1e-6;
        fd = std::max(fd, std::abs(gauge_hgrad_norm_fd(gauge, x, step) - hx));
    }

    const double worst = std::max({zero_violation / options.homogeneity_tol, positivity,
                                   homogeneity / options.homogeneity_tol,
                                   hgrad_hom / options.hgrad_homogeneity_tol,
                                   fd / options.fd_consistency_tol,
                                   check_upper ? upper / options.hgrad_upper_bound : 0.0});
    VerificationReport rep =
        VerificationReport::bound("validate_gauge:" + g.id + ":" + gauge.id, worst, 1.0);
    rep.resolution = {{"samples", samples},
                      {"zero", zero_violation},
                      {"positivity", positivity},
                      {"homogeneity", homogeneity},
                      {"hgrad_homogeneity", hgrad_hom},
                      {"fd_consistency", fd},
                      {"fd_skipped_near_t_axis", fd_skipped},
                      {"hgrad_max", upper}};
    return rep;
}

} // namespace carnot
