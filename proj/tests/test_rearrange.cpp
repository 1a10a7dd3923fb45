#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "carnot/rearrange.hpp"
#include "oracles.hpp"

using namespace carnot;

namespace {

Box interval(double lo, double hi) { return Box{make_point({lo}), make_point({hi})}; }

double tent1(const Point& x) { return std::max(0.0, 1.0 - std::abs(x(0))); }

const GroupSpec& r1() { static const GroupSpec g = euclidean_group(1); return g; }
const GroupSpec& r2() { static const GroupSpec g = euclidean_group(2); return g; }
const GroupSpec& h1() { static const GroupSpec g = heisenberg_group(); return g; }

// V(r) = 2r on the line, known exactly.
VolumeFunction line_volume() { return homogeneous_volume(euclidean_gauge(r1()), 2.0); }

GridField line_field(const ScalarFn& f, double lo, double hi, int nodes)
{
    return sample_field(r1(), Grid(interval(lo, hi), {nodes}), f);
}

GridField builder_field(const std::string& name, const GroupSpec& g, int nodes)
{
    const AnalyticField f = analytic_field(name, g);
    return build_field(f, g, grid_around(f.support, nodes));
}

double max_spacing(const GridField& u) { return u.grid().spacing().maxCoeff(); }

} // namespace

TEST_CASE("volume functions")
{
    const VolumeFunction disk = volume_function(euclidean_gauge(r2()), VolumeOptions{VolumeOptions::Method::monte_carlo,
                                                                                      2'000'000, 160, 3});
    CHECK(std::abs(disk.c1 - oracle::pi) <= 4.0 * disk.c1_stderr);
    CHECK(disk.c1_stderr > 0.0);
    CHECK(disk(2.0) == doctest::Approx(4.0 * disk.c1).epsilon(1e-14));
    CHECK(disk(0.0) == 0.0);

    const Gauge k = koranyi_gauge(h1());
    const VolumeFunction mc = volume_function(k, VolumeOptions{VolumeOptions::Method::monte_carlo, 4'000'000, 160, 5});
    const VolumeFunction quad = volume_function(k, VolumeOptions{VolumeOptions::Method::quadrature, 0, 200, 0});
    CHECK(mc.c1 == doctest::Approx(quad.c1).epsilon(0.005));
    CHECK(mc.c1 == doctest::Approx(oracle::koranyi_volume).epsilon(0.005));
    CHECK(quad.c1 == doctest::Approx(oracle::koranyi_volume).epsilon(0.005));
    CHECK(mc.Q_eff == 4.0);

    // density 1 on the line, tabulated over grid nodes
    const Grid grid(interval(-2, 2), {400});
    const VolumeFunction tab = tabulated_volume(euclidean_gauge(r1()), grid, Eigen::ArrayXd::Ones(grid.size()));
    for (double r : {0.25, 0.5, 1.0, 1.5})
        CHECK(std::abs(tab(r) - 2.0 * r) <= 2.0 * grid.spacing()(0));
    for (Eigen::Index j = 1; j < tab.table_v.size(); ++j)
        CHECK(tab.table_v(j) > tab.table_v(j - 1));

    // a density vanishing on a shell makes V flat there
    Eigen::ArrayXd shell(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double x = std::abs(grid.node(i)(0));
        shell(i) = x > 0.3 && x < 0.5 ? 0.0 : 1.0;
    }
    CHECK_THROWS_AS(tabulated_volume(euclidean_gauge(r1()), grid, shell), StructureError);
}

TEST_CASE("volume inverse")
{
    const VolumeFunction disk = homogeneous_volume(euclidean_gauge(r2()), oracle::pi);
    CHECK(volume_inverse(disk, 0.0) == 0.0);
    CHECK(volume_inverse(disk, oracle::pi) == doctest::Approx(1.0).epsilon(1e-15));
    const VolumeFunction kv = homogeneous_volume(koranyi_gauge(h1()), oracle::koranyi_volume);
    CHECK(volume_inverse(kv, 16.0 * oracle::koranyi_volume) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(volume_inverse(disk, -1.0), InputError);

    const Grid grid(interval(-2, 2), {400});
    const VolumeFunction tab = tabulated_volume(euclidean_gauge(r1()), grid, Eigen::ArrayXd::Ones(grid.size()));
    for (double v : {0.01, 0.5, 1.7, 3.0}) {
        const double r = volume_inverse(tab, v);
        CHECK(std::abs(tab(r) - v) <= 1e-10 * v);
    }
    CHECK_THROWS_AS(volume_inverse(tab, 10.0), InputError);
}

TEST_CASE("pseudo-inverse of the distribution")
{
    const GridField tent = line_field(tent1, -1.37, 1.61, 600);
    const int K = 512;
    const DistributionFunction d = distribution_function(tent, K);
    const VolumeFunction V = line_volume();
    const double h = max_spacing(tent);

    CHECK(nu_tilde(d, V, 5.0) == 0.0);
    CHECK(nu_tilde(d, V, 1.0 + 2 * h) == 0.0);
    for (double r : {0.05, 0.3, 0.5, 0.9})
        CHECK(std::abs(nu_tilde(d, V, r) - (1.0 - r)) <= h + 2.0 / K);

    // r = 0: the essential supremum
    CHECK(nu_tilde(d, V, 0.0) == tent.max_value());
    CHECK_THROWS_AS(nu_tilde(d, V, -0.5), InputError);
}

TEST_CASE("rearranging a radial nonincreasing field returns it")
{
    const GridField tent = line_field(tent1, -1.5, 1.5, 601);
    const int K = 512;
    RearrangeOptions opts;
    opts.levels = K;
    const Rearrangement r = rearrange_field(tent, euclidean_gauge(r1()), line_volume(), opts);
    const double h = max_spacing(tent);
    const Grid& g = r.field.grid();
    for (Eigen::Index i = 0; i < g.size(); ++i)
        CHECK(std::abs(r.field.values()(i) - tent1(g.node(i))) <= 2.0 * (h + 1.0 / K));
}

TEST_CASE("two plateaus rearrange to nested intervals")
{
    // heights 2 and 1 with widths 1 and 1.5
    const GridField u = builder_field("two-plateaus", r1(), 801);
    const Rearrangement r = rearrange_field(u, euclidean_gauge(r1()), line_volume());
    const double h = max_spacing(u);
    const Grid& g = r.field.grid();
    int checked = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double x = std::abs(g.node(i)(0));
        const double v = r.field.values()(i);
        if (x < 0.5 - 2 * h) {
            CHECK(v == doctest::Approx(2.0).epsilon(0.01));
            ++checked;
        } else if (x > 0.5 + 2 * h && x < 1.25 - 2 * h) {
            CHECK(v == doctest::Approx(1.0).epsilon(0.01));
            ++checked;
        } else if (x > 1.25 + 2 * h) {
            CHECK(v == 0.0);
            ++checked;
        }
    }
    CHECK(checked > 9 * g.size() / 10);
    CHECK(r.profile.support_radius == doctest::Approx(1.25).epsilon(2 * h));

    // a box that cannot hold the support
    RearrangeOptions small;
    small.out_box = interval(-1.0, 1.0);
    try {
        rearrange_field(u, euclidean_gauge(r1()), line_volume(), small);
        FAIL("expected a truncation error");
    } catch (const TruncationError& e) {
        CHECK(e.required_radius() == doctest::Approx(1.25).epsilon(2 * h));
    }
}

TEST_CASE("the zero field rearranges to zero")
{
    const GridField zero = builder_field("zero", r2(), 40);
    const Rearrangement r = rearrange_field(zero, euclidean_gauge(r2()), homogeneous_volume(euclidean_gauge(r2()), oracle::pi));
    CHECK(r.field.max_value() == 0.0);
    CHECK(r.profile.empty());
    CHECK(r.derivative.empty());
}

TEST_CASE("profile derivative")
{
    // tent on the line: slope -1, Psi = 1
    const GridField tent = line_field(tent1, -1.37, 1.61, 1200);
    const Rearrangement r = rearrange_field(tent, euclidean_gauge(r1()), line_volume());
    for (double v : {0.1, 0.3, 0.5, 0.7, 0.9})
        CHECK(r.derivative.psi_at(v) == doctest::Approx(1.0).epsilon(0.02));
    for (double x : {0.1, 0.4, 0.8})
        CHECK(r.derivative.slope_at(x) == doctest::Approx(-1.0).epsilon(0.02));
    CHECK((r.derivative.slope <= 0.0).all());

    // (1 - r)^2: Psi(v) = 2 sqrt(v) by the chain rule
    RearrangementProfile sq;
    const int n = 2000;
    sq.radii.resize(n + 1);
    sq.profile.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double s = static_cast<double>(j) / n;
        sq.radii(j) = s;
        sq.profile(j) = (1 - s) * (1 - s);
    }
    sq.support_radius = 1.0;
    const ProfileDerivative d = profile_derivative(sq);
    for (double v : {0.04, 0.25, 0.5, 0.81})
        CHECK(d.psi_at(v) == doctest::Approx(2.0 * std::sqrt(v)).epsilon(1e-3));

    // flat then decreasing: Psi and the slope vanish on the flat part
    RearrangementProfile flat;
    flat.radii.resize(4);
    flat.profile.resize(4);
    flat.radii << 0.0, 0.5, 0.5, 1.0;
    flat.profile << 2.0, 2.0, 1.0, 0.0;
    flat.support_radius = 1.0;
    const ProfileDerivative fd = profile_derivative(flat);
    CHECK(fd.slope_at(0.25) == 0.0);
    CHECK(fd.jumps == 1);
    CHECK(fd.psi_at(0.5) == doctest::Approx(2.0));
}

TEST_CASE("profiles are nonincreasing and start at the maximum")
{
    for (const char* name : {"tent", "gaussian", "two-bump", "pyramid", "plateau"}) {
        const GridField u = builder_field(name, r2(), 128);
        const Rearrangement r = rearrange_field(u, euclidean_gauge(r2()), homogeneous_volume(euclidean_gauge(r2()), oracle::pi));
        const auto& p = r.profile;
        REQUIRE_FALSE(p.empty());
        for (Eigen::Index j = 1; j < p.radii.size(); ++j) {
            CHECK(p.radii(j) >= p.radii(j - 1));
            CHECK(p.profile(j) <= p.profile(j - 1));
        }
        CHECK(p.profile(0) == doctest::Approx(u.max_value()).epsilon(1e-12));
        CHECK(p.profile(p.profile.size() - 1) == 0.0);
        // zero beyond the support radius
        CHECK(nu_tilde(r.distribution, r.volume, p.support_radius * 1.0001) == 0.0);
    }
}

TEST_CASE("superlevel sets of the rearrangement are gauge balls up to a one-cell shell")
{
    struct Case {
        GroupSpec g;
        Gauge gauge;
        const char* field;
        int nodes;
    };
    const Case cases[] = {{r2(), euclidean_gauge(r2()), "two-bump", 128},
                          {h1(), koranyi_gauge(h1()), "pyramid", 40}};
    for (const Case& c : cases) {
        const GridField u = builder_field(c.field, c.g, c.nodes);
        const VolumeFunction V = volume_function(c.gauge, VolumeOptions{VolumeOptions::Method::monte_carlo, 1'000'000, 0, 1});
        const Rearrangement r = rearrange_field(u, c.gauge, V);
        const Grid& grid = r.field.grid();
        Eigen::ArrayXd radius(grid.size());
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            radius(i) = c.gauge.eval(grid.node(i));
        for (int k : {40, 128, 256, 400}) {
            const double t = r.distribution.thresholds(k);
            const double R = volume_inverse(V, r.distribution(t));
            for (Eigen::Index i = 0; i < grid.size(); ++i) {
                const bool in_star = r.field.values()(i) > t;
                const bool in_ball = radius(i) < R;
                if (in_star == in_ball)
                    continue;
                // a mismatched node must have a neighbour on the other side of the sphere
                bool shell = false;
                for (int a = 0; a < grid.dim() && !shell; ++a)
                    for (int s : {-1, 1}) {
                        const int idx = grid.index_along(i, a) + s;
                        if (idx < 0 || idx >= grid.dims()[static_cast<std::size_t>(a)])
                            continue;
                        const Eigen::Index j = i + s * grid.stride(a);
                        if ((radius(j) < R) != in_ball)
                            shell = true;
                    }
                CHECK_MESSAGE(shell, c.field << " t=" << t << " node " << i);
            }
        }
    }
}

TEST_CASE("per-threshold equimeasurability with a constant calibrated on the tent")
{
    // C from the tent, where both sides are known in closed form
    auto worst = [](const GridField& u, const Gauge& gauge, const VolumeFunction& V, int K) {
        RearrangeOptions o;
        o.levels = K;
        const Rearrangement r = rearrange_field(u, gauge, V, o);
        const DistributionFunction ds = distribution_function(r.field, K);
        double w = 0.0;
        for (int k = 0; k < K; ++k) {
            const double t = r.distribution.thresholds(k);
            w = std::max(w, std::abs(superlevel_measure(r.field, t) - superlevel_measure(u, t)));
        }
        (void)ds;
        return w / (max_spacing(u) + u.max_value() / K);
    };
    const Gauge e1 = euclidean_gauge(r1());
    const double C = worst(line_field(tent1, -1.37, 1.61, 600), e1, line_volume(), 512);
    CHECK(C > 0.0);
    CHECK(C <= 4.0);
    for (const char* name : {"gaussian", "two-bump", "pyramid", "plateau", "two-plateaus"})
        CHECK_MESSAGE(worst(builder_field(name, r1(), 600), e1, line_volume(), 512) <= 1.5 * C + 1e-12, name);
}

TEST_CASE("rearranging twice changes nothing beyond grid tolerance")
{
    for (const char* name : {"two-bump", "pyramid", "gaussian"}) {
        const GridField u = builder_field(name, r2(), 128);
        const Gauge e = euclidean_gauge(r2());
        const VolumeFunction V = homogeneous_volume(e, oracle::pi);
        const int K = 512;
        const Rearrangement once = rearrange_field(u, e, V);
        const Rearrangement twice = rearrange_field(once.field, e, V);
        const double tol = 2.0 * (max_spacing(u) + u.max_value() / K) + 0.01 * u.max_value();
        Eigen::ArrayXd radii = Eigen::ArrayXd::LinSpaced(400, 0.0, 1.2 * once.profile.support_radius);
        const Eigen::ArrayXd a = sample_profile(once.distribution, V, radii);
        const Eigen::ArrayXd b = sample_profile(twice.distribution, V, radii);
        CHECK_MESSAGE((a - b).abs().maxCoeff() <= tol, name);
    }
}

TEST_CASE("profile jumps shrink under refinement of continuous fields")
{
    // vertical parts of the profile (thresholds sharing one radius), in units of max u
    auto max_jump = [](const std::string& name, int nodes, int K) {
        const GridField u = builder_field(name, r2(), nodes);
        const Gauge e = euclidean_gauge(r2());
        RearrangeOptions o;
        o.levels = K;
        const RearrangementProfile p = rearrange_field(u, e, homogeneous_volume(e, oracle::pi), o).profile;
        double w = 0.0;
        for (Eigen::Index j = 0; j + 1 < p.radii.size();) {
            Eigen::Index k = j;
            while (k + 1 < p.radii.size() && p.radii(k + 1) == p.radii(j))
                ++k;
            w = std::max(w, p.profile(j) - p.profile(k));
            j = k + 1;
        }
        return w / u.max_value();
    };
    for (const std::string name : {"tent", "gaussian"}) {
        double previous = max_jump(name, 64, 128);
        CHECK(previous > 0.0);
        for (int s = 1; s <= 2; ++s) {
            const double next = max_jump(name, 64 << s, 128 << s);
            CHECK_MESSAGE(next <= 0.5 * previous, name << " refinement " << s << ": " << previous << " -> " << next);
            previous = next;
        }
    }
}

TEST_CASE("distributions of continuous fields decrease strictly below the maximum")
{
    for (const char* name : {"tent", "gaussian", "two-bump", "pyramid"}) {
        const GridField u = builder_field(name, r2(), 256);
        const DistributionFunction d = distribution_function(u, 512);
        int ties = 0, below = 0;
        for (int k = 1; k < d.levels(); ++k) {
            if (d.thresholds(k) > 0.9 * d.max_value())
                break;
            ++below;
            if (d.measures(k) == d.measures(k - 1))
                ++ties;
        }
        CHECK_MESSAGE(ties <= below / 50, name << " ties " << ties << " of " << below);
    }
}

TEST_CASE("weighted rearrangement")
{
    // constant density 2 on the line: u* is the tent again, masses doubled
    const Grid grid(interval(-2.0, 2.0), {800});
    const GridField u = sample_field(r1(), grid, tent1, [](const Point&) { return 2.0; });
    const Rearrangement r = rearrange_weighted(u, euclidean_gauge(r1()));
    const double h = grid.spacing()(0);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        CHECK(std::abs(r.field.values()(i) - tent1(grid.node(i))) <= 2.0 * (h + 1.0 / 512));
    CHECK(r.volume.kind == VolumeFunction::Kind::tabulated);
    CHECK(r.volume(0.5) == doctest::Approx(2.0).epsilon(0.01));

    CHECK_THROWS_AS(rearrange_weighted(line_field(tent1, -1.5, 1.5, 100), euclidean_gauge(r1())), InputError);
    CHECK_THROWS_AS(rearrange_field(u, euclidean_gauge(r1()), line_volume()), InputError);
    CHECK_THROWS_AS(rearrange_field(line_field(tent1, -1.5, 1.5, 100), koranyi_gauge(h1()), line_volume()),
                    InputError);
}

TEST_CASE("gauge cones")
{
    const Gauge k = koranyi_gauge(h1());
    const AnalyticField cone = gauge_cone(k, 2.0, 0.5);
    CHECK(cone.fn(Point::Zero(3)) == 2.0);
    CHECK(cone.fn(make_point({0.25, 0, 0})) == doctest::Approx(1.0));
    CHECK(cone.fn(make_point({0.0, 0.0, 0.0625})) == 0.0);
    CHECK(cone.support.hi(2) == doctest::Approx(0.0625).epsilon(1e-9));
    CHECK_THROWS_AS(gauge_cone(k, 1.0, 0.0), InputError);
}
