#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "carnot/gauge.hpp"
#include "oracles.hpp"

using namespace carnot;

namespace {

Point random_point(Rng& rng, int n, double half = 3.0)
{
    Point p(n);
    for (int i = 0; i < n; ++i)
        p(i) = uniform(rng, -half, half);
    return p;
}

// |x| + |x|^2 on the plane: positive and continuous, but not 1-homogeneous.
Gauge fake_gauge()
{
    Gauge g = euclidean_gauge(euclidean_group(2));
    g.id = "fake";
    g.eval = [](const Point& p) { return p.norm() + p.squaredNorm(); };
    g.hgrad = nullptr;
    return g;
}

} // namespace

TEST_CASE("gauge values")
{
    const GroupSpec r2 = euclidean_group(2);
    const GroupSpec h = heisenberg_group();
    CHECK(gauge_eval(euclidean_gauge(r2), make_point({3, 4})) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(gauge_eval(koranyi_gauge(h), make_point({0, 0, 1})) == doctest::Approx(2.0).epsilon(1e-15));
    for (const std::string& id : gauge_ids()) {
        for (const std::string& gid : group_ids()) {
            const GroupSpec g = group_by_id(gid);
            Gauge gauge;
            try {
                gauge = gauge_by_id(id, g);
            } catch (const InputError&) {
                continue;
            }
            CHECK(gauge_eval(gauge, Point::Zero(g.n)) == 0.0);
        }
    }
    CHECK_THROWS_AS(gauge_eval(koranyi_gauge(h), make_point({1, 2})), InputError);
}

TEST_CASE("gauge ids reject non-homogeneous combinations")
{
    const GroupSpec h = heisenberg_group();
    CHECK_THROWS_AS(gauge_by_id("euclidean", h), InputError);
    CHECK_THROWS_AS(gauge_by_id("koranyi", euclidean_group(2)), InputError);
    CHECK_THROWS_AS(gauge_by_id("taxicab", h), InputError);
}

TEST_CASE("horizontal gradient of the gauge")
{
    const GroupSpec r3 = euclidean_group(3);
    const GroupSpec h = heisenberg_group();
    Rng rng(1);
    for (int k = 0; k < 50; ++k) {
        const Point p = random_point(rng, 3);
        CHECK(gauge_hgrad_norm(euclidean_gauge(r3), p) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(gauge_hgrad_norm(carnot_gauge(h), p) == 1.0);
    }

    const Gauge k = koranyi_gauge(h);
    CHECK(gauge_hgrad_norm(k, make_point({1, 0, 0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gauge_hgrad_norm(k, make_point({0, 0, 1})) == doctest::Approx(0.0).scale(1).epsilon(1e-12));

    // closed form |z| / N and the library's own difference quotient
    for (int j = 0; j < 500; ++j) {
        const Point p = random_point(rng, 3);
        const double ref = oracle::koranyi_hgrad(p(0), p(1), p(2));
        CHECK(gauge_hgrad_norm(k, p) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(std::abs(gauge_hgrad_norm_fd(k, p, 1e-6) - ref) <= 1e-6);
    }

    for (const std::string& id : gauge_ids())
        if (id != "euclidean")
            CHECK_THROWS_AS(gauge_hgrad_norm(gauge_by_id(id, h), Point::Zero(3)), UndefinedPointError);
}

TEST_CASE("degree-zero homogeneity of the gauge gradient")
{
    const GroupSpec h = heisenberg_group();
    Rng rng(2);
    for (const char* id : {"koranyi", "box"}) {
        const Gauge gauge = gauge_by_id(id, h);
        for (int k = 0; k < 200; ++k) {
            const Point p = random_point(rng, 3);
            const double base = gauge_hgrad_norm(gauge, p);
            for (double r : {0.5, 2.0, 3.0})
                CHECK(std::abs(gauge_hgrad_norm(gauge, dilate(h, r, p)) - base) <= 1e-8);
        }
    }
}

TEST_CASE("homogeneity, positivity and ball nesting")
{
    Rng rng(3);
    for (const std::string& gid : group_ids()) {
        const GroupSpec g = group_by_id(gid);
        for (const std::string& id : gauge_ids()) {
            Gauge gauge;
            try {
                gauge = gauge_by_id(id, g);
            } catch (const InputError&) {
                continue;
            }
            const int samples = id == "carnot" ? 60 : 400;
            for (int k = 0; k < samples; ++k) {
                const Point x = random_point(rng, g.n);
                const double nx = gauge_eval(gauge, x);
                CHECK(nx > 0.0);
                for (double r : {0.5, 2.0, 3.0})
                    CHECK(std::abs(gauge_eval(gauge, dilate(g, r, x)) - r * nx) <= 1e-9 * (1.0 + r * nx));
                // x in B_r and r < s imply x in B_s
                const double r = uniform(rng, 0.1, 5.0), s = r + uniform(rng, 0.0, 2.0);
                if (nx < r)
                    CHECK(nx < s);
            }
        }
    }
}

TEST_CASE("gauge gradients on H1 stay below one")
{
    const GroupSpec h = heisenberg_group();
    Rng rng(4);
    for (const std::string& id : gauge_ids()) {
        if (id == "euclidean")
            continue;
        const Gauge gauge = gauge_by_id(id, h);
        for (int k = 0; k < 2000; ++k) {
            const Point p = random_point(rng, 3);
            CHECK(gauge_hgrad_norm(gauge, p) <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("Carnot-Caratheodory distance: closed cases and scaling")
{
    const GroupSpec h = heisenberg_group();
    for (double a : {-2.0, -0.3, 0.7, 5.0})
        CHECK(cc_distance_from_origin(h, make_point({a, 0, 0})) == doctest::Approx(std::abs(a)).epsilon(1e-10));
    CHECK(cc_distance_from_origin(h, Point::Zero(3)) == 0.0);

    for (double t : {0.1, 1.0, -2.5}) {
        const double d = cc_distance_from_origin(h, make_point({0, 0, t}));
        for (double r : {2.0, 4.0})
            CHECK(cc_distance_from_origin(h, dilate(h, r, make_point({0, 0, t}))) ==
                  doctest::Approx(r * d).epsilon(1e-8));
        CHECK(d == doctest::Approx(2.0 * std::sqrt(oracle::pi * std::abs(t))).epsilon(1e-8));
    }
    CHECK_THROWS_AS(cc_distance_from_origin(euclidean_group(2), make_point({1, 1})), InputError);
}

TEST_CASE("Carnot-Caratheodory distance reproduces integrated arcs")
{
    // A circular arc of turning angle below 2 pi is length minimizing.
    const GroupSpec h = heisenberg_group();
    for (double L : {0.5, 1.0, 2.0})
        for (double phi : {0.3, 1.5, 3.0, 5.5, 6.2}) {
            const auto end = oracle::h1_arc_endpoint(L, phi / L);
            const double d = cc_distance_from_origin(h, make_point({end[0], end[1], end[2]}));
            CHECK_MESSAGE(d == doctest::Approx(L).epsilon(1e-8), "L=" << L << " phi=" << phi);
        }
}

TEST_CASE("Carnot-Caratheodory distance against shortest lattice polylines")
{
    const GroupSpec h = heisenberg_group();
    const oracle::PolylineDistance lattice(0.04, 20, 200);
    const double targets[][3] = {
        {0, 0, 1.0 / (4.0 * oracle::pi)}, {0.3, 0.2, 0.05}, {0.5, 0, 0.02}, {-0.2, 0.35, -0.06}, {0.4, 0.4, 0}};
    for (const auto& p : targets) {
        const auto [poly, node] = lattice.at(p[0], p[1], p[2]);
        const double d = cc_distance_from_origin(h, make_point({node[0], node[1], node[2]}));
        // every lattice path is horizontal, so the lattice can only overestimate
        CHECK(d <= poly * (1.0 + 1e-9));
        CHECK(poly <= 1.05 * d);
    }
}

TEST_CASE("validate_gauge")
{
    const GroupSpec r2 = euclidean_group(2);
    const GroupSpec h = heisenberg_group();

    const VerificationReport e = validate_gauge(euclidean_gauge(r2), 1000);
    CHECK(e.pass);
    CHECK(e.resolution.at("homogeneity") <= 1e-10);
    CHECK(e.resolution.at("hgrad_homogeneity") <= 1e-10);

    const VerificationReport k = validate_gauge(koranyi_gauge(h), 1000);
    CHECK(k.pass);
    CHECK(k.resolution.at("homogeneity") <= 1e-10);
    CHECK(k.resolution.at("fd_consistency") <= 1e-4);

    const VerificationReport c = validate_gauge(carnot_gauge(h), 200, 2, carnot_validation_options());
    CHECK(c.pass);
    CHECK(c.resolution.at("fd_consistency") <= 1e-3);

    const VerificationReport b = validate_gauge(box_gauge(h), 1000);
    CHECK(b.pass);

    const VerificationReport fake = validate_gauge(fake_gauge(), 1000);
    CHECK_FALSE(fake.pass);
    CHECK(fake.resolution.at("homogeneity") > 1e-9);

    CHECK_THROWS_AS(validate_gauge(koranyi_gauge(h), 0), InputError);
}
