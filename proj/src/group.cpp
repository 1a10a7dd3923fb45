#include "carnot/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace carnot {

namespace {

void check_dim(const GroupSpec& g, const Point& p, const char* what)
{
    if (p.size() != g.n)
        throw InputError(std::string(what) + ": point has dimension " + std::to_string(p.size()) +
                         ", group " + g.id + " has n = " + std::to_string(g.n));
}

} // namespace

GroupSpec make_group(std::string id, int n, int m, int Q, std::vector<int> weights, GroupSpec::Law law,
                     GroupSpec::Inverse inverse, GroupSpec::FrameFn frame)
{
    if (n < 1 || n > kMaxDim)
        throw InputError("group " + id + ": n must be in [1, " + std::to_string(kMaxDim) + "]");
    if (m < 1 || m > n)
        throw InputError("group " + id + ": horizontal rank m must satisfy 1 <= m <= n");
    if (static_cast<int>(weights.size()) != n)
        throw InputError("group " + id + ": need one dilation weight per coordinate");
    for (int w : weights)
        if (w < 1)
            throw InputError("group " + id + ": dilation weights must be positive");
    if (std::accumulate(weights.begin(), weights.end(), 0) != Q)
        throw InputError("group " + id + ": dilation weights must sum to Q");
    if (Q < n)
        throw InputError("group " + id + ": homogeneous dimension Q must be >= n");
    if (!law || !inverse || !frame)
        throw InputError("group " + id + ": law, inverse and frame are required");

    GroupSpec g;
    g.id = std::move(id);
    g.n = n;
    g.m = m;
    g.Q = Q;
    g.dilation_weights = std::move(weights);
    g.law = std::move(law);
    g.inverse = std::move(inverse);
    g.frame = std::move(frame);
    return g;
}

GroupSpec euclidean_group(int n)
{
    return make_group(
        "euclidean" + std::to_string(n), n, n, n, std::vector<int>(static_cast<std::size_t>(n), 1),
        [](const Point& a, const Point& b) -> Point { return a + b; },
        [](const Point& a) -> Point { return -a; },
        [n](const Point&) -> Frame { return Frame::Identity(n, n); });
}

GroupSpec heisenberg_group()
{
    return make_group(
        "heisenberg1", 3, 2, 4, {1, 1, 2},
        [](const Point& a, const Point& b) { return heisenberg_product(a, b); },
        [](const Point& a) -> Point { return -a; },
        [](const Point& p) { return heisenberg_frame(p); });
}

GroupSpec group_by_id(const std::string& id)
{
    if (id == "euclidean1")
        return euclidean_group(1);
    if (id == "euclidean2")
        return euclidean_group(2);
    if (id == "euclidean3")
        return euclidean_group(3);
    if (id == "heisenberg1")
        return heisenberg_group();
    throw InputError("unknown group id '" + id + "'");
}

std::vector<std::string> group_ids()
{
    return {"euclidean1", "euclidean2", "euclidean3", "heisenberg1"};
}

Point group_multiply(const GroupSpec& g, const Point& a, const Point& b)
{
    check_dim(g, a, "group_multiply");
    check_dim(g, b, "group_multiply");
    return g.law(a, b);
}

Point group_inverse(const GroupSpec& g, const Point& a)
{
    check_dim(g, a, "group_inverse");
    return g.inverse(a);
}

Point dilate(const GroupSpec& g, double r, const Point& p)
{
    if (!(r > 0.0))
        throw InputError("dilate: r must be positive");
    check_dim(g, p, "dilate");
    Point out(g.n);
    for (int i = 0; i < g.n; ++i)
        out(i) = std::pow(r, g.dilation_weights[static_cast<std::size_t>(i)]) * p(i);
    return out;
}

Frame horizontal_frame_at(const GroupSpec& g, const Point& p)
{
    check_dim(g, p, "horizontal_frame_at");
    return g.frame(p);
}

VerificationReport validate_group(const GroupSpec& g, int samples, std::uint64_t seed, double tolerance)
{
    if (samples < 1)
        throw InputError("validate_group: samples must be >= 1");

    constexpr double fd_step = 1e-5;
    constexpr double left_invariance_tol = 1e-6;

    Rng rng(seed);
    Box cube{Point::Constant(g.n, -3.0), Point::Constant(g.n, 3.0)};
    const Point zero = Point::Zero(g.n);

    double assoc = 0, ident = 0, inv = 0, hom = 0, comp = 0, left = 0;
    auto upd = [](double& acc, const Point& d) { acc = std::max(acc, d.cwiseAbs().maxCoeff()); };

    for (int k = 0; k < samples; ++k) {
        const Point a = uniform_point(rng, cube);
        const Point b = uniform_point(rng, cube);
        const Point c = uniform_point(rng, cube);
        const double r = uniform(rng, 0.1, 3.0);
        const double s = uniform(rng, 0.1, 3.0);

        upd(assoc, g.law(g.law(a, b), c) - g.law(a, g.law(b, c)));
        upd(ident, g.law(a, zero) - a);
        upd(ident, g.law(zero, a) - a);
        upd(inv, g.law(a, g.inverse(a)));
        upd(inv, g.law(g.inverse(a), a));
        upd(hom, dilate(g, r, g.law(a, b)) - g.law(dilate(g, r, a), dilate(g, r, b)));
        upd(comp, dilate(g, r, dilate(g, s, a)) - dilate(g, r * s, a));

        // X_i(a p) against d(L_a)_p X_i(p)
        const Frame at_p = g.frame(b);
        const Frame at_ap = g.frame(g.law(a, b));
        for (int i = 0; i < g.m; ++i) {
            const Point v = at_p.col(i);
            const Point pushed =
                (g.law(a, Point(b + fd_step * v)) - g.law(a, Point(b - fd_step * v))) / (2.0 * fd_step);
            upd(left, Point(at_ap.col(i)) - pushed);
        }
    }

    const double algebraic = std::max({assoc, ident, inv, hom, comp});
    VerificationReport rep = VerificationReport::bound("validate_group:" + g.id, algebraic, tolerance);
    rep.resolution = {{"samples", samples},
                      {"associativity", assoc},
                      {"identity", ident},
                      {"inverse", inv},
                      {"dilation_homomorphism", hom},
                      {"dilation_composition", comp},
                      {"left_invariance", left},
                      {"left_invariance_tolerance", left_invariance_tol}};
    if (!(left <= left_invariance_tol)) {
        rep.pass = false;
        rep.warnings.push_back("frame is not left invariant: max deviation " + std::to_string(left));
    }
    return rep;
}

} // namespace carnot
