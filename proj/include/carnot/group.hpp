#ifndef CARNOT_GROUP_HPP
#define CARNOT_GROUP_HPP

#include "carnot/core.hpp"
#include "carnot/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace carnot {

/// A Carnot group realized on R^n in exponential coordinates.
///
/// The group law, inverse and horizontal frame are closed-form callables. The frame
/// returns an n x m matrix whose i-th column holds the coordinates of X_i(p).
/// Instances are immutable once built; copying is cheap.
struct GroupSpec {
    using Law = std::function<Point(const Point&, const Point&)>;
    using Inverse = std::function<Point(const Point&)>;
    using FrameFn = std::function<Frame(const Point&)>;

    std::string id;
    int n = 0;
    int m = 0;
    int Q = 0;
    std::vector<int> dilation_weights;
    Law law;
    Inverse inverse;
    FrameFn frame;
};

/// Builds a group and checks the structural constraints (1 <= m <= n, weights sum to Q,
/// Q >= n). Throws InputError otherwise.
GroupSpec make_group(std::string id, int n, int m, int Q, std::vector<int> weights, GroupSpec::Law law,
                     GroupSpec::Inverse inverse, GroupSpec::FrameFn frame);

/// R^n with vector addition and the standard frame, 1 <= n <= kMaxDim.
GroupSpec euclidean_group(int n);

/// First Heisenberg group H^1 with (x,y,t)(x',y',t') = (x+x', y+y', t+t' + (xy' - yx')/2).
GroupSpec heisenberg_group();

/// "euclidean1", "euclidean2", "euclidean3", "heisenberg1".
GroupSpec group_by_id(const std::string& id);
std::vector<std::string> group_ids();

// Closed forms, usable on any Eigen vector expression.

template <typename DerivedA, typename DerivedB>
PointT<typename DerivedA::Scalar> heisenberg_product(const Eigen::MatrixBase<DerivedA>& a,
                                                     const Eigen::MatrixBase<DerivedB>& b)
{
    using Scalar = typename DerivedA::Scalar;
    PointT<Scalar> out(3);
    out(0) = a(0) + b(0);
    out(1) = a(1) + b(1);
    out(2) = a(2) + b(2) + Scalar(0.5) * (a(0) * b(1) - a(1) * b(0));
    return out;
}

/// X_1 = d/dx - (y/2) d/dt, X_2 = d/dy + (x/2) d/dt.
template <typename Derived>
FrameT<typename Derived::Scalar> heisenberg_frame(const Eigen::MatrixBase<Derived>& p)
{
    using Scalar = typename Derived::Scalar;
    FrameT<Scalar> f(3, 2);
    f << Scalar(1), Scalar(0),
         Scalar(0), Scalar(1),
         -p(1) / Scalar(2), p(0) / Scalar(2);
    return f;
}

Point group_multiply(const GroupSpec& g, const Point& a, const Point& b);
Point group_inverse(const GroupSpec& g, const Point& a);

/// delta_r: coordinate i scaled by r^{w_i}. Throws InputError for r <= 0.
Point dilate(const GroupSpec& g, double r, const Point& p);

/// Columns X_1(p) ... X_m(p).
Frame horizontal_frame_at(const GroupSpec& g, const Point& p);

/// Sampled structure checks over `samples` random tuples in [-3,3]^n: associativity,
/// identity, inverse, dilation homomorphism, delta_r delta_s = delta_rs, and left
/// invariance of the frame (d(L_a) by central differences of the law, step 1e-5,
/// tolerance 1e-6). Violations are reported, never thrown.
VerificationReport validate_group(const GroupSpec& g, int samples, std::uint64_t seed = 1,
                                  double tolerance = 1e-10);

} // namespace carnot

#endif // CARNOT_GROUP_HPP
