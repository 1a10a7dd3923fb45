#ifndef CARNOT_CORE_HPP
#define CARNOT_CORE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace carnot {

inline constexpr int kMaxDim = 8;

/// Point of a group in exponential coordinates. Stack-allocated, n <= kMaxDim.
template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Point = PointT<double>;

/// Stack of frame coefficient vectors, one column per horizontal field X_i.
template <typename Scalar>
using FrameT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Frame = FrameT<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed argument: dimension mismatch, out-of-range parameter, bad id.
class InputError : public Error {
public:
    using Error::Error;
};

/// Evaluation at a point where the quantity is not defined (e.g. gauge gradient at 0).
class UndefinedPointError : public Error {
public:
    using Error::Error;
};

/// A root find or estimator failed to converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The rearrangement structure assumptions are violated (e.g. V not strictly increasing).
class StructureError : public Error {
public:
    using Error::Error;
};

/// File missing, unreadable or malformed.
class IoError : public Error {
public:
    using Error::Error;
};

/// Output box cannot hold the rearranged support.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double required_radius)
        : Error(what), required_radius_(required_radius) {}
    double required_radius() const { return required_radius_; }

private:
    double required_radius_;
};

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_n, hi_n].
struct Box {
    Point lo;
    Point hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const { return (hi - lo).prod(); }
    bool contains(const Point& p) const
    {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
};

inline Point make_point(std::initializer_list<double> xs)
{
    Point p(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs)
        p(i++) = x;
    return p;
}

/// All randomness goes through this engine so a fixed seed reproduces runs bit for bit.
using Rng = std::mt19937_64;

/// Uniform double in [lo, hi). Uses the top 53 bits so results do not depend on the
/// standard library's distribution implementation.
inline double uniform(Rng& rng, double lo, double hi)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

inline Point uniform_point(Rng& rng, const Box& box)
{
    Point p(box.dim());
    for (int i = 0; i < box.dim(); ++i)
        p(i) = uniform(rng, box.lo(i), box.hi(i));
    return p;
}

} // namespace carnot

#endif // CARNOT_CORE_HPP
