#ifndef CARNOT_GRID_FIELD_HPP
#define CARNOT_GRID_FIELD_HPP

#include "carnot/group.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

using ScalarFn = std::function<double(const Point&)>;

/// Uniform cell-centred grid: along axis k the nodes sit at lo_k + (i + 1/2) h_k,
/// i = 0 .. dims_k - 1, with h_k = (hi_k - lo_k) / dims_k. Flat indices are row-major
/// (the last axis varies fastest).
class Grid {
public:
    Grid() = default;
    Grid(Box box, std::vector<int> dims);

    /// Grid with the given spacing covering `box`; the box is grown symmetrically so that
    /// each side is an integer number of cells.
    static Grid with_spacing(const Box& box, const Point& spacing);

    int dim() const { return static_cast<int>(dims_.size()); }
    Eigen::Index size() const { return size_; }
    const Box& box() const { return box_; }
    const std::vector<int>& dims() const { return dims_; }
    const Point& spacing() const { return spacing_; }
    double cell_volume() const { return cell_volume_; }
    Eigen::Index stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    int index_along(Eigen::Index flat, int axis) const
    {
        return static_cast<int>((flat / strides_[static_cast<std::size_t>(axis)]) %
                                dims_[static_cast<std::size_t>(axis)]);
    }
    Point node(Eigen::Index flat) const;
    bool on_boundary(Eigen::Index flat) const;

    bool same_nodes(const Grid& other, double rel_tol = 1e-12) const;

private:
    Box box_;
    std::vector<int> dims_;
    std::vector<Eigen::Index> strides_;
    Point spacing_;
    Eigen::Index size_ = 0;
    double cell_volume_ = 0.0;
};

/// Nonnegative field sampled on a grid, vanishing on the outermost node layer, with an
/// optional node density rho (measure mu = rho L^n; absent means rho = 1).
class GridField {
public:
    GridField(GroupSpec group, Grid grid, Eigen::ArrayXd values,
              std::optional<Eigen::ArrayXd> density = std::nullopt);

    const GroupSpec& group() const { return group_; }
    const Grid& grid() const { return grid_; }
    const Eigen::ArrayXd& values() const { return values_; }
    const std::optional<Eigen::ArrayXd>& density() const { return density_; }

    /// rho(node) * cell volume.
    Eigen::ArrayXd weights() const;
    double max_value() const { return values_.size() ? values_.maxCoeff() : 0.0; }

private:
    GroupSpec group_;
    Grid grid_;
    Eigen::ArrayXd values_;
    std::optional<Eigen::ArrayXd> density_;
};

/// Samples f (and rho when given) at every node.
GridField sample_field(const GroupSpec& g, const Grid& grid, const ScalarFn& f,
                       const ScalarFn& density = nullptr);

/// Sum over nodes of phi(u) * rho * cell volume. Requires phi(0) == 0.
double integrate(const GridField& field, const std::function<double(double)>& phi);

/// mu({u > t}) counted over nodes (strict inequality). Requires t >= 0.
double superlevel_measure(const GridField& field, double t);

/// nu_u tabulated on K thresholds t_k = k max(u) / (K - 1). Evaluation between thresholds
/// is right-continuous: nu(t) = nu(t_k) for t in [t_k, t_{k+1}).
struct DistributionFunction {
    Eigen::ArrayXd thresholds;
    Eigen::ArrayXd measures;
    double total_mass = 0.0;

    int levels() const { return static_cast<int>(thresholds.size()); }
    double max_value() const { return thresholds.size() ? thresholds(thresholds.size() - 1) : 0.0; }
    bool degenerate() const { return max_value() <= 0.0; }
    double operator()(double t) const;
};

DistributionFunction distribution_function(const GridField& field, int levels = 512);

/// q-quantile, over nodes where u changes, of max_k |u(i + e_k) - u(i - e_k)| / 2: the typical
/// change of u across one cell. 0 for a constant field.
double cell_step_percentile(const GridField& field, double q = 0.95);

/// Named analytic test fields. `support` bounds the region where fn may be nonzero.
struct AnalyticField {
    std::string name;
    ScalarFn fn;
    Box support;
};

/// Builders: "tent", "plateau", "two-plateaus", "gaussian", "two-bump", "pyramid",
/// "zero". Shapes are scaled to the group (t-extents shrink on H^1). Cones over a gauge
/// are built with gauge_cone (rearrange.hpp).
AnalyticField analytic_field(const std::string& name, const GroupSpec& g);
std::vector<std::string> analytic_field_names();

/// Grid with `nodes` per axis whose interior holds `support` with two empty cells of
/// margin on every side.
Grid grid_around(const Box& support, int nodes);

/// Same, but with spacing h along axis 0 and the same node count on every axis.
Grid grid_around_spacing(const Box& support, double h);

GridField build_field(const AnalyticField& field, const GroupSpec& g, const Grid& grid,
                      const ScalarFn& density = nullptr);

} // namespace carnot

#endif // CARNOT_GRID_FIELD_HPP
