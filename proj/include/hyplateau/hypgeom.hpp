#pragma once

// Vertical graphs x_{n+1} = u(x) in the upper half-space model of H^{n+1}.
//
// The hyperbolic shape operator of a graph, with respect to the upward normal, is
//     A_hyp = u * A_euclid + nu^{n+1} * I,
// where A_euclid = (1/w) gamma D^2u gamma, gamma = I - Du Du^T / (w (1 + w)) and
// w = sqrt(1 + |Du|^2). Horizontal planes get kappa = 1 and Euclidean spheres
// centered at height c < 0 get kappa = -c / r.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace hyplateau::solver {
struct GraphSolution;
}

namespace hyplateau::hypgeom {

struct Ball {
    double R = 1.0;
};
struct Ellipse {
    double a_axis = 1.0;
    double b_axis = 1.0;
};
struct Annulus {
    double R_in = 0.5;
    double R_out = 1.0;
};

/// Bounded base domain Omega in R^n; its boundary is the asymptotic boundary Gamma.
class Domain {
public:
    using Shape = std::variant<Ball, Ellipse, Annulus>;

    static Domain ball(int n, double R);
    static Domain ellipse(double a_axis, double b_axis);  // n = 2
    static Domain annulus(int n, double R_in, double R_out);

    int n() const noexcept { return n_; }
    const Shape& shape() const noexcept { return shape_; }
    bool is_ball() const noexcept { return std::holds_alternative<Ball>(shape_); }

    /// Negative inside, zero on the boundary, positive outside.
    double level(const Eigen::VectorXd& x) const;
    bool contains(const Eigen::VectorXd& x) const { return level(x) < 0.0; }
    /// Smallest s > 0 with x + s * dir on the boundary, for x inside.
    double ray_exit(const Eigen::VectorXd& x, const Eigen::VectorXd& dir) const;
    double inscribed_radius() const;
    /// Half-widths of the axis-aligned bounding box.
    Eigen::VectorXd half_extent() const;
    /// Euclidean mean curvature of the boundary is non-negative everywhere.
    bool mean_convex() const;

    std::string name() const;
    std::string describe() const;

private:
    Domain(int n, Shape shape) : n_(n), shape_(shape) {}
    int n_ = 2;
    Shape shape_;
};

/// Everything the solver and the estimate checks need at one point of a graph.
struct PointJet {
    double u = 0.0;
    Eigen::VectorXd Du;
    Eigen::MatrixXd D2u;
    double w = 1.0;
    Eigen::VectorXd nu;  ///< unit upward normal in R^{n+1}
    double nu_vertical = 1.0;
    Eigen::MatrixXd A_euclid;
    Eigen::MatrixXd A_hyp;
    Eigen::VectorXd kappa;  ///< hyperbolic principal curvatures, descending
};

struct Normal {
    Eigen::VectorXd nu;
    double w = 1.0;
};

Normal upward_normal(const Eigen::VectorXd& Du);
Eigen::MatrixXd euclidean_shape(const Eigen::VectorXd& Du, const Eigen::MatrixXd& D2u);
/// Throws DegenerateHeight for u <= 0.
PointJet hyperbolic_shape(double u, const Eigen::VectorXd& Du, const Eigen::MatrixXd& D2u);

/// Jet of a radial graph u(|x|) at radius rho, expressed in the frame (radial, tangential...).
/// At rho = 0 the tangential curvature uses u'(rho)/rho -> u''(0).
PointJet radial_jet(double u, double up, double upp, double rho, int n);

/// Umbilic spherical cap: the part above x_{n+1} = 0 of the Euclidean sphere of radius r
/// centered at (0, c), with hyperbolic curvature sigma and u = boundary_height on |x| = R.
struct CapSolution {
    double R = 1.0;
    double sigma = 0.5;
    double r = 0.0;
    double c = 0.0;
    double boundary_height = 0.0;

    double height(double rho) const;
    double slope(double rho) const;
    double second(double rho) const;
    double apex() const { return height(0.0); }
    /// Sup-norm distance from the center axis at which the cap meets x_{n+1} = 0.
    double footprint() const;
    PointJet jet(const Eigen::VectorXd& x) const;
};

/// Cap with u(0) = R sqrt((1 - sigma) / (1 + sigma)) when boundary_height = 0.
/// With boundary_height = h > 0 it is the sphere of curvature sigma through (R, h).
CapSolution make_cap(double R, double sigma, double boundary_height = 0.0);

struct NuDerivativeCheck {
    double max_residual = 0.0;
    std::size_t nodes_checked = 0;
    std::size_t worst_node = 0;
};

/// Compares the radial surface derivative of nu^{n+1} (forward differences between
/// neighbouring interior nodes) with -(u_r/u)(kappa_radial - nu^{n+1}) in the hyperbolic
/// orthonormal frame. Throws Unsupported for non-radial solutions.
NuDerivativeCheck check_lemma21_ii(const solver::GraphSolution& solution);

}  // namespace hyplateau::hypgeom
