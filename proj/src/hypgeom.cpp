#include "hyplateau/hypgeom.hpp"

#include "hyplateau/errors.hpp"
#include "hyplateau/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace hyplateau::hypgeom {

Domain Domain::ball(int n, double R) {
    if (n < 2) throw DomainError("ball dimension must be >= 2");
    if (!(R > 0.0)) throw DomainError("ball radius must be positive");
    return {n, Ball{R}};
}

Domain Domain::ellipse(double a_axis, double b_axis) {
    if (!(b_axis > 0.0) || !(a_axis >= b_axis)) throw DomainError("ellipse requires a_axis >= b_axis > 0");
    return {2, Ellipse{a_axis, b_axis}};
}

Domain Domain::annulus(int n, double R_in, double R_out) {
    if (n < 2) throw DomainError("annulus dimension must be >= 2");
    if (!(R_in > 0.0) || !(R_out > R_in)) throw DomainError("annulus requires 0 < R_in < R_out");
    return {n, Annulus{R_in, R_out}};
}

double Domain::level(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw DomainError("point dimension does not match the domain");
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Ball>) {
                return x.norm() - s.R;
            } else if constexpr (std::is_same_v<S, Ellipse>) {
                const double p = x[0] / s.a_axis, q = x[1] / s.b_axis;
                return p * p + q * q - 1.0;
            } else {
                const double r = x.norm();
                return std::max(s.R_in - r, r - s.R_out);
            }
        },
        shape_);
}

namespace {

// Smallest positive root of a s^2 + b s + c = 0, or +inf.
double smallest_positive_root(double a, double b, double c) {
    const double inf = std::numeric_limits<double>::infinity();
    if (a == 0.0) return (b != 0.0 && -c / b > 0.0) ? -c / b : inf;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return inf;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    double r1 = q / a, r2 = (q != 0.0) ? c / q : -b / a;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > 0.0) return r1;
    if (r2 > 0.0) return r2;
    return inf;
}

}  // namespace

double Domain::ray_exit(const Eigen::VectorXd& x, const Eigen::VectorXd& dir) const {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Ball>) {
                return smallest_positive_root(dir.squaredNorm(), 2.0 * x.dot(dir), x.squaredNorm() - s.R * s.R);
            } else if constexpr (std::is_same_v<S, Ellipse>) {
                const double ia = 1.0 / (s.a_axis * s.a_axis), ib = 1.0 / (s.b_axis * s.b_axis);
                const double A = dir[0] * dir[0] * ia + dir[1] * dir[1] * ib;
                const double B = 2.0 * (x[0] * dir[0] * ia + x[1] * dir[1] * ib);
                const double C = x[0] * x[0] * ia + x[1] * x[1] * ib - 1.0;
                return smallest_positive_root(A, B, C);
            } else {
                const double a = dir.squaredNorm(), b = 2.0 * x.dot(dir), c = x.squaredNorm();
                return std::min(smallest_positive_root(a, b, c - s.R_in * s.R_in),
                                smallest_positive_root(a, b, c - s.R_out * s.R_out));
            }
        },
        shape_);
}

double Domain::inscribed_radius() const {
    return std::visit(
        [](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Ball>) return s.R;
            else if constexpr (std::is_same_v<S, Ellipse>) return s.b_axis;
            else return 0.5 * (s.R_out - s.R_in);
        },
        shape_);
}

Eigen::VectorXd Domain::half_extent() const {
    return std::visit(
        [&](const auto& s) -> Eigen::VectorXd {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Ball>) return Eigen::VectorXd::Constant(n_, s.R);
            else if constexpr (std::is_same_v<S, Ellipse>) return Eigen::Vector2d(s.a_axis, s.b_axis);
            else return Eigen::VectorXd::Constant(n_, s.R_out);
        },
        shape_);
}

bool Domain::mean_convex() const {
    // The inner sphere of an annulus has negative mean curvature seen from Omega's exterior normal.
    return !std::holds_alternative<Annulus>(shape_);
}

std::string Domain::name() const {
    return std::visit(
        [](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Ball>) return "ball";
            else if constexpr (std::is_same_v<S, Ellipse>) return "ellipse";
            else return "annulus";
        },
        shape_);
}

std::string Domain::describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Ball>) os << "Ball(R=" << s.R << ")";
            else if constexpr (std::is_same_v<S, Ellipse>) os << "Ellipse(a=" << s.a_axis << ", b=" << s.b_axis << ")";
            else os << "Annulus(R_in=" << s.R_in << ", R_out=" << s.R_out << ")";
        },
        shape_);
    os << " n=" << n_;
    return os.str();
}

Normal upward_normal(const Eigen::VectorXd& Du) {
    const int n = static_cast<int>(Du.size());
    const double w = std::sqrt(1.0 + Du.squaredNorm());
    Eigen::VectorXd nu(n + 1);
    nu.head(n) = -Du / w;
    nu[n] = 1.0 / w;
    return {std::move(nu), w};
}

Eigen::MatrixXd euclidean_shape(const Eigen::VectorXd& Du, const Eigen::MatrixXd& D2u) {
    const Eigen::Index n = Du.size();
    if (D2u.rows() != n || D2u.cols() != n) throw DomainError("D2u has the wrong shape");
    const double w = std::sqrt(1.0 + Du.squaredNorm());
    const Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(n, n) - (Du * Du.transpose()) / (w * (1.0 + w));
    Eigen::MatrixXd A = gamma * D2u * gamma / w;
    return 0.5 * (A + A.transpose());
}

PointJet hyperbolic_shape(double u, const Eigen::VectorXd& Du, const Eigen::MatrixXd& D2u) {
    if (!(u > 0.0)) throw DegenerateHeight("hyperbolic curvature needs u > 0");
    PointJet jet;
    jet.u = u;
    jet.Du = Du;
    jet.D2u = D2u;
    Normal normal = upward_normal(Du);
    jet.w = normal.w;
    jet.nu = std::move(normal.nu);
    jet.nu_vertical = jet.nu[jet.nu.size() - 1];
    jet.A_euclid = euclidean_shape(Du, D2u);
    const Eigen::Index n = Du.size();
    jet.A_hyp = u * jet.A_euclid + jet.nu_vertical * Eigen::MatrixXd::Identity(n, n);
    if (jet.A_hyp.isDiagonal(0.0)) {
        jet.kappa = jet.A_hyp.diagonal();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jet.A_hyp, Eigen::EigenvaluesOnly);
        jet.kappa = eig.eigenvalues();
    }
    std::sort(jet.kappa.data(), jet.kappa.data() + n, std::greater<>());
    return jet;
}

PointJet radial_jet(double u, double up, double upp, double rho, int n) {
    if (!(u > 0.0)) throw DegenerateHeight("hyperbolic curvature needs u > 0");
    if (rho < 0.0) throw DomainError("radius must be non-negative");
    Eigen::VectorXd Du = Eigen::VectorXd::Zero(n);
    Du[0] = up;
    Eigen::MatrixXd D2u = Eigen::MatrixXd::Zero(n, n);
    D2u(0, 0) = upp;
    const double tangential = rho > 0.0 ? up / rho : upp;
    for (int i = 1; i < n; ++i) D2u(i, i) = tangential;
    return hyperbolic_shape(u, Du, D2u);
}

double CapSolution::height(double rho) const { return c + std::sqrt(r * r - rho * rho); }

double CapSolution::slope(double rho) const { return -rho / std::sqrt(r * r - rho * rho); }

double CapSolution::second(double rho) const {
    const double s2 = r * r - rho * rho;
    return -r * r / (s2 * std::sqrt(s2));
}

double CapSolution::footprint() const { return std::sqrt(r * r - c * c); }

PointJet CapSolution::jet(const Eigen::VectorXd& x) const {
    const Eigen::Index n = x.size();
    const double s = std::sqrt(r * r - x.squaredNorm());
    const Eigen::VectorXd Du = -x / s;
    const Eigen::MatrixXd D2u = -Eigen::MatrixXd::Identity(n, n) / s - (x * x.transpose()) / (s * s * s);
    return hyperbolic_shape(c + s, Du, D2u);
}

CapSolution make_cap(double R, double sigma, double boundary_height) {
    if (!(R > 0.0)) throw DomainError("cap radius must be positive");
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("cap curvature must lie in (0, 1)");
    if (boundary_height < 0.0) throw DomainError("cap boundary height must be non-negative");
    const double h = boundary_height;
    const double one_minus = 1.0 - sigma * sigma;
    CapSolution cap;
    cap.R = R;
    cap.sigma = sigma;
    cap.boundary_height = h;
    // Sphere through (R, h) with -c/r = sigma: r^2 (1 - sigma^2) - 2 h sigma r - (R^2 + h^2) = 0.
    cap.r = (h * sigma + std::sqrt(h * h + one_minus * R * R)) / one_minus;
    cap.c = -sigma * cap.r;
    return cap;
}

NuDerivativeCheck check_lemma21_ii(const solver::GraphSolution& solution) {
    const auto* radial = dynamic_cast<const solver::RadialDiscretization*>(solution.discretization.get());
    if (radial == nullptr) throw Unsupported("the discrete normal-derivative identity check is implemented for radial solutions");
    const auto& nodes = radial->interior_nodes();
    const double h = radial->spacing();
    NuDerivativeCheck out;
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
        const PointJet& here = solution.jets[j];
        const PointJet& next = solution.jets[j + 1];
        const double dnu = (next.nu_vertical - here.nu_vertical) / h;
        const double lhs = here.u / here.w * dnu;
        const double kappa_radial = here.A_hyp(0, 0);
        const double rhs = -(here.Du[0] / here.w) * (kappa_radial - here.nu_vertical);
        const double residual = std::abs(lhs - rhs);
        ++out.nodes_checked;
        if (residual > out.max_residual) {
            out.max_residual = residual;
            out.worst_node = nodes[j];
        }
    }
    return out;
}

}  // namespace hyplateau::hypgeom
