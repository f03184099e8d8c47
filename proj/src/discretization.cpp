#include "hyplateau/discretization.hpp"

#include "hyplateau/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace hyplateau::solver {

using hypgeom::PointJet;

Slots Discretization::slots(std::size_t i, std::span<const Height> u, Height boundary_value) const {
    // Extended accumulation: stencil weights reach 1/h^2, so double sums would put
    // rounding noise of order 1e-16/h^2 into the second derivatives.
    std::array<long double, kMaxSlots> acc{};
    for (const Tap& tap : stencils_[i]) {
        const Height v = tap.node == kBoundaryValue ? boundary_value : u[static_cast<std::size_t>(tap.node)];
        for (int m = 0; m < kMaxSlots; ++m) acc[m] += static_cast<long double>(tap.weight[m]) * v;
    }
    Slots s{};
    for (int m = 0; m < kMaxSlots; ++m) s[m] = static_cast<double>(acc[m]);
    return s;
}

PointJet Discretization::jet_at(std::size_t i, std::span<const Height> u, Height boundary_value) const {
    return jet(i, slots(i, u, boundary_value));
}

std::optional<PointJet> Discretization::boundary_jet(std::size_t, std::span<const Height>) const {
    return std::nullopt;
}

void Discretization::finalize() {
    interior_.clear();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        if (!boundary_[i]) interior_.push_back(i);
        const double d = positions_[i].norm();
        if (d < best) {
            best = d;
            center_ = i;
        }
    }
}

// ---------------------------------------------------------------------------------------------
// Radial profile

RadialDiscretization::RadialDiscretization(const hypgeom::Domain& ball, int intervals)
    : Discretization(ball, ball.n(), intervals, 0.0) {
    if (!ball.is_ball()) throw Unsupported("the radial path requires a ball domain");
    if (intervals < 4) throw DomainError("radial grid needs at least 4 intervals");
    const double R = std::get<hypgeom::Ball>(ball.shape()).R;
    h_ = R / intervals;
    const double h2 = h_ * h_;
    const auto nodes = static_cast<std::size_t>(intervals) + 1;
    positions_.resize(nodes);
    boundary_.assign(nodes, false);
    stencils_.resize(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        positions_[j] = Eigen::VectorXd::Zero(n_);
        positions_[j][0] = (j == nodes - 1) ? R : static_cast<double>(j) * h_;
    }
    boundary_[nodes - 1] = true;

    // Axis: u'(0) = 0 by symmetry, u''(0) from the mirrored ghost u_{-1} = u_1.
    stencils_[0] = {Tap{0, {1.0, 0.0, -2.0 / h2}}, Tap{1, {0.0, 0.0, 2.0 / h2}}};
    for (std::size_t j = 1; j + 1 < nodes; ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        stencils_[j] = {Tap{jj - 1, {0.0, -0.5 / h_, 1.0 / h2}}, Tap{jj, {1.0, 0.0, -2.0 / h2}},
                        Tap{jj + 1, {0.0, 0.5 / h_, 1.0 / h2}}};
    }
    finalize();
}

PointJet RadialDiscretization::jet(std::size_t i, const Slots& s) const {
    return hypgeom::radial_jet(s[0], s[1], s[2], rho(i), n_);
}

Slots RadialDiscretization::residual_gradient(std::size_t i, const Slots& s,
                                              const symfunc::CurvatureSpec& spec) const {
    const double u = s[0], p = s[1], q = s[2];
    const double r = rho(i);
    const double w = std::sqrt(1.0 + p * p);
    const double w3 = w * w * w;

    const double kr = u * q / w3 + 1.0 / w;
    const double dkr_du = q / w3;
    const double dkr_dp = -3.0 * u * q * p / (w3 * w * w) - p / w3;
    const double dkr_dq = u / w3;

    double kt, dkt_du, dkt_dp, dkt_dq;
    if (r > 0.0) {
        kt = u * p / (r * w) + 1.0 / w;
        dkt_du = p / (r * w);
        dkt_dp = u / (r * w3) - p / w3;
        dkt_dq = 0.0;
    } else {
        kt = u * q / w + 1.0 / w;
        dkt_du = q / w;
        dkt_dp = -u * q * p / w3 - p / w3;
        dkt_dq = u / w;
    }

    Eigen::VectorXd kappa = Eigen::VectorXd::Constant(n_, kt);
    kappa[0] = kr;
    const Eigen::VectorXd g = symfunc::grad_f(spec, symfunc::Kappa(kappa));
    const double fr = g[0];
    const double ft = g.tail(n_ - 1).sum();
    Slots out{};
    out[0] = fr * dkr_du + ft * dkt_du;
    out[1] = fr * dkr_dp + ft * dkt_dp;
    out[2] = fr * dkr_dq + ft * dkt_dq;
    return out;
}

std::optional<PointJet> RadialDiscretization::boundary_jet(std::size_t i, std::span<const Height> u) const {
    if (!is_boundary(i) || i < 3) return std::nullopt;
    const long double h = h_;
    const auto up = static_cast<double>((3.0L * u[i] - 4.0L * u[i - 1] + u[i - 2]) / (2.0L * h));
    const auto upp = static_cast<double>((2.0L * u[i] - 5.0L * u[i - 1] + 4.0L * u[i - 2] - u[i - 3]) / (h * h));
    if (!(u[i] > 0.0L)) return std::nullopt;
    return hypgeom::radial_jet(static_cast<double>(u[i]), up, upp, rho(i), n_);
}

// ---------------------------------------------------------------------------------------------
// Planar tensor grid with boundary-crossing stencils

namespace {

struct LineWeights {
    double back, center, forward;
};

// Three-point first and second derivative weights at 0 from samples at -hm, 0, +hp.
LineWeights first_derivative(double hm, double hp) {
    const double d = hm * hp * (hm + hp);
    return {-hp * hp / d, (hp * hp - hm * hm) / d, hm * hm / d};
}

LineWeights second_derivative(double hm, double hp) {
    const double d = hm * hp * (hm + hp);
    return {2.0 * hp / d, -2.0 * (hm + hp) / d, 2.0 * hm / d};
}

}  // namespace

TensorDiscretization::TensorDiscretization(const hypgeom::Domain& domain, int intervals)
    : Discretization(domain, 2, intervals, 0.0) {
    if (domain.n() != 2) throw Unsupported("the tensor-grid path is planar (n = 2)");
    if (std::holds_alternative<hypgeom::Annulus>(domain.shape()))
        throw Unsupported("annulus domains are provided for curvature evaluation only");
    if (intervals < 4) throw DomainError("tensor grid needs at least 4 intervals");
    if (intervals % 2 != 0) ++intervals;
    resolution_ = intervals;

    const Eigen::VectorXd half = domain.half_extent();
    h_ = 2.0 * half[0] / intervals;
    const int jx = intervals / 2;
    const int jy = static_cast<int>(std::ceil(half[1] / h_ - 1e-12));
    nx_ = 2 * jx + 1;
    ny_ = 2 * jy + 1;

    const std::size_t total = static_cast<std::size_t>(nx_) * ny_;
    positions_.resize(total);
    boundary_.assign(total, true);
    stencils_.resize(total);
    for (int iy = 0; iy < ny_; ++iy)
        for (int ix = 0; ix < nx_; ++ix) {
            Eigen::VectorXd x(2);
            x << (ix - jx) * h_, (iy - jy) * h_;
            positions_[index(ix, iy)] = x;
            boundary_[index(ix, iy)] = !(domain.level(x) < -1e-12);
        }

    struct Line {
        int dx, dy;
    };
    const Line lines[4] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

    for (int iy = 0; iy < ny_; ++iy)
        for (int ix = 0; ix < nx_; ++ix) {
            const std::size_t i = index(ix, iy);
            if (boundary_[i]) continue;
            std::map<std::ptrdiff_t, Slots> acc;
            acc[static_cast<std::ptrdiff_t>(i)][0] += 1.0;
            for (int li = 0; li < 4; ++li) {
                const Line& line = lines[li];
                const double step = h_ * std::sqrt(static_cast<double>(line.dx * line.dx + line.dy * line.dy));
                std::ptrdiff_t node[2];
                double arm[2];
                for (int side = 0; side < 2; ++side) {
                    const int sgn = side == 0 ? -1 : 1;
                    const int jx2 = ix + sgn * line.dx, jy2 = iy + sgn * line.dy;
                    const bool inside_grid = jx2 >= 0 && jx2 < nx_ && jy2 >= 0 && jy2 < ny_;
                    if (inside_grid && !boundary_[index(jx2, jy2)]) {
                        node[side] = static_cast<std::ptrdiff_t>(index(jx2, jy2));
                        arm[side] = step;
                    } else {
                        Eigen::VectorXd dir(2);
                        dir << sgn * line.dx * h_, sgn * line.dy * h_;
                        const double s = std::min(1.0, domain.ray_exit(positions_[i], dir));
                        node[side] = kBoundaryValue;
                        arm[side] = s * step;
                    }
                }
                const LineWeights d1 = first_derivative(arm[0], arm[1]);
                const LineWeights d2 = second_derivative(arm[0], arm[1]);
                const auto self = static_cast<std::ptrdiff_t>(i);
                auto add = [&](int slot, const LineWeights& lw, double scale) {
                    acc[node[0]][slot] += scale * lw.back;
                    acc[self][slot] += scale * lw.center;
                    acc[node[1]][slot] += scale * lw.forward;
                };
                switch (li) {
                    case 0: add(1, d1, 1.0); add(3, d2, 1.0); break;
                    case 1: add(2, d1, 1.0); add(5, d2, 1.0); break;
                    case 2: add(4, d2, 0.5); break;
                    case 3: add(4, d2, -0.5); break;
                }
            }
            auto& st = stencils_[i];
            st.reserve(acc.size());
            for (const auto& [nd, w] : acc) st.push_back(Tap{nd, w});
        }
    finalize();
}

PointJet TensorDiscretization::jet(std::size_t, const Slots& s) const {
    Eigen::VectorXd Du(2);
    Du << s[1], s[2];
    Eigen::MatrixXd D2u(2, 2);
    D2u << s[3], s[4], s[4], s[5];
    return hypgeom::hyperbolic_shape(s[0], Du, D2u);
}

Slots TensorDiscretization::residual_gradient(std::size_t i, const Slots& s,
                                              const symfunc::CurvatureSpec& spec) const {
    const PointJet pj = jet(i, s);
    const auto F = symfunc::F_value_and_Fij(pj.A_hyp, spec);
    const Eigen::MatrixXd& dF = F.dF;

    const Eigen::Vector2d p(s[1], s[2]);
    const double w = pj.w;
    const double g = w * (1.0 + w);
    const Eigen::Matrix2d gamma = Eigen::Matrix2d::Identity() - p * p.transpose() / g;
    const Eigen::Matrix2d S = pj.D2u;
    const double u = s[0];

    Slots out{};
    out[0] = (dF.array() * pj.A_euclid.array()).sum();

    const Eigen::Matrix2d G = gamma * dF * gamma;  // trace(F gamma E gamma) = (gamma F gamma) : E
    out[3] = u / w * G(0, 0);
    out[4] = u / w * 2.0 * G(0, 1);
    out[5] = u / w * G(1, 1);

    for (int k = 0; k < 2; ++k) {
        const Eigen::Vector2d ek = Eigen::Vector2d::Unit(k);
        const double dg = (1.0 + 2.0 * w) * p[k] / w;
        const Eigen::Matrix2d dgamma = -(ek * p.transpose() + p * ek.transpose()) / g + p * p.transpose() * dg / (g * g);
        const Eigen::Matrix2d dA = -(p[k] / (w * w * w)) * gamma * S * gamma + (dgamma * S * gamma + gamma * S * dgamma) / w;
        out[1 + k] = u * (dF.array() * dA.array()).sum() - p[k] / (w * w * w) * dF.trace();
    }
    return out;
}

std::shared_ptr<const Discretization> make_discretization(const hypgeom::Domain& domain, GridKind kind,
                                                          int resolution) {
    if (kind == GridKind::Radial) return std::make_shared<RadialDiscretization>(domain, resolution);
    return std::make_shared<TensorDiscretization>(domain, resolution);
}

}  // namespace hyplateau::solver
