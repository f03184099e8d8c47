#pragma once

// Finite-difference discretizations of the graph operator.
//
// Every interior node carries a stencil: a list of taps, each mapping one nodal value
// (or the Dirichlet boundary value, for node == kBoundaryValue) to weighted
// contributions to the local derivative slots. Radial slots are (u, u', u''); the 2-D
// tensor slots are (u, u_x, u_y, u_xx, u_xy, u_yy).

#include "hyplateau/hypgeom.hpp"
#include "hyplateau/symfunc.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace hyplateau::solver {

enum class GridKind { Radial, Tensor };

/// Nodal heights are stored in extended precision: with stencil weights of order 1/h^2,
/// one double ulp of u moves the discrete residual by ~1e-10 on a 1024-interval grid.
using Height = long double;
using Heights = std::vector<Height>;

inline constexpr std::ptrdiff_t kBoundaryValue = -1;
inline constexpr int kMaxSlots = 6;
using Slots = std::array<double, kMaxSlots>;

struct Tap {
    std::ptrdiff_t node = kBoundaryValue;
    Slots weight{};
};

class Discretization {
public:
    virtual ~Discretization() = default;

    virtual GridKind kind() const = 0;
    /// Number of derivative slots in use (3 radial, 6 tensor).
    virtual int slot_count() const = 0;
    /// Hyperbolic jet from derivative slots at node i.
    virtual hypgeom::PointJet jet(std::size_t i, const Slots& slots) const = 0;
    /// d f(kappa) / d slot, analytically, at node i.
    virtual Slots residual_gradient(std::size_t i, const Slots& slots, const symfunc::CurvatureSpec& spec) const = 0;

    const hypgeom::Domain& domain() const noexcept { return domain_; }
    /// Dimension of the base domain (the surface dimension n).
    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return positions_.size(); }
    bool is_boundary(std::size_t i) const { return boundary_[i]; }
    const Eigen::VectorXd& position(std::size_t i) const { return positions_[i]; }
    std::span<const Tap> stencil(std::size_t i) const { return stencils_[i]; }
    const std::vector<std::size_t>& interior_nodes() const noexcept { return interior_; }
    /// Node whose position is closest to the origin.
    std::size_t center_node() const noexcept { return center_; }
    /// Grid resolution parameter the discretization was built with (intervals across the radius / long axis).
    int resolution() const noexcept { return resolution_; }
    double spacing() const noexcept { return h_; }

    Slots slots(std::size_t i, std::span<const Height> u, Height boundary_value) const;
    hypgeom::PointJet jet_at(std::size_t i, std::span<const Height> u, Height boundary_value) const;
    /// Jet at a boundary node from one-sided second-order stencils; empty where not available.
    virtual std::optional<hypgeom::PointJet> boundary_jet(std::size_t i, std::span<const Height> u) const;

protected:
    Discretization(hypgeom::Domain domain, int n, int resolution, double h)
        : domain_(std::move(domain)), n_(n), resolution_(resolution), h_(h) {}
    void finalize();

    hypgeom::Domain domain_;
    int n_;
    int resolution_;
    double h_;
    std::vector<Eigen::VectorXd> positions_;
    std::vector<bool> boundary_;
    std::vector<std::vector<Tap>> stencils_;
    std::vector<std::size_t> interior_;
    std::size_t center_ = 0;
};

/// Radial profile u(rho) on [0, R]: node j at rho = j R / intervals, node `intervals` is the Dirichlet row.
class RadialDiscretization final : public Discretization {
public:
    RadialDiscretization(const hypgeom::Domain& ball, int intervals);

    GridKind kind() const override { return GridKind::Radial; }
    int slot_count() const override { return 3; }
    hypgeom::PointJet jet(std::size_t i, const Slots& slots) const override;
    Slots residual_gradient(std::size_t i, const Slots& slots, const symfunc::CurvatureSpec& spec) const override;
    std::optional<hypgeom::PointJet> boundary_jet(std::size_t i, std::span<const Height> u) const override;

    double rho(std::size_t i) const { return position(i)[0]; }
};

/// Tensor grid over the bounding box of a planar domain (n = 2). Nodes outside the domain are
/// Dirichlet rows; interior stencils stop at the boundary crossing along each of four lines
/// (both axes and both diagonals) and use nonuniform three-point formulas there.
class TensorDiscretization final : public Discretization {
public:
    TensorDiscretization(const hypgeom::Domain& domain, int intervals);

    GridKind kind() const override { return GridKind::Tensor; }
    int slot_count() const override { return 6; }
    hypgeom::PointJet jet(std::size_t i, const Slots& slots) const override;
    Slots residual_gradient(std::size_t i, const Slots& slots, const symfunc::CurvatureSpec& spec) const override;

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }

private:
    int nx_ = 0;
    int ny_ = 0;
};

std::shared_ptr<const Discretization> make_discretization(const hypgeom::Domain& domain, GridKind kind,
                                                          int resolution);

}  // namespace hyplateau::solver
