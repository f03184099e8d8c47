#pragma once

// Dirichlet problem f(kappa[graph u]) = sigma in Omega, u = epsilon on the boundary,
// solved by damped Newton iteration with continuation in sigma and then epsilon.

#include "hyplateau/discretization.hpp"
#include "hyplateau/hypgeom.hpp"
#include "hyplateau/symfunc.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hyplateau::solver {

/// Reporting threshold for the sigma range covered by the classical curvature estimate.
inline constexpr double kClassicalSigmaThreshold = 0.3703;

enum class JacobianMode { FiniteDifference, AnalyticFij };

std::string to_string(JacobianMode mode);
JacobianMode jacobian_mode_from_string(const std::string& name);

struct SolverConfig {
    symfunc::CurvatureSpec spec = symfunc::CurvatureSpec::consecutive_quotient(2, 1);
    hypgeom::Domain domain = hypgeom::Domain::ball(2, 1.0);
    GridKind grid_kind = GridKind::Radial;
    int resolution = 256;
    double sigma_target = 0.5;
    double sigma_start = 0.8;
    double sigma_step = 0.05;
    double epsilon_max = 0.1;
    double epsilon_min = 1e-3;
    double epsilon_factor = 0.5;
    /// Explicit schedules override the generated ones when non-empty.
    std::vector<double> sigma_schedule;
    std::vector<double> epsilon_schedule;
    std::optional<double> newton_tol;  ///< default 1e-10 radial, 1e-8 tensor
    int max_newton_iters = 50;
    double damping = 0.5;
    int max_halvings = 20;
    int max_bisections = 8;
    JacobianMode jacobian_mode = JacobianMode::FiniteDifference;
    int threads = 1;

    double tolerance() const;
    std::vector<double> sigmas() const;
    std::vector<double> epsilons() const;
    /// Throws DomainError listing violated constraints.
    void validate() const;
};

/// Default sigma schedule: from `start` toward `target` in steps of `step`, ending at `target`.
std::vector<double> sigma_schedule(double start, double target, double step);
/// Default epsilon schedule: `max`, then `min * factor^-j` descending to `min`.
std::vector<double> epsilon_schedule(double max, double min, double factor);

struct ContinuationStep {
    std::string parameter;  ///< "sigma" or "epsilon"
    double sigma = 0.0;
    double epsilon = 0.0;
    int iterations = 0;
    double residual = 0.0;
    int bisections = 0;
};

struct SolveReport {
    bool converged = false;
    double final_residual = 0.0;
    double newton_tol = 0.0;
    int total_iterations = 0;
    std::vector<ContinuationStep> steps;
    double kappa_max = 0.0;
    double boundary_kappa_max = 0.0;
    double min_nu_vertical = 1.0;
    std::size_t admissibility_violations = 0;  ///< accepted iterates with a node outside the cone
    std::size_t admissibility_backtracks = 0;  ///< trial steps rejected for leaving the cone
    double u_center = 0.0;
    /// u at the center node for each of the last epsilon values, smallest last.
    std::vector<std::pair<double, double>> center_by_epsilon;
    std::optional<double> u_center_extrapolated;
    bool below_classical_threshold = false;
    std::string message;
    double wall_time_s = 0.0;
};

struct GraphSolution {
    hypgeom::Domain domain = hypgeom::Domain::ball(2, 1.0);
    symfunc::CurvatureSpec spec = symfunc::CurvatureSpec::consecutive_quotient(2, 1);
    double sigma = 0.5;
    double epsilon = 1e-3;
    std::shared_ptr<const Discretization> discretization;
    Heights u;
    /// Jets at interior nodes, aligned with discretization->interior_nodes().
    std::vector<hypgeom::PointJet> jets;
    std::vector<std::pair<std::size_t, hypgeom::PointJet>> boundary_jets;
    SolveReport report;
};

/// Discrete residual f(kappa) - sigma at interior nodes and u - epsilon on Dirichlet rows.
/// Throws AdmissibilityLost listing every interior node outside the spec cone.
std::vector<double> residual(const Discretization& disc, std::span<const Height> u,
                             const symfunc::CurvatureSpec& spec, double sigma, double epsilon, int threads = 1);

double sup_norm(std::span<const double> v);

/// Sparse Jacobian of the residual (row-major triplets assembled into a compressed matrix).
struct Jacobian {
    std::size_t size = 0;
    std::vector<std::size_t> rows, cols;
    std::vector<double> values;
    double entry(std::size_t row, std::size_t col) const;
};
Jacobian assemble_jacobian(const Discretization& disc, std::span<const Height> u, const symfunc::CurvatureSpec& spec,
                           double sigma, double epsilon, JacobianMode mode, int threads = 1);

struct NewtonStepResult {
    Heights u;
    double step_norm = 0.0;
    double residual_norm = 0.0;
    int halvings = 0;
    std::size_t admissibility_backtracks = 0;
};

/// One damped Newton step; throws NonConvergence when backtracking is exhausted
/// and SingularJacobian when the factorization fails.
NewtonStepResult newton_step(const Discretization& disc, std::span<const Height> u, double sigma, double epsilon,
                             const SolverConfig& config);

/// Newton iteration at fixed (sigma, epsilon) until the residual sup-norm is below tolerance.
struct NewtonSolveResult {
    Heights u;
    int iterations = 0;
    double residual_norm = 0.0;
    std::size_t admissibility_backtracks = 0;
};
NewtonSolveResult newton_solve(const Discretization& disc, Heights u, double sigma, double epsilon,
                               const SolverConfig& config);

/// Initial heights: exact epsilon-cap at sigma for balls, elliptically stretched cap otherwise.
Heights cap_initializer(const Discretization& disc, double sigma, double epsilon);

/// Full continuation; returns the solution at (sigma_target, epsilon_min).
GraphSolution continuation_solve(const SolverConfig& config);

/// Continue a converged solution to a new sigma at its epsilon (used by sweeps).
GraphSolution continue_to_sigma(const GraphSolution& from, double sigma, const SolverConfig& config);

/// Fill jets and statistics of a solution from its heights.
void finalize_solution(GraphSolution& solution);

/// Three-point Richardson extrapolation to epsilon -> 0 for epsilons in ratio 2.
std::optional<double> richardson_epsilon(const std::vector<std::pair<double, double>>& samples);

struct SweepRow {
    double sigma = 0.0;
    bool converged = false;
    double u_center = 0.0;
    double u_max = 0.0;
    double kappa_max = 0.0;
    double min_nu_vertical = 0.0;
    int iterations = 0;
    bool below_classical_threshold = false;
    std::string status;
};

/// Solves at each sigma (descending), warm-starting from the previous converged row.
std::vector<SweepRow> sweep_sigma(const SolverConfig& config, const std::vector<double>& sigmas,
                                  std::vector<GraphSolution>* solutions = nullptr);

struct RefineRow {
    int resolution = 0;
    bool converged = false;
    double u_center = 0.0;
    double kappa_max = 0.0;
    std::optional<double> cap_error;  ///< |u(0) - exact epsilon-cap apex| on balls
    std::string status;
};

struct RefineTable {
    std::vector<RefineRow> rows;
    std::optional<double> observed_order;      ///< from the cap error (balls) or three-level differences
    std::optional<double> kappa_max_drift;     ///< relative, between the two finest converged levels
};

RefineTable refine_study(const SolverConfig& config, int levels);

}  // namespace hyplateau::solver
