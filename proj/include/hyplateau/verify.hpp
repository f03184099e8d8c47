#pragma once

// Numerical instantiation of the interior curvature estimate: the test function
// kappa_max / (nu^{n+1} - a), its constants, the index classification at the maximizer,
// and the algebraic inequalities the argument is assembled from.

#include "hyplateau/solver.hpp"
#include "hyplateau/symfunc.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hyplateau::verify {

struct GradientEstimate {
    double min_nu_vertical = 1.0;
    double sigma = 0.0;
    double tolerance = 0.01;
    std::size_t worst_node = 0;
    bool pass = false;
};

/// pass iff min over interior nodes of nu^{n+1} >= sigma - tolerance.
GradientEstimate gradient_estimate_check(const solver::GraphSolution& solution, double tolerance = 0.01);

/// eta(a) = (1 + sqrt(1 + 2a)) / a, the positive root of a eta^2 - 2 eta - 2 = 0.
double eta_of(double a);

/// kappa_1 above which the theta-window is nonempty: eta (8 - a^2) / a^2.
double kappa1_threshold(double a);

struct ThetaWindow {
    double lo = 0.0;   ///< a^2/8 + lambda (a^2/8 - 1)
    double hi = 0.0;   ///< min(1, a^2/4 + lambda (a^2/4 - 1))
    bool nonempty = false;  ///< 0 < lo < hi
    std::optional<double> theta;  ///< midpoint when nonempty
};

ThetaWindow theta_window(double a, double lambda);

struct EstimateConstants {
    double a = 0.0;
    double eta = 0.0;
    double kappa1 = 0.0;
    double lambda = 0.0;
    double nu_at_max = 0.0;
    double M0 = 0.0;
    double kappa1_threshold = 0.0;
    ThetaWindow window;
    std::optional<double> theta;
    std::optional<double> mu;
};

struct IndexSets {
    std::vector<int> J;    ///< -eta < kappa_i < nu, theta f_i < f_1
    std::vector<int> L;    ///< -eta < kappa_i < nu, theta f_i >= f_1
    std::vector<int> Neg;  ///< kappa_i <= -eta
    std::vector<int> middle;  ///< -eta < kappa_i < nu (J and L split it once theta exists)
    bool split = false;       ///< false when the theta-window is empty
};

/// Constants and index sets at a point with descending curvatures kappa, gradient
/// f_i(kappa), vertical normal nu and a given a.
struct PointEstimate {
    EstimateConstants constants;
    IndexSets sets;
};
PointEstimate estimate_at(const Eigen::VectorXd& kappa, const Eigen::VectorXd& grad, double nu, double a);

struct EstimateReport {
    EstimateConstants constants;
    IndexSets sets;
    std::size_t max_node = 0;
    /// The maximizer is a boundary node or touches the boundary through its stencil; the
    /// interior maximum-principle analysis does not apply there.
    bool boundary_attained = false;
    std::string label;
};

EstimateReport estimate_constants(const solver::GraphSolution& solution);

struct AlgebraReport {
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::vector<symfunc::ConditionRecord> records;
    bool pass() const;
    const symfunc::ConditionRecord* find(const std::string& id) const;
};

/// Seeded property checks over random draws. Record ids:
///   "i"              a kappa^2 + 2 kappa - 2 >= 0 for kappa <= -eta(a)
///   "ii"             the mu-window quadratic bound, over a, mu, nu and kappa
///   "ii.positive"    the left-hand quadratic of (ii) is positive
///   "ii.mu_low"      the bound of (ii) at mu = a^2/8
///   "iii"            negative discriminant a^4 - a^2 and positivity of (a/2)k^2 + a^2 k + a/2
///   "iv"             theta-window nonemptiness iff kappa_1 > eta (8 - a^2)/a^2, and mu in [a^2/8, a^2/4]
///   "eta.root"       a eta^2 - 2 eta - 2 = 0 within 1e-10
AlgebraReport algebraic_subinequalities(std::size_t samples, std::uint64_t seed);

struct CurvatureSample {
    double sigma = 0.0;
    int resolution = 0;
    double kappa_max = 0.0;
    bool converged = true;
};

struct BoundGroup {
    double sigma = 0.0;
    std::vector<std::pair<int, double>> levels;  ///< (resolution, kappa_max), ascending resolution
    std::optional<double> drift;                 ///< relative, two finest levels
    bool stable = true;                          ///< drift <= 1%
    bool diverging = false;                      ///< kappa_max grows by >= 1.5x per refinement
};

struct BoundStudy {
    std::vector<BoundGroup> groups;
    bool any_diverging = false;
    bool all_stable = true;
    std::string note;
};

BoundStudy curvature_bound_study(const std::vector<CurvatureSample>& samples);

/// Samples from a refinement table at a fixed sigma.
std::vector<CurvatureSample> samples_from(const solver::RefineTable& table, double sigma);

}  // namespace hyplateau::verify
