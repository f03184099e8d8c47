#pragma once

// Elementary symmetric polynomials, Garding cones and the three families of
// curvature functions f(kappa) used by the solver.
//
// Conventions: H_k = e_k / binom(n, k); K_k = {H_j > 0, 1 <= j <= k}.
// Every curvature function is written as f = (H_k / H_l)^(1/(k-l)):
//   consecutive quotient  H_k / H_{k-1}        (l = k-1), admissible in K_k
//   general quotient      (H_k/H_l)^(1/(k-l))  (1 <= l < k), admissible in K_{k+1}
//   k-th root             H_k^(1/k)            (l = 0),   admissible in K_{k+1}
// When k = n the cone K_{k+1} does not exist and K_n (the positive cone) is used.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hyplateau::symfunc {

/// A point of R^n interpreted as a vector of principal curvatures (n >= 2).
class Kappa {
public:
    Kappa() = default;
    explicit Kappa(Eigen::VectorXd values);
    Kappa(std::initializer_list<double> values);

    int n() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[i]; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    std::span<const double> span() const noexcept { return {values_.data(), static_cast<std::size_t>(values_.size())}; }

    double max() const { return values_.maxCoeff(); }
    /// Copy with entries in descending order.
    Kappa sorted_descending() const;

private:
    Eigen::VectorXd values_;
};

enum class Family { ConsecutiveQuotient, GeneralQuotient, KthRoot };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

class CurvatureSpec {
public:
    static CurvatureSpec consecutive_quotient(int n, int k);
    static CurvatureSpec general_quotient(int n, int k, int l);
    /// cone_index defaults to min(k+1, n); n (the positive cone) is also accepted.
    static CurvatureSpec kth_root(int n, int k, std::optional<int> cone_index = std::nullopt);

    Family family() const noexcept { return family_; }
    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    /// Denominator index: k-1, l, or 0 by family.
    int l() const noexcept { return l_; }
    int cone_index() const noexcept { return cone_index_; }
    double exponent() const noexcept { return 1.0 / static_cast<double>(k_ - l_); }

    std::string describe() const;

    bool operator==(const CurvatureSpec&) const = default;

private:
    CurvatureSpec(Family family, int n, int k, int l, int cone_index);

    Family family_ = Family::ConsecutiveQuotient;
    int n_ = 2;
    int k_ = 1;
    int l_ = 0;
    int cone_index_ = 1;
};

double binomial(int n, int k);

/// All unnormalized e_0..e_kmax of the given values, by the prefix recurrence.
std::vector<double> elementary_symmetric_all(std::span<const double> values, int kmax);

/// e_k as above, skipping the entries at positions `skip_a` and `skip_b` (-1 = none).
double elementary_symmetric_excluding(std::span<const double> values, int k, int skip_a, int skip_b = -1);

/// Unnormalized e_k(kappa); e_0 = 1.
double elementary_symmetric(const Kappa& kappa, int k);
/// H_k(kappa) = e_k / binom(n, k).
double normalized_Hk(const Kappa& kappa, int k);
/// dH_k / dkappa_i for all i.
Eigen::VectorXd normalized_Hk_gradient(const Kappa& kappa, int k);

/// Membership in the open cone K_k (strict, no tolerance).
bool cone_contains(const Kappa& kappa, int k);

/// Value, gradient and Hessian of f at one point.
struct Evaluation {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

/// order 0: value only, 1: adds gradient, 2: adds Hessian. Throws AdmissibilityError outside the cone.
Evaluation evaluate(const CurvatureSpec& spec, const Kappa& kappa, int order = 2);

/// Same formula with admissibility checked against K_cone instead (cone >= k); used to
/// probe f on the larger cone K_k where its formula is still defined.
Evaluation evaluate_in_cone(const CurvatureSpec& spec, const Kappa& kappa, int cone, int order = 2);

double eval_f(const CurvatureSpec& spec, const Kappa& kappa);
Eigen::VectorXd grad_f(const CurvatureSpec& spec, const Kappa& kappa);
Eigen::MatrixXd hessian_f(const CurvatureSpec& spec, const Kappa& kappa);

/// Matrix of (f_i - f_j)/(kappa_i - kappa_j) for i != j, zero diagonal.
/// Nearly equal pairs (|kappa_i - kappa_j| < 1e-8 (1 + |kappa_i|)) use the limit f_ii - f_ij.
Eigen::MatrixXd monotone_difference_quotients(const CurvatureSpec& spec, const Kappa& kappa);

/// F(A) = f(lambda(A)) and F^{ij} = dF/da_ij for symmetric A.
struct SpectralValue {
    double value = 0.0;
    Eigen::MatrixXd dF;
};
SpectralValue F_value_and_Fij(const Eigen::MatrixXd& A, const CurvatureSpec& spec);

/// F^{ij,kl} B_ij B_kl at A = diag(kappa).
double second_contraction(const Kappa& kappa_diag, const Eigen::MatrixXd& B, const CurvatureSpec& spec);

/// Residual of H_k = kappa_i dH_k/dkappa_i + c dH_{k+1}/dkappa_i with c = 1 (as displayed)
/// when `normalized_factor` is false, or c = binom(n,k+1)/binom(n,k) when true.
/// With `unnormalized` = true every H is replaced by the plain e_k.
double gradient_identity_residual(const Kappa& kappa, int k, int i, bool unnormalized, bool normalized_factor);

/// Uniform rejection sampler over K_j inside [-3, 3]^n, with a near-boundary mode
/// that slides accepted points toward the cone boundary.
class ConeSampler {
public:
    ConeSampler(int n, int cone_index, std::uint64_t seed, double box = 3.0);

    /// Uniform rejection sample of K_cone_index.
    Kappa interior();
    /// A point inside the cone found by bisection toward an exterior sample, then
    /// moved back toward the interior point by a log-uniform fraction in [1e-6, 0.5].
    Kappa near_boundary();
    /// Interior sample paired with a boundary point of K_boundary_cone (which must contain K_cone_index).
    struct Ray {
        Kappa inside;
        Kappa boundary;  ///< the last bisection point still inside the cone
    };
    Ray boundary_ray(int boundary_cone);
    /// Mixed stream: every fifth draw is near_boundary(), the rest interior().
    Kappa next();

    double uniform(double lo, double hi);
    std::uint64_t engine_draw();

    int n() const noexcept { return n_; }
    int cone_index() const noexcept { return cone_; }

private:
    Kappa box_point();

    int n_;
    int cone_;
    double box_;
    std::uint64_t counter_ = 0;
    std::mt19937_64 engine_;
};

struct ConditionRecord {
    std::string id;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::string note;
};

struct ConditionReport {
    CurvatureSpec spec = CurvatureSpec::consecutive_quotient(2, 1);
    int sample_cone = 1;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    double epsilon0 = 0.1;
    double delta0 = 0.1;
    double R = 1e3;
    std::vector<ConditionRecord> records;

    bool pass() const;
    const ConditionRecord* find(const std::string& id) const;
};

/// Sampled verification of the structural conditions on f (ids "2.1".."2.6"),
/// the applicable assumption ("1.3" for consecutive quotients, "1.4" otherwise),
/// and an "admissibility" record for samples that fall outside the spec's cone.
/// `sample_cone` overrides the sampled cone (negative controls); defaults to spec.cone_index().
ConditionReport check_conditions(const CurvatureSpec& spec, std::size_t sample_count, std::uint64_t seed,
                                 std::optional<int> sample_cone = std::nullopt);

/// Empirical sup of sum_i f_i over K_k for f = H_k/H_{k-1}.
double sup_gradient_sum(const CurvatureSpec& spec, std::size_t sample_count, std::uint64_t seed);

/// Empirical sup over samples of K_cone and indices with kappa_i > 0 of kappa_i f_i / f.
double sup_ratio_assumption(const CurvatureSpec& spec, std::size_t sample_count, std::uint64_t seed);

/// The constant C the argument yields for the applicable assumption, in the normalized convention:
/// k for consecutive quotients (sum f_i <= C), 1/(k-l) or 1/k for the others (kappa_i f_i <= C f).
double assumption_constant(const CurvatureSpec& spec);

}  // namespace hyplateau::symfunc
