#include "hyplateau/symfunc.hpp"

#include "hyplateau/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace hyplateau::symfunc {

Kappa::Kappa(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() < 2) throw DomainError("Kappa requires n >= 2");
    if (!values_.allFinite()) throw DomainError("Kappa entries must be finite");
}

Kappa::Kappa(std::initializer_list<double> values)
    : Kappa(Eigen::Map<const Eigen::VectorXd>(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

Kappa Kappa::sorted_descending() const {
    Eigen::VectorXd v = values_;
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    return Kappa(std::move(v));
}

std::string to_string(Family family) {
    switch (family) {
        case Family::ConsecutiveQuotient: return "consecutive-quotient";
        case Family::GeneralQuotient: return "general-quotient";
        case Family::KthRoot: return "kth-root";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    if (name == "consecutive-quotient" || name == "cq") return Family::ConsecutiveQuotient;
    if (name == "general-quotient" || name == "gq") return Family::GeneralQuotient;
    if (name == "kth-root" || name == "root") return Family::KthRoot;
    throw DomainError("unknown curvature family '" + name + "'");
}

CurvatureSpec::CurvatureSpec(Family family, int n, int k, int l, int cone_index)
    : family_(family), n_(n), k_(k), l_(l), cone_index_(cone_index) {}

CurvatureSpec CurvatureSpec::consecutive_quotient(int n, int k) {
    if (n < 2) throw DomainError("dimension n must be >= 2");
    if (k < 1 || k > n) throw DomainError("consecutive quotient requires 1 <= k <= n");
    return {Family::ConsecutiveQuotient, n, k, k - 1, k};
}

CurvatureSpec CurvatureSpec::general_quotient(int n, int k, int l) {
    if (n < 2) throw DomainError("dimension n must be >= 2");
    if (l < 1 || l >= k || k > n) throw DomainError("general quotient requires 1 <= l < k <= n");
    return {Family::GeneralQuotient, n, k, l, std::min(k + 1, n)};
}

CurvatureSpec CurvatureSpec::kth_root(int n, int k, std::optional<int> cone_index) {
    if (n < 2) throw DomainError("dimension n must be >= 2");
    if (k < 1 || k > n) throw DomainError("k-th root requires 1 <= k <= n");
    const int natural = std::min(k + 1, n);
    const int cone = cone_index.value_or(natural);
    if (cone != natural && cone != n) throw DomainError("k-th root cone index must be k+1 or n");
    return {Family::KthRoot, n, k, 0, cone};
}

std::string CurvatureSpec::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::ConsecutiveQuotient: os << "H" << k_ << "/H" << l_; break;
        case Family::GeneralQuotient: os << "(H" << k_ << "/H" << l_ << ")^(1/" << (k_ - l_) << ")"; break;
        case Family::KthRoot: os << "H" << k_ << "^(1/" << k_ << ")"; break;
    }
    os << " n=" << n_ << " K_" << cone_index_;
    return os.str();
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int j = 1; j <= k; ++j) b = b * static_cast<double>(n - k + j) / static_cast<double>(j);
    return std::round(b);
}

std::vector<double> elementary_symmetric_all(std::span<const double> values, int kmax) {
    std::vector<double> e(static_cast<std::size_t>(kmax) + 1, 0.0);
    e[0] = 1.0;
    int seen = 0;
    for (double x : values) {
        ++seen;
        for (int j = std::min(seen, kmax); j >= 1; --j) e[j] += x * e[j - 1];
    }
    return e;
}

double elementary_symmetric_excluding(std::span<const double> values, int k, int skip_a, int skip_b) {
    if (k < 0) return 0.0;
    std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    int seen = 0;
    for (int i = 0; i < static_cast<int>(values.size()); ++i) {
        if (i == skip_a || i == skip_b) continue;
        ++seen;
        for (int j = std::min(seen, k); j >= 1; --j) e[j] += values[i] * e[j - 1];
    }
    return e[k];
}

namespace {

void check_order(const Kappa& kappa, int k, int lo) {
    if (k < lo || k > kappa.n()) throw DomainError("polynomial index out of range");
}

}  // namespace

double elementary_symmetric(const Kappa& kappa, int k) {
    check_order(kappa, k, 0);
    return elementary_symmetric_all(kappa.span(), k)[k];
}

double normalized_Hk(const Kappa& kappa, int k) {
    check_order(kappa, k, 0);
    return elementary_symmetric(kappa, k) / binomial(kappa.n(), k);
}

Eigen::VectorXd normalized_Hk_gradient(const Kappa& kappa, int k) {
    check_order(kappa, k, 0);
    const int n = kappa.n();
    Eigen::VectorXd g(n);
    const double c = binomial(n, k);
    for (int i = 0; i < n; ++i) g[i] = elementary_symmetric_excluding(kappa.span(), k - 1, i) / c;
    return g;
}

bool cone_contains(const Kappa& kappa, int k) {
    if (k < 1 || k > kappa.n()) throw DomainError("cone index out of range");
    const auto e = elementary_symmetric_all(kappa.span(), k);
    for (int j = 1; j <= k; ++j)
        if (!(e[j] > 0.0)) return false;
    return true;
}

namespace {

struct PolyJet {
    double value = 1.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

// H_k with derivatives; H_0 = 1 has zero derivatives.
PolyJet normalized_jet(const Kappa& kappa, int k, int order) {
    const int n = kappa.n();
    PolyJet jet;
    const double c = binomial(n, k);
    jet.value = elementary_symmetric_all(kappa.span(), k)[k] / c;
    if (order >= 1) {
        jet.grad = Eigen::VectorXd::Zero(n);
        if (k >= 1)
            for (int i = 0; i < n; ++i) jet.grad[i] = elementary_symmetric_excluding(kappa.span(), k - 1, i) / c;
    }
    if (order >= 2) {
        jet.hess = Eigen::MatrixXd::Zero(n, n);
        if (k >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double v = elementary_symmetric_excluding(kappa.span(), k - 2, i, j) / c;
                    jet.hess(i, j) = v;
                    jet.hess(j, i) = v;
                }
    }
    return jet;
}

void require_admissible(const CurvatureSpec& spec, const Kappa& kappa, int cone) {
    if (kappa.n() != spec.n()) throw DomainError("kappa dimension does not match the curvature spec");
    if (!cone_contains(kappa, cone)) {
        std::ostringstream os;
        os << "kappa outside K_" << cone << " for " << spec.describe();
        throw AdmissibilityError(os.str());
    }
}

}  // namespace

Evaluation evaluate(const CurvatureSpec& spec, const Kappa& kappa, int order) {
    return evaluate_in_cone(spec, kappa, spec.cone_index(), order);
}

Evaluation evaluate_in_cone(const CurvatureSpec& spec, const Kappa& kappa, int cone, int order) {
    if (cone < spec.k()) throw DomainError("the formula for f needs at least K_k");
    require_admissible(spec, kappa, cone);
    const PolyJet num = normalized_jet(kappa, spec.k(), order);
    const PolyJet den = normalized_jet(kappa, spec.l(), order);
    const double p = spec.exponent();

    const double q = num.value / den.value;
    Evaluation out;
    out.value = (p == 1.0) ? q : std::pow(q, p);
    if (order < 1) return out;

    const double B = den.value;
    const Eigen::VectorXd dq = num.grad / B - (num.value / (B * B)) * den.grad;
    const double fp = (p == 1.0) ? 1.0 : p * out.value / q;  // p q^{p-1}
    out.grad = fp * dq;
    if (order < 2) return out;

    const double A = num.value;
    Eigen::MatrixXd d2q = num.hess / B - (num.grad * den.grad.transpose() + den.grad * num.grad.transpose()) / (B * B)
                          - (A / (B * B)) * den.hess + (2.0 * A / (B * B * B)) * den.grad * den.grad.transpose();
    const double fpp = (p == 1.0) ? 0.0 : p * (p - 1.0) * out.value / (q * q);  // p(p-1) q^{p-2}
    out.hess = fp * d2q + fpp * dq * dq.transpose();
    out.hess = 0.5 * (out.hess + out.hess.transpose()).eval();
    return out;
}

double eval_f(const CurvatureSpec& spec, const Kappa& kappa) { return evaluate(spec, kappa, 0).value; }

Eigen::VectorXd grad_f(const CurvatureSpec& spec, const Kappa& kappa) { return evaluate(spec, kappa, 1).grad; }

Eigen::MatrixXd hessian_f(const CurvatureSpec& spec, const Kappa& kappa) { return evaluate(spec, kappa, 2).hess; }

namespace {

Eigen::MatrixXd difference_quotients(const Evaluation& ev, const Kappa& kappa) {
    const int n = kappa.n();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double gap = kappa[i] - kappa[j];
            if (std::abs(gap) < 1e-8 * (1.0 + std::abs(kappa[i])))
                D(i, j) = 0.5 * (ev.hess(i, i) + ev.hess(j, j)) - ev.hess(i, j);
            else
                D(i, j) = (ev.grad[i] - ev.grad[j]) / gap;
        }
    return D;
}

}  // namespace

Eigen::MatrixXd monotone_difference_quotients(const CurvatureSpec& spec, const Kappa& kappa) {
    return difference_quotients(evaluate(spec, kappa, 2), kappa);
}

SpectralValue F_value_and_Fij(const Eigen::MatrixXd& A, const CurvatureSpec& spec) {
    if (A.rows() != A.cols() || A.rows() != spec.n()) throw DomainError("F requires an n x n matrix");
    const double scale = 1.0 + A.cwiseAbs().maxCoeff();
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DomainError("F requires a symmetric matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (A + A.transpose()));
    const Kappa lambda(eig.eigenvalues());
    const Evaluation ev = evaluate(spec, lambda, 1);
    const Eigen::MatrixXd& V = eig.eigenvectors();
    return {ev.value, V * ev.grad.asDiagonal() * V.transpose()};
}

double second_contraction(const Kappa& kappa_diag, const Eigen::MatrixXd& B, const CurvatureSpec& spec) {
    const int n = kappa_diag.n();
    if (B.rows() != n || B.cols() != n) throw DomainError("direction matrix has wrong shape");
    const Evaluation ev = evaluate(spec, kappa_diag, 2);
    const Eigen::VectorXd diag = B.diagonal();
    double total = diag.dot(ev.hess * diag);
    const Eigen::MatrixXd D = difference_quotients(ev, kappa_diag);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) total += D(i, j) * B(i, j) * B(j, i);
    return total;
}

double gradient_identity_residual(const Kappa& kappa, int k, int i, bool unnormalized, bool normalized_factor) {
    const int n = kappa.n();
    if (k < 0 || k >= n) throw DomainError("identity requires 0 <= k < n");
    if (i < 0 || i >= n) throw DomainError("index out of range");
    const auto s = kappa.span();
    const double ck = unnormalized ? 1.0 : binomial(n, k);
    const double ck1 = unnormalized ? 1.0 : binomial(n, k + 1);
    const double Hk = elementary_symmetric_all(s, k)[k] / ck;
    const double dHk = (k >= 1 ? elementary_symmetric_excluding(s, k - 1, i) : 0.0) / ck;
    const double dHk1 = elementary_symmetric_excluding(s, k, i) / ck1;
    const double factor = (!unnormalized && normalized_factor) ? ck1 / ck : 1.0;
    return Hk - (kappa[i] * dHk + factor * dHk1);
}

double assumption_constant(const CurvatureSpec& spec) {
    if (spec.family() == Family::ConsecutiveQuotient) return static_cast<double>(spec.k());
    return spec.exponent();
}

}  // namespace hyplateau::symfunc
