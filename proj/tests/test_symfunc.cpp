#include "oracles.hpp"

#include "hyplateau/errors.hpp"
#include "hyplateau/symfunc.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace hyplateau;
using namespace hyplateau::symfunc;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

std::vector<CurvatureSpec> all_families(int nmax) {
    std::vector<CurvatureSpec> out;
    for (int n = 2; n <= nmax; ++n)
        for (int k = 1; k <= n; ++k) {
            out.push_back(CurvatureSpec::consecutive_quotient(n, k));
            out.push_back(CurvatureSpec::kth_root(n, k));
            for (int l = 1; l < k; ++l) out.push_back(CurvatureSpec::general_quotient(n, k, l));
        }
    return out;
}

double f_oracle(const CurvatureSpec& s, const Eigen::VectorXd& x) {
    return oracle::quotient_f(oracle::as_vector(x), s.k(), s.l());
}

}  // namespace

TEST_CASE("e_k agrees with subset enumeration") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int n = 2; n <= 6; ++n)
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> x(n);
            for (auto& v : x) v = U(rng);
            Kappa kap(Eigen::Map<Eigen::VectorXd>(x.data(), n));
            for (int k = 0; k <= n; ++k) {
                CHECK(elementary_symmetric(kap, k) == doctest::Approx(oracle::subset_e(x, k)).epsilon(1e-12));
                CHECK(normalized_Hk(kap, k) == doctest::Approx(oracle::subset_H(x, k)).epsilon(1e-12));
            }
        }
}

TEST_CASE("H_k small cases") {
    for (int n = 2; n <= 5; ++n)
        for (int k = 1; k <= n; ++k) CHECK(normalized_Hk(Kappa(Eigen::VectorXd::Ones(n)), k) == doctest::Approx(1.0));
    CHECK(normalized_Hk(Kappa{3, 1}, 1) == doctest::Approx(2.0));
    CHECK(normalized_Hk(Kappa{2, 2}, 2) == doctest::Approx(4.0));
    CHECK_THROWS_AS(normalized_Hk(Kappa{1, 2}, 3), DomainError);
}

TEST_CASE("cone membership") {
    CHECK(cone_contains(Kappa{1, 1, 1}, 3));
    CHECK(cone_contains(Kappa{3, -1}, 1));
    CHECK_FALSE(cone_contains(Kappa{3, -1}, 2));
    CHECK_FALSE(cone_contains(Kappa{-1, -1}, 1));
    // boundary points are outside the open cone
    CHECK_FALSE(cone_contains(Kappa{1, 0}, 2));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int rep = 0; rep < 2000; ++rep) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x[i] = U(rng);
        bool inside = true;
        for (int k = 1; k <= 4; ++k) {
            bool c = cone_contains(Kappa(x), k);
            CHECK(c == (inside && oracle::subset_H(oracle::as_vector(x), k) > 0));
            if (!inside) CHECK_FALSE(c);
            inside = c;
        }
    }
}

TEST_CASE("evaluation examples") {
    CHECK(eval_f(CurvatureSpec::kth_root(3, 2), Kappa{1, 1, 1}) == doctest::Approx(1.0));
    CHECK(eval_f(CurvatureSpec::consecutive_quotient(2, 1), Kappa{2, 4}) == doctest::Approx(3.0));
    for (double t : {0.3, 1.0, 7.5})
        CHECK(eval_f(CurvatureSpec::general_quotient(2, 2, 1), Kappa{t, t}) == doctest::Approx(t));
    CHECK_THROWS_AS(eval_f(CurvatureSpec::consecutive_quotient(2, 2), Kappa{1, -2}), AdmissibilityError);

    // H_2/H_1 for n = 2 is 2 k1 k2 / (k1 + k2)
    CHECK(eval_f(CurvatureSpec::consecutive_quotient(2, 2), Kappa{1, 3}) == doctest::Approx(1.5));
}

TEST_CASE("every family matches the subset formula, and is homogeneous and symmetric") {
    for (const auto& s : all_families(4)) {
        ConeSampler sampler(s.n(), s.cone_index(), 11);
        for (int rep = 0; rep < 200; ++rep) {
            Kappa k = sampler.next();
            const double f = eval_f(s, k);
            CHECK(f > 0);
            CHECK(f == doctest::Approx(f_oracle(s, k.values())).epsilon(1e-9));
            const double t = 0.1 + 9.9 * rep / 200.0;
            CHECK(std::abs(eval_f(s, Kappa(Eigen::VectorXd(t * k.values()))) - t * f) <= 1e-10 * (1 + t * f));
            Eigen::VectorXd r = k.values().reverse();
            CHECK(eval_f(s, Kappa(r)) == doctest::Approx(f).epsilon(1e-12));
            Eigen::VectorXd g = grad_f(s, k), gr = grad_f(s, Kappa(r));
            CHECK((g.reverse() - gr).norm() <= 1e-10 * (1 + g.norm()));
            CHECK(std::abs(k.values().dot(g) - f) <= 1e-9 * (1 + f));
            CHECK(g.minCoeff() > 0);
        }
    }
}

TEST_CASE("gradients against finite differences") {
    auto s = CurvatureSpec::kth_root(3, 2);
    const Eigen::VectorXd x = vec({1, 2, 3});
    Eigen::VectorXd fd = oracle::fd_gradient([&](const Eigen::VectorXd& y) { return f_oracle(s, y); }, x, 1e-6);
    CHECK((grad_f(s, Kappa(x)) - fd).lpNorm<Eigen::Infinity>() <= 1e-7);

    auto h1 = CurvatureSpec::consecutive_quotient(4, 1);
    CHECK((grad_f(h1, Kappa{0.3, -1, 2, 5}) - Eigen::VectorXd::Constant(4, 0.25)).norm() < 1e-14);

    for (const auto& sp : all_families(4)) {
        Eigen::VectorXd g = grad_f(sp, Kappa(Eigen::VectorXd::Ones(sp.n())));
        CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-12));
        ConeSampler sampler(sp.n(), sp.cone_index(), 5);
        for (int rep = 0; rep < 30; ++rep) {
            Kappa k = sampler.interior();
            auto f = [&](const Eigen::VectorXd& y) { return f_oracle(sp, y); };
            const double h = 1e-6 * (1 + k.values().cwiseAbs().maxCoeff());
            // skip points so close to the cone boundary that the stencil leaves it
            bool ok = true;
            for (int i = 0; i < sp.n() && ok; ++i)
                for (double sgn : {-1.0, 1.0}) {
                    Eigen::VectorXd y = k.values();
                    y[i] += sgn * h;
                    if (!cone_contains(Kappa(y), sp.cone_index())) ok = false;
                }
            if (!ok) continue;
            Eigen::VectorXd g2 = grad_f(sp, k), gfd = oracle::fd_gradient(f, k.values(), h);
            CHECK((g2 - gfd).norm() <= 1e-5 * (1 + g2.norm()));
        }
    }
}

TEST_CASE("hessians: finite differences, null direction, concavity") {
    auto s = CurvatureSpec::kth_root(2, 2);
    const Eigen::VectorXd x = vec({1, 3});
    Eigen::MatrixXd fd = oracle::fd_hessian([&](const Eigen::VectorXd& y) { return f_oracle(s, y); }, x, 1e-4);
    CHECK((hessian_f(s, Kappa(x)) - fd).lpNorm<Eigen::Infinity>() <= 1e-5);

    CHECK(hessian_f(CurvatureSpec::consecutive_quotient(3, 1), Kappa{1, 2, -0.5}).norm() < 1e-14);

    for (const auto& sp : all_families(4)) {
        ConeSampler sampler(sp.n(), sp.cone_index(), 21);
        for (int rep = 0; rep < 100; ++rep) {
            Kappa k = sampler.next();
            Eigen::MatrixXd H = hessian_f(sp, k);
            CHECK((H - H.transpose()).norm() <= 1e-12 * (1 + H.norm()));
            CHECK((H * k.values()).norm() <= 1e-9 * (1 + H.norm() * k.values().norm()));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
            CHECK(es.eigenvalues().maxCoeff() <= 1e-8 * (1 + H.norm()));
        }
    }
}

TEST_CASE("difference quotients") {
    auto s = CurvatureSpec::kth_root(2, 2);
    // f = sqrt(k1 k2): f_1 = k2 / (2f), f_2 = k1 / (2f)
    const double f = std::sqrt(3.0);
    const double direct = (1 / (2 * f) - 3 / (2 * f)) / 2.0;
    Eigen::MatrixXd Q = monotone_difference_quotients(s, Kappa{3, 1});
    CHECK(Q(0, 1) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(Q(0, 1) <= 1e-9);

    Eigen::MatrixXd L = monotone_difference_quotients(s, Kappa{2, 2});
    auto q = [&](double nu) {
        Eigen::VectorXd g = grad_f(s, Kappa{2 + nu, 2 - nu});
        return (g[0] - g[1]) / (2 * nu);
    };
    const double limit = (4 * q(5e-4) - q(1e-3)) / 3;
    CHECK(std::abs(L(0, 1) - limit) <= 1e-6);

    CHECK(monotone_difference_quotients(CurvatureSpec::consecutive_quotient(3, 1), Kappa{1, 2, 3}).norm() < 1e-14);

    for (const auto& sp : all_families(4)) {
        ConeSampler sampler(sp.n(), sp.cone_index(), 8);
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::MatrixXd M = monotone_difference_quotients(sp, sampler.next());
            for (int i = 0; i < sp.n(); ++i)
                for (int j = 0; j < sp.n(); ++j)
                    if (i != j) CHECK(M(i, j) <= 1e-9);
        }
    }
}

TEST_CASE("spectral derivative F^{ij}") {
    auto s = CurvatureSpec::consecutive_quotient(3, 2);
    const Eigen::VectorXd d = vec({2, 1, 0.5});
    SpectralValue sv = F_value_and_Fij(d.asDiagonal().toDenseMatrix(), s);
    CHECK((sv.dF - Eigen::MatrixXd(grad_f(s, Kappa(d)).asDiagonal())).norm() < 1e-12);

    std::mt19937_64 rng(99);
    std::normal_distribution<double> N(0, 1);
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::MatrixXd G(3, 3);
        for (int i = 0; i < 9; ++i) G.data()[i] = N(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
        Eigen::MatrixXd Qm = qr.householderQ();
        Eigen::VectorXd lam = vec({1.0 + std::abs(N(rng)), 0.5 + std::abs(N(rng)), 0.2 + 0.5 * std::abs(N(rng))});
        Eigen::MatrixXd A = Qm * lam.asDiagonal() * Qm.transpose();
        A = (0.5 * (A + A.transpose())).eval();
        SpectralValue a = F_value_and_Fij(A, s);
        CHECK(a.value == doctest::Approx(eval_f(s, Kappa(lam))).epsilon(1e-10));
        const double h = 1e-6;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                Eigen::MatrixXd E = Eigen::MatrixXd::Zero(3, 3);
                E(i, j) = E(j, i) = 1;
                auto F = [&](double t) {
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A + t * E);
                    return f_oracle(s, es.eigenvalues());
                };
                const double dd = (F(h) - F(-h)) / (2 * h);
                const double expect = i == j ? a.dF(i, j) : 2 * a.dF(i, j);
                CHECK(std::abs(dd - expect) <= 1e-5 * (1 + std::abs(expect)));
            }
    }
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
    bad(0, 1) = 0.5;
    CHECK_THROWS_AS(F_value_and_Fij(bad, s), DomainError);
}

TEST_CASE("second contraction against F along a line") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0, 1);
    for (const auto& sp : all_families(3)) {
        ConeSampler sampler(sp.n(), sp.cone_index(), 13);
        for (int rep = 0; rep < 20; ++rep) {
            Kappa k = sampler.interior();
            const int n = sp.n();
            Eigen::MatrixXd B(n, n);
            for (int i = 0; i < n * n; ++i) B.data()[i] = N(rng);
            B = (0.5 * (B + B.transpose())).eval();
            const double t = 1e-4;
            auto F = [&](double s) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(k.values().asDiagonal()) + s * B);
                return f_oracle(sp, es.eigenvalues());
            };
            bool ok = true;
            for (double s : {-t, t}) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(k.values().asDiagonal()) + s * B);
                ok = ok && cone_contains(Kappa(es.eigenvalues()), sp.cone_index());
            }
            if (!ok) continue;
            const double fd = (F(t) - 2 * F(0) + F(-t)) / (t * t);
            const double sc = second_contraction(k, B, sp);
            CHECK(std::abs(fd - sc) <= 1e-4 * (1 + std::abs(sc)));
            CHECK(sc <= 1e-8 * (1 + B.squaredNorm()));
        }
        // diagonal B reduces to the Hessian form
        Kappa k = sampler.interior();
        Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(sp.n(), -1, 2);
        CHECK(second_contraction(k, b.asDiagonal().toDenseMatrix(), sp) ==
              doctest::Approx(b.dot(hessian_f(sp, k) * b)).epsilon(1e-10));
    }
}

TEST_CASE("gradient identity in both normalizations") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-2, 2);
    double worst_plain = 0, worst_factor = 0;
    for (int n = 2; n <= 4; ++n)
        for (int rep = 0; rep < 50; ++rep) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x[i] = U(rng);
            for (int k = 1; k < n; ++k)
                for (int i = 0; i < n; ++i) {
                    worst_plain = std::max(worst_plain, gradient_identity_residual(Kappa(x), k, i, true, false));
                    worst_factor = std::max(worst_factor, gradient_identity_residual(Kappa(x), k, i, false, true));
                }
        }
    CHECK(worst_plain < 1e-12);
    CHECK(worst_factor < 1e-12);
    // the displayed form with factor 1 does not survive normalization (binom(4,2)/binom(4,1) = 1.5)
    double residual = gradient_identity_residual(Kappa{1, 2, 3, 4}, 1, 0, false, false);
    CHECK(std::abs(residual) > 1e-3);

    // dH_k/dk_i <= H_k / k_i on K_{k+1} with k_i > 0
    for (int n = 3; n <= 4; ++n)
        for (int k = 1; k < n; ++k) {
            ConeSampler sampler(n, k + 1, 31);
            for (int rep = 0; rep < 300; ++rep) {
                Kappa kap = sampler.next();
                Eigen::VectorXd g = normalized_Hk_gradient(kap, k);
                for (int i = 0; i < n; ++i)
                    if (kap[i] > 0) CHECK(g[i] <= normalized_Hk(kap, k) / kap[i] + 1e-10 * (1 + std::abs(g[i])));
            }
        }
}

TEST_CASE("sampler is deterministic and stays in the cone") {
    ConeSampler a(3, 2, 42), b(3, 2, 42);
    for (int rep = 0; rep < 500; ++rep) {
        Kappa x = a.next(), y = b.next();
        CHECK(x.values() == y.values());
        CHECK(cone_contains(x, 2));
    }
}

TEST_CASE("gradient sum supremum against a dense cross-section") {
    CHECK(sup_gradient_sum(CurvatureSpec::consecutive_quotient(3, 1), 1000, 1) == doctest::Approx(1.0).epsilon(1e-12));

    // cross-section {k1 + k2 = 1} of K_2; sum f_i is scale invariant so this covers the cone
    auto s = CurvatureSpec::consecutive_quotient(2, 2);
    double dense = 0;
    const int N = 200000;
    for (int j = 1; j < N; ++j) {
        const double t = static_cast<double>(j) / N;
        const Eigen::VectorXd x = vec({t, 1 - t});
        const double h = 1e-3 * std::min(t, 1 - t);
        dense = std::max(dense, oracle::fd_gradient([&](const Eigen::VectorXd& y) { return f_oracle(s, y); }, x, h).sum());
    }
    const double sampled = sup_gradient_sum(s, 100000, 1);
    CHECK(std::isfinite(sampled));
    CHECK(std::abs(sampled - dense) <= 1e-3);
    CHECK(std::abs(sup_gradient_sum(s, 100000, 2) - sampled) <= 1e-3);
    // the normalized supremum is k = 2, not n - k + 1 = 1
    CHECK(dense == doctest::Approx(2.0).epsilon(1e-4));
    CHECK_THROWS_AS(sup_gradient_sum(CurvatureSpec::kth_root(2, 2), 10, 1), DomainError);
}

TEST_CASE("ratio assumption bounds") {
    CHECK(sup_ratio_assumption(CurvatureSpec::kth_root(3, 2), 20000, 1) <= 0.5 + 1e-8);
    CHECK(sup_ratio_assumption(CurvatureSpec::general_quotient(4, 3, 1), 20000, 1) <= 0.5 + 1e-8);
    // H_1 at (1,...,1): each ratio is 1/n
    auto h1 = CurvatureSpec::kth_root(3, 1);
    const Eigen::VectorXd g = grad_f(h1, Kappa{1, 1, 1});
    CHECK(g[0] / eval_f(h1, Kappa{1, 1, 1}) == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(sup_ratio_assumption(CurvatureSpec::consecutive_quotient(3, 2), 10, 1), DomainError);
}

TEST_CASE("condition suite") {
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k <= n; ++k) {
            auto r = check_conditions(CurvatureSpec::consecutive_quotient(n, k), 2000, 9);
            CHECK_MESSAGE(r.pass(), "consecutive quotient n=", n, " k=", k);
        }
    auto lin = check_conditions(CurvatureSpec::kth_root(3, 1), 500, 1);
    REQUIRE(lin.find("2.6") != nullptr);
    // f(1,1,1+R) - 1.1 for H_1 is at least R/n - 0.1 minus the delta0 ball
    CHECK(lin.find("2.6")->worst_margin >= 1000.0 / 3 - 1.0);

    auto r1 = check_conditions(CurvatureSpec::general_quotient(3, 2, 1), 500, 4);
    auto r2 = check_conditions(CurvatureSpec::general_quotient(3, 2, 1), 500, 4);
    REQUIRE(r1.records.size() == r2.records.size());
    for (std::size_t i = 0; i < r1.records.size(); ++i) CHECK(r1.records[i].worst_margin == r2.records[i].worst_margin);
}

TEST_CASE("negative control: sampling outside the cone is flagged") {
    auto r = check_conditions(CurvatureSpec::kth_root(2, 2), 2000, 3, 1);
    CHECK_FALSE(r.pass());
    REQUIRE(r.find("admissibility") != nullptr);
    CHECK(r.find("admissibility")->violations > 0);
}
