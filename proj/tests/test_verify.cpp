#include "hyplateau/errors.hpp"
#include "hyplateau/hypgeom.hpp"
#include "hyplateau/solver.hpp"
#include "hyplateau/verify.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace hyplateau;
using namespace hyplateau::verify;

namespace {

solver::SolverConfig ball_config(symfunc::CurvatureSpec spec, double sigma, int grid) {
    solver::SolverConfig c;
    c.spec = spec;
    c.sigma_target = sigma;
    c.resolution = grid;
    return c;
}

// left and right sides of the mu-window bound, written out independently
double window_gap(double a, double mu, double nu, double k) {
    const double lhs = (a - 2 * mu / a) * k * k + (4 * mu / a) * k * nu + a - (2 * mu / a) * nu * nu;
    const double rhs = 0.5 * a * k * k + a * a * k + 0.5 * a;
    return lhs - rhs;
}

}  // namespace

TEST_CASE("eta and the window threshold") {
    CHECK(eta_of(0.25) == doctest::Approx(4 * (1 + std::sqrt(1.5))).epsilon(1e-14));
    CHECK(eta_of(0.25) == doctest::Approx(8.898979).epsilon(1e-7));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(1e-3, 0.5);
    for (int rep = 0; rep < 1000; ++rep) {
        const double a = U(rng), e = eta_of(a);
        CHECK(std::abs(a * e * e - 2 * e - 2) <= 1e-10 * std::max(1.0, 2 * e + 2));
        // the summand vanishes at kappa = -eta and is positive beyond
        CHECK(std::abs(a * e * e - 2 * e - 2) <= 1e-9);
        const double k = -e * (1 + U(rng));
        CHECK(a * k * k + 2 * k - 2 > 0);
    }
    CHECK(kappa1_threshold(0.25) == doctest::Approx(eta_of(0.25) * (8 - 0.0625) / 0.0625));
    CHECK_THROWS_AS(eta_of(0.0), DomainError);
}

TEST_CASE("theta window") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0, 1);
    for (int rep = 0; rep < 5000; ++rep) {
        const double a = 0.01 + 0.49 * U(rng);
        const double k1 = std::exp(std::log(1e-2) + U(rng) * std::log(1e7));
        const double lambda = eta_of(a) / k1;
        ThetaWindow w = theta_window(a, lambda);
        CHECK(w.nonempty == (k1 > kappa1_threshold(a)));
        if (w.nonempty) {
            REQUIRE(w.theta.has_value());
            CHECK(*w.theta > w.lo);
            CHECK(*w.theta < w.hi);
            const double mu = (*w.theta + lambda) / (1 + lambda);
            CHECK(mu > 0);
            CHECK(mu < 1);
            CHECK(mu >= a * a / 8 - 1e-15);
            CHECK(mu <= a * a / 4 + 1e-15);
        } else {
            CHECK_FALSE(w.theta.has_value());
        }
    }
}

TEST_CASE("index sets at a synthetic point") {
    // large kappa_1 so the window opens; a few strongly negative curvatures
    const double a = 0.3;
    const double k1 = 2 * kappa1_threshold(a);
    Eigen::VectorXd kappa(5), grad(5);
    kappa << k1, 0.5, 0.1, -3.0, -50.0;
    grad << 0.1, 0.2, 1.0, 0.5, 0.3;
    PointEstimate p = estimate_at(kappa, grad, 0.7, a);
    REQUIRE(p.sets.split);
    REQUIRE(p.constants.theta.has_value());
    std::vector<int> all = p.sets.J;
    all.insert(all.end(), p.sets.L.begin(), p.sets.L.end());
    std::sort(all.begin(), all.end());
    CHECK(all == p.sets.middle);
    for (int j : p.sets.J) CHECK(std::find(p.sets.L.begin(), p.sets.L.end(), j) == p.sets.L.end());
    CHECK(p.sets.Neg == std::vector<int>{4});
    const double eta = eta_of(a);
    for (int i = 0; i < 5; ++i) {
        const bool mid = kappa[i] > -eta && kappa[i] < 0.7;
        CHECK(mid == (std::find(p.sets.middle.begin(), p.sets.middle.end(), i) != p.sets.middle.end()));
    }
    for (int j : p.sets.J) CHECK(*p.constants.theta * grad[j] < grad[0]);
    for (int l : p.sets.L) CHECK(*p.constants.theta * grad[l] >= grad[0]);

    // below the threshold nothing is split
    PointEstimate q = estimate_at(Eigen::Vector2d(0.5, 0.4), Eigen::Vector2d(0.5, 0.5), 0.6, a);
    CHECK_FALSE(q.sets.split);
    CHECK_FALSE(q.constants.window.nonempty);
    CHECK(q.sets.J.empty());
}

TEST_CASE("estimate on the H1 cap") {
    auto sol = solver::continuation_solve(ball_config(symfunc::CurvatureSpec::consecutive_quotient(2, 1), 0.5, 512));
    REQUIRE(sol.report.converged);
    auto g = gradient_estimate_check(sol);
    CHECK(g.pass);
    CHECK(g.min_nu_vertical == doctest::Approx(0.5).epsilon(5e-3));
    auto rep = estimate_constants(sol);
    CHECK(rep.constants.kappa1 == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(rep.boundary_attained);
    CHECK(rep.label.find("boundary") != std::string::npos);
    CHECK(rep.label.find("theta-window empty") != std::string::npos);
    CHECK(rep.constants.M0 == doctest::Approx(rep.constants.kappa1 / (rep.constants.nu_at_max - rep.constants.a)));
    CHECK(rep.constants.M0 == doctest::Approx(0.5 / (0.5 - rep.constants.a)).epsilon(1e-2));
    CHECK(rep.constants.a == doctest::Approx(0.25).epsilon(1e-2));
    CHECK(rep.constants.eta == doctest::Approx(eta_of(rep.constants.a)));
}

TEST_CASE("gradient estimate on a horosphere and below the classical threshold") {
    solver::GraphSolution flat;
    flat.spec = symfunc::CurvatureSpec::consecutive_quotient(2, 1);
    flat.sigma = 0.4;
    flat.epsilon = 0.2;
    flat.discretization = solver::make_discretization(flat.domain, solver::GridKind::Radial, 32);
    flat.u.assign(flat.discretization->size(), 0.2L);
    solver::finalize_solution(flat);
    auto h = gradient_estimate_check(flat);
    CHECK(h.min_nu_vertical == 1.0);
    CHECK(h.pass);

    auto sol = solver::continuation_solve(ball_config(symfunc::CurvatureSpec::consecutive_quotient(2, 2), 0.2, 512));
    REQUIRE(sol.report.converged);
    auto g = gradient_estimate_check(sol);
    CHECK(g.min_nu_vertical >= 0.19);
}

TEST_CASE("algebraic sub-inequalities") {
    auto r = algebraic_subinequalities(20000, 1);
    for (const char* id : {"i", "ii", "ii.positive", "ii.mu_low", "iii", "iv", "eta.root"}) REQUIRE(r.find(id) != nullptr);
    CHECK(r.find("i")->pass);
    CHECK(r.find("iii")->pass);
    CHECK(r.find("iv")->pass);
    CHECK(r.find("eta.root")->pass);
    CHECK(r.find("ii.positive")->pass);

    auto again = algebraic_subinequalities(20000, 1);
    CHECK(again.find("ii")->violations == r.find("ii")->violations);
    CHECK(again.find("ii")->worst_margin == r.find("ii")->worst_margin);

    // The mu-window bound fails for negative kappa at the top of the window:
    // a = 1/2, mu = a^2/4, nu = 1 leaves lhs - rhs = kappa / 4.
    CHECK(window_gap(0.5, 0.0625, 1.0, -1.0) == doctest::Approx(-0.25));
    CHECK(window_gap(0.5, 0.0625, 1.0, 1.0) == doctest::Approx(0.25));
    // so a faithful sampler must see violations
    CHECK(r.find("ii")->violations > 0);
    CHECK_FALSE(r.pass());
}

TEST_CASE("curvature bound detector") {
    std::vector<CurvatureSample> diverging, steady;
    for (int L = 0; L < 4; ++L) {
        diverging.push_back({0.4, 64 << L, 0.5 * (1 << L), true});
        steady.push_back({0.4, 64 << L, 0.5 + 1e-4 / (1 << L), true});
    }
    auto d = curvature_bound_study(diverging);
    CHECK(d.any_diverging);
    CHECK_FALSE(d.all_stable);
    auto s = curvature_bound_study(steady);
    CHECK_FALSE(s.any_diverging);
    CHECK(s.all_stable);
}

TEST_CASE("kappa_max is stable under refinement for H1 and H2/H1") {
    for (double sigma : {0.3, 0.7}) {
        auto t = solver::refine_study(ball_config(symfunc::CurvatureSpec::consecutive_quotient(2, 1), sigma, 256), 2);
        for (const auto& row : t.rows) CHECK(row.kappa_max <= 1.0);
    }
    std::vector<CurvatureSample> all;
    for (double sigma : {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        auto t = solver::refine_study(ball_config(symfunc::CurvatureSpec::consecutive_quotient(2, 2), sigma, 512), 2);
        auto s = samples_from(t, sigma);
        all.insert(all.end(), s.begin(), s.end());
    }
    auto study = curvature_bound_study(all);
    CHECK(study.groups.size() == 8);
    for (const auto& g : study.groups) {
        REQUIRE(g.drift.has_value());
        CHECK_MESSAGE(*g.drift <= 0.01, "sigma ", g.sigma, " drift ", *g.drift);
    }
    CHECK(study.all_stable);
    CHECK_FALSE(study.any_diverging);
}
