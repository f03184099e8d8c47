#include "hyplateau/verify.hpp"

#include "hyplateau/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace hyplateau::verify {

GradientEstimate gradient_estimate_check(const solver::GraphSolution& solution, double tolerance) {
    GradientEstimate out;
    out.sigma = solution.sigma;
    out.tolerance = tolerance;
    const auto& nodes = solution.discretization->interior_nodes();
    for (std::size_t j = 0; j < solution.jets.size(); ++j) {
        if (solution.jets[j].nu_vertical < out.min_nu_vertical) {
            out.min_nu_vertical = solution.jets[j].nu_vertical;
            out.worst_node = nodes[j];
        }
    }
    out.pass = out.min_nu_vertical >= solution.sigma - tolerance;
    return out;
}

double eta_of(double a) {
    if (!(a > 0.0)) throw DomainError("eta needs a > 0");
    return (1.0 + std::sqrt(1.0 + 2.0 * a)) / a;
}

double kappa1_threshold(double a) { return eta_of(a) * (8.0 - a * a) / (a * a); }

ThetaWindow theta_window(double a, double lambda) {
    const double a2 = a * a;
    ThetaWindow w;
    w.lo = a2 / 8.0 + lambda * (a2 / 8.0 - 1.0);
    w.hi = std::min(1.0, a2 / 4.0 + lambda * (a2 / 4.0 - 1.0));
    w.nonempty = w.lo > 0.0 && w.lo < w.hi;
    if (w.nonempty) w.theta = 0.5 * (w.lo + w.hi);
    return w;
}

PointEstimate estimate_at(const Eigen::VectorXd& kappa, const Eigen::VectorXd& grad, double nu, double a) {
    if (kappa.size() != grad.size() || kappa.size() < 1) throw DomainError("kappa and gradient sizes differ");
    PointEstimate out;
    auto& c = out.constants;
    c.a = a;
    c.eta = eta_of(a);
    c.kappa1 = kappa[0];
    c.nu_at_max = nu;
    c.kappa1_threshold = kappa1_threshold(a);
    c.lambda = c.kappa1 > 0.0 ? c.eta / c.kappa1 : std::numeric_limits<double>::infinity();
    c.window = std::isfinite(c.lambda) ? theta_window(a, c.lambda) : ThetaWindow{};
    if (c.window.theta) {
        c.theta = c.window.theta;
        c.mu = (*c.theta + c.lambda) / (1.0 + c.lambda);
    }
    auto& s = out.sets;
    s.split = c.theta.has_value();
    const double f1 = grad[0];
    for (int i = 0; i < kappa.size(); ++i) {
        if (kappa[i] <= -c.eta) {
            s.Neg.push_back(i);
        } else if (kappa[i] < nu) {
            s.middle.push_back(i);
            if (s.split) (*c.theta * grad[i] < f1 ? s.J : s.L).push_back(i);
        }
    }
    return out;
}

EstimateReport estimate_constants(const solver::GraphSolution& solution) {
    const auto& disc = *solution.discretization;
    const auto& nodes = disc.interior_nodes();
    double min_nu = 1.0;
    for (const auto& j : solution.jets) min_nu = std::min(min_nu, j.nu_vertical);
    for (const auto& [i, j] : solution.boundary_jets) min_nu = std::min(min_nu, j.nu_vertical);
    const double a = 0.5 * min_nu;

    double best = -std::numeric_limits<double>::infinity();
    const hypgeom::PointJet* at = nullptr;
    std::size_t node = 0;
    bool on_boundary = false;
    auto consider = [&](std::size_t i, const hypgeom::PointJet& jet, bool boundary) {
        const double d = jet.nu_vertical - a;
        if (!(d > 0.0)) return;
        const double v = jet.kappa[0] / d;
        if (v > best) {
            best = v;
            at = &jet;
            node = i;
            on_boundary = boundary;
        }
    };
    for (std::size_t j = 0; j < solution.jets.size(); ++j) consider(nodes[j], solution.jets[j], false);
    for (const auto& [i, j] : solution.boundary_jets) consider(i, j, true);
    if (at == nullptr) throw DomainError("no grid point with nu^{n+1} > a");

    if (!on_boundary)
        for (const auto& tap : disc.stencil(node))
            if (tap.node == solver::kBoundaryValue || disc.is_boundary(static_cast<std::size_t>(tap.node)))
                on_boundary = true;

    const Eigen::VectorXd grad = symfunc::grad_f(solution.spec, symfunc::Kappa(at->kappa));
    PointEstimate pe = estimate_at(at->kappa, grad, at->nu_vertical, a);
    EstimateReport rep;
    rep.constants = pe.constants;
    rep.constants.M0 = best;
    rep.sets = std::move(pe.sets);
    rep.max_node = node;
    rep.boundary_attained = on_boundary;
    rep.label = on_boundary ? "boundary-attained maximum (interior analysis not applicable)" : "interior maximum";
    if (!rep.constants.window.nonempty) rep.label += "; theta-window empty (kappa_1 below threshold)";
    return rep;
}

bool AlgebraReport::pass() const {
    return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
}

const symfunc::ConditionRecord* AlgebraReport::find(const std::string& id) const {
    for (const auto& r : records)
        if (r.id == id) return &r;
    return nullptr;
}

namespace {

struct Tally {
    symfunc::ConditionRecord rec;
    explicit Tally(std::string id, double tol, std::string note = {}) {
        rec.id = std::move(id);
        rec.tolerance = tol;
        rec.worst_margin = std::numeric_limits<double>::infinity();
        rec.note = std::move(note);
    }
    void add(double margin) {
        ++rec.samples;
        if (!(margin >= -rec.tolerance)) ++rec.violations;
        if (!(margin >= rec.worst_margin)) rec.worst_margin = margin;
    }
    symfunc::ConditionRecord done() {
        rec.pass = rec.violations == 0 && rec.samples > 0;
        return rec;
    }
};

// Left side of (ii): (a - 2mu/a) k^2 + (4mu/a) k nu + a - (2mu/a) nu^2.
double lhs_ii(double a, double mu, double nu, double k) {
    return (a - 2.0 * mu / a) * k * k + 4.0 * mu / a * k * nu + a - 2.0 * mu / a * nu * nu;
}

double rhs_ii(double a, double k) { return 0.5 * a * k * k + a * a * k + 0.5 * a; }

}  // namespace

AlgebraReport algebraic_subinequalities(std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw DomainError("algebraic checks need at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto draw_a = [&] { return 0.5 * (1.0 - U(rng)); };  // (0, 1/2]
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, U(rng)); };

    AlgebraReport rep;
    rep.seed = seed;
    rep.samples = samples;

    Tally t1("i", 1e-12, "a k^2 + 2k - 2 >= 0 for k <= -eta(a); margin scaled by 1 + a k^2");
    Tally t2("ii", 1e-12, "(a-2mu/a)k^2 + (4mu/a)k nu + a - (2mu/a)nu^2 >= (a/2)k^2 + a^2 k + a/2; margin / (1+k^2)");
    Tally t2p("ii.positive", 1e-12, "left side of (ii) > 0 for mu in [a^2/8, a^2/4]; margin / (1+k^2)");
    Tally t2l("ii.mu_low", 1e-12, "bound of (ii) at mu = a^2/8; margin / (1+k^2)");
    Tally t3("iii", 0.0, "a^2 - a^4 > 0 and (a/2)k^2 + a^2 k + a/2 > 0");
    Tally t4("iv", 1e-12, "window nonempty iff kappa_1 > eta(8-a^2)/a^2; mu in [a^2/8, a^2/4] (scaled by a^2)");
    Tally te("eta.root", 1e-10, "|a eta^2 - 2 eta - 2| relative to max(1, 2 eta + 2)");

    for (std::size_t s = 0; s < samples; ++s) {
        // (i) at the root and beyond it
        {
            const double a = draw_a();
            const double eta = eta_of(a);
            const double k = (s % 10 == 0) ? -eta : -eta - log_uniform(1e-6, 1e3);
            t1.add((a * k * k + 2.0 * k - 2.0) / (1.0 + a * k * k));
        }
        // (ii) and its companions
        {
            const double a = draw_a();
            const double eta = eta_of(a);
            const double mu = a * a * (0.125 + 0.125 * U(rng));
            const double nu = 2.0 * a + (1.0 - 2.0 * a) * U(rng);
            const double k = (s % 2 == 0) ? -eta + (nu + eta) * U(rng) : -10.0 * eta - 10.0 + (20.0 + 10.0 * eta) * U(rng);
            const double scale = 1.0 + k * k;
            t2.add((lhs_ii(a, mu, nu, k) - rhs_ii(a, k)) / scale);
            t2p.add(lhs_ii(a, mu, nu, k) / scale);
            t2l.add((lhs_ii(a, a * a / 8.0, nu, k) - rhs_ii(a, k)) / scale);
        }
        // (iii)
        {
            const double a = draw_a();
            const double k = -5.0 + 10.0 * U(rng);
            t3.add(std::min(a * a - std::pow(a, 4), rhs_ii(a, k) / (1.0 + k * k)));
        }
        // (iv): draw kappa_1 log-uniformly around the threshold
        {
            const double a = draw_a();
            const double eta = eta_of(a);
            const double thr = kappa1_threshold(a);
            const double k1 = thr * std::exp(-3.0 + 6.0 * U(rng));
            const double lambda = eta / k1;
            const ThetaWindow w = theta_window(a, lambda);
            const bool predicted = k1 > thr;
            double margin = 0.0;
            if (w.nonempty != predicted && std::abs(k1 / thr - 1.0) > 1e-12) margin = -1.0;
            if (w.nonempty) {
                const double mu = (*w.theta + lambda) / (1.0 + lambda);
                const double a2 = a * a;
                margin = std::min(margin, std::min(mu - a2 / 8.0, a2 / 4.0 - mu) / a2);
                if (!(*w.theta > 0.0 && *w.theta < 1.0 && mu > 0.0 && mu < 1.0)) margin = -1.0;
            }
            t4.add(margin);
        }
        {
            const double a = draw_a();
            const double eta = eta_of(a);
            te.add(-std::abs(a * eta * eta - 2.0 * eta - 2.0) / std::max(1.0, 2.0 * eta + 2.0));
        }
    }
    rep.records = {t1.done(), t2.done(), t2p.done(), t2l.done(), t3.done(), t4.done(), te.done()};
    return rep;
}

BoundStudy curvature_bound_study(const std::vector<CurvatureSample>& samples) {
    BoundStudy out;
    std::map<double, std::vector<std::pair<int, double>>> by_sigma;
    std::size_t converged = 0;
    for (const auto& s : samples) {
        if (!s.converged) continue;
        ++converged;
        by_sigma[s.sigma].emplace_back(s.resolution, s.kappa_max);
    }
    if (converged < 2) out.note = "fewer than two converged solutions; nothing to compare";
    for (auto it = by_sigma.rbegin(); it != by_sigma.rend(); ++it) {
        BoundGroup g;
        g.sigma = it->first;
        g.levels = it->second;
        std::sort(g.levels.begin(), g.levels.end());
        const std::size_t m = g.levels.size();
        if (m >= 2) {
            const double k1 = g.levels[m - 2].second, k2 = g.levels[m - 1].second;
            g.drift = std::abs(k2 - k1) / std::max(std::abs(k2), std::numeric_limits<double>::min());
            g.stable = *g.drift <= 0.01;
            for (std::size_t j = 1; j < m; ++j)
                if (g.levels[j - 1].second > 0.0 && g.levels[j].second >= 1.5 * g.levels[j - 1].second) g.diverging = true;
        }
        out.any_diverging = out.any_diverging || g.diverging;
        out.all_stable = out.all_stable && g.stable;
        out.groups.push_back(std::move(g));
    }
    return out;
}

std::vector<CurvatureSample> samples_from(const solver::RefineTable& table, double sigma) {
    std::vector<CurvatureSample> out;
    for (const auto& r : table.rows) out.push_back({sigma, r.resolution, r.kappa_max, r.converged});
    return out;
}

}  // namespace hyplateau::verify
