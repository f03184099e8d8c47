#include "hyplateau/solver.hpp"

#include "hyplateau/errors.hpp"
#include "parallel.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace hyplateau::solver {

std::string to_string(JacobianMode mode) {
    return mode == JacobianMode::FiniteDifference ? "finite_difference" : "analytic_Fij";
}

JacobianMode jacobian_mode_from_string(const std::string& name) {
    if (name == "finite_difference" || name == "finite-difference" || name == "fd") return JacobianMode::FiniteDifference;
    if (name == "analytic_Fij" || name == "analytic-fij" || name == "analytic") return JacobianMode::AnalyticFij;
    throw DomainError("unknown jacobian mode '" + name + "'");
}

std::vector<double> sigma_schedule(double start, double target, double step) {
    if (!(step > 0.0)) throw DomainError("sigma step must be positive");
    std::vector<double> out{start};
    if (std::abs(target - start) < 1e-12) return {target};
    const double dir = target > start ? 1.0 : -1.0;
    for (int j = 1;; ++j) {
        const double s = start + dir * step * j;
        if (dir * (target - s) <= 1e-12) break;
        out.push_back(s);
    }
    out.push_back(target);
    return out;
}

std::vector<double> epsilon_schedule(double max, double min, double factor) {
    if (!(min > 0.0) || !(max >= min)) throw DomainError("epsilon schedule needs 0 < min <= max");
    if (!(factor > 0.0 && factor < 1.0)) throw DomainError("epsilon factor must lie in (0, 1)");
    const int J = static_cast<int>(std::floor(std::log(max / min) / std::log(1.0 / factor) + 1e-9));
    std::vector<double> out;
    for (int j = J; j >= 0; --j) out.push_back(min * std::pow(factor, -j));
    if (out.front() < max * (1.0 - 1e-12)) out.insert(out.begin(), max);
    return out;
}

double SolverConfig::tolerance() const {
    if (newton_tol) return *newton_tol;
    return grid_kind == GridKind::Radial ? 1e-10 : 1e-8;
}

std::vector<double> SolverConfig::sigmas() const {
    if (!sigma_schedule.empty()) return sigma_schedule;
    return solver::sigma_schedule(sigma_start, sigma_target, sigma_step);
}

std::vector<double> SolverConfig::epsilons() const {
    if (!epsilon_schedule.empty()) return epsilon_schedule;
    return solver::epsilon_schedule(epsilon_max, epsilon_min, epsilon_factor);
}

namespace {

bool strictly_monotone(const std::vector<double>& v) {
    if (v.size() < 2) return true;
    const bool up = v[1] > v[0];
    for (std::size_t i = 1; i < v.size(); ++i)
        if (up ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
    return true;
}

}  // namespace

void SolverConfig::validate() const {
    std::vector<std::string> bad;
    if (!(sigma_target > 0.0 && sigma_target < 1.0)) bad.push_back("sigma_target must lie in (0, 1)");
    if (spec.n() != domain.n()) bad.push_back("curvature spec dimension differs from the domain dimension");
    if (grid_kind == GridKind::Radial && !domain.is_ball()) bad.push_back("radial grids need a ball domain");
    if (grid_kind == GridKind::Tensor && domain.n() != 2) bad.push_back("tensor grids are planar (n = 2)");
    if (resolution < 4) bad.push_back("resolution must be at least 4");
    if (max_newton_iters < 1) bad.push_back("max_newton_iters must be positive");
    if (!(damping > 0.0 && damping < 1.0)) bad.push_back("damping must lie in (0, 1)");
    if (max_halvings < 0 || max_bisections < 0) bad.push_back("halving and bisection limits must be non-negative");
    if (threads < 1) bad.push_back("threads must be at least 1");
    if (newton_tol && !(*newton_tol > 0.0)) bad.push_back("newton_tol must be positive");
    try {
        const auto s = sigmas();
        if (!strictly_monotone(s)) bad.push_back("sigma schedule must be strictly monotone");
        for (double x : s)
            if (!(x > 0.0 && x < 1.0)) {
                bad.push_back("sigma schedule values must lie in (0, 1)");
                break;
            }
        if (!s.empty() && std::abs(s.back() - sigma_target) > 1e-14) bad.push_back("sigma schedule must end at sigma_target");
    } catch (const DomainError& e) {
        bad.push_back(e.what());
    }
    try {
        const auto e = epsilons();
        if (e.empty()) bad.push_back("epsilon schedule is empty");
        if (!strictly_monotone(e) || (e.size() > 1 && e[1] > e[0])) bad.push_back("epsilon schedule must be strictly decreasing");
        for (double x : e)
            if (!(x > 0.0)) {
                bad.push_back("epsilon values must be positive");
                break;
            }
    } catch (const DomainError& e) {
        bad.push_back(e.what());
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "invalid solver config:";
        for (const auto& b : bad) os << "\n  - " << b;
        throw DomainError(os.str());
    }
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

namespace {

// f(kappa(jet)) - sigma at an interior node, or nullopt outside the cone.
std::optional<double> node_residual(const Discretization& disc, std::size_t i, const Slots& s,
                                    const symfunc::CurvatureSpec& spec, double sigma) {
    if (!(s[0] > 0.0)) return std::nullopt;
    try {
        const auto jet = disc.jet(i, s);
        return symfunc::eval_f(spec, symfunc::Kappa(jet.kappa)) - sigma;
    } catch (const AdmissibilityError&) {
        return std::nullopt;
    } catch (const DegenerateHeight&) {
        return std::nullopt;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

}  // namespace

std::vector<double> residual(const Discretization& disc, std::span<const Height> u,
                             const symfunc::CurvatureSpec& spec, double sigma, double epsilon, int threads) {
    if (u.size() != disc.size()) throw DomainError("grid function has the wrong length");
    std::vector<double> r(disc.size());
    const std::size_t chunks = detail::chunk_count(disc.size(), threads);
    std::vector<std::vector<std::size_t>> bad(chunks);
    detail::parallel_chunks(disc.size(), threads, [&](std::size_t b, std::size_t e, std::size_t c) {
        for (std::size_t i = b; i < e; ++i) {
            if (disc.is_boundary(i)) {
                r[i] = static_cast<double>(u[i] - static_cast<Height>(epsilon));
                continue;
            }
            const auto v = node_residual(disc, i, disc.slots(i, u, epsilon), spec, sigma);
            if (v) r[i] = *v;
            else bad[c].push_back(i);
        }
    });
    std::vector<std::size_t> nodes;
    for (auto& b : bad) nodes.insert(nodes.end(), b.begin(), b.end());
    if (!nodes.empty()) {
        std::ostringstream os;
        os << nodes.size() << " interior node(s) outside K_" << spec.cone_index() << ", first node " << nodes.front();
        throw AdmissibilityLost(os.str(), std::move(nodes));
    }
    return r;
}

double Jacobian::entry(std::size_t row, std::size_t col) const {
    double v = 0.0;
    for (std::size_t m = 0; m < values.size(); ++m)
        if (rows[m] == row && cols[m] == col) v += values[m];
    return v;
}

Jacobian assemble_jacobian(const Discretization& disc, std::span<const Height> u, const symfunc::CurvatureSpec& spec,
                           double sigma, double epsilon, JacobianMode mode, int threads) {
    const std::size_t N = disc.size();
    const std::size_t chunks = detail::chunk_count(N, threads);
    struct Part {
        std::vector<std::size_t> rows, cols;
        std::vector<double> values;
        std::vector<std::size_t> bad;
    };
    std::vector<Part> parts(chunks);
    const int slots_used = disc.slot_count();

    detail::parallel_chunks(N, threads, [&](std::size_t b, std::size_t e, std::size_t c) {
        Part& part = parts[c];
        for (std::size_t i = b; i < e; ++i) {
            auto push = [&](std::size_t col, double v) {
                part.rows.push_back(i);
                part.cols.push_back(col);
                part.values.push_back(v);
            };
            if (disc.is_boundary(i)) {
                push(i, 1.0);
                continue;
            }
            const Slots base = disc.slots(i, u, epsilon);
            const auto taps = disc.stencil(i);
            if (mode == JacobianMode::AnalyticFij) {
                Slots g{};
                try {
                    g = disc.residual_gradient(i, base, spec);
                } catch (const Error&) {
                    part.bad.push_back(i);
                    continue;
                }
                for (const Tap& tap : taps) {
                    if (tap.node == kBoundaryValue) continue;
                    double v = 0.0;
                    for (int m = 0; m < slots_used; ++m) v += g[m] * tap.weight[m];
                    push(static_cast<std::size_t>(tap.node), v);
                }
                continue;
            }
            // Perturb one nodal value at a time; only this row's slots change.
            const auto r0 = node_residual(disc, i, base, spec, sigma);
            if (!r0) {
                part.bad.push_back(i);
                continue;
            }
            for (const Tap& tap : taps) {
                if (tap.node == kBoundaryValue) continue;
                const auto q = static_cast<std::size_t>(tap.node);
                // Size the perturbation by its effect on the slots: a 1/h^2 weight turns a naive
                // 1e-7 nodal step into an O(0.1) change of the second derivative.
                double wmax = 1.0;
                for (int m = 0; m < slots_used; ++m) wmax = std::max(wmax, std::abs(tap.weight[m]));
                const double delta = 1e-6 * std::max(1.0, std::abs(static_cast<double>(u[q]))) / wmax;
                Slots plus = base, minus = base;
                for (int m = 0; m < slots_used; ++m) {
                    plus[m] += delta * tap.weight[m];
                    minus[m] -= delta * tap.weight[m];
                }
                const auto rp = node_residual(disc, i, plus, spec, sigma);
                const auto rm = node_residual(disc, i, minus, spec, sigma);
                double v;
                if (rp && rm) v = (*rp - *rm) / (2.0 * delta);
                else if (rp) v = (*rp - *r0) / delta;
                else if (rm) v = (*r0 - *rm) / delta;
                else {
                    part.bad.push_back(i);
                    break;
                }
                push(q, v);
            }
        }
    });

    Jacobian J;
    J.size = N;
    std::vector<std::size_t> bad;
    for (auto& p : parts) {
        J.rows.insert(J.rows.end(), p.rows.begin(), p.rows.end());
        J.cols.insert(J.cols.end(), p.cols.begin(), p.cols.end());
        J.values.insert(J.values.end(), p.values.begin(), p.values.end());
        bad.insert(bad.end(), p.bad.begin(), p.bad.end());
    }
    if (!bad.empty()) throw AdmissibilityLost("Jacobian requested at an inadmissible state", std::move(bad));
    return J;
}

namespace {

Eigen::SparseMatrix<double> to_sparse(const Jacobian& J) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(J.values.size());
    for (std::size_t m = 0; m < J.values.size(); ++m)
        t.emplace_back(static_cast<int>(J.rows[m]), static_cast<int>(J.cols[m]), J.values[m]);
    Eigen::SparseMatrix<double> A(static_cast<int>(J.size), static_cast<int>(J.size));
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    return A;
}

}  // namespace

NewtonStepResult newton_step(const Discretization& disc, std::span<const Height> u, double sigma, double epsilon,
                             const SolverConfig& config) {
    const auto& spec = config.spec;
    const std::vector<double> r = residual(disc, u, spec, sigma, epsilon, config.threads);
    const double r0 = sup_norm(r);

    const Jacobian J = assemble_jacobian(disc, u, spec, sigma, epsilon, config.jacobian_mode, config.threads);
    const Eigen::SparseMatrix<double> A = to_sparse(J);
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw SingularJacobian("sparse LU factorization failed: " + lu.lastErrorMessage());
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    const Eigen::VectorXd delta = lu.solve(-rv);
    if (lu.info() != Eigen::Success || !delta.allFinite()) throw SingularJacobian("linear solve failed");

    NewtonStepResult out;
    if (r0 == 0.0) {
        out.u.assign(u.begin(), u.end());
        return out;
    }
    double t = 1.0;
    Heights trial(u.size());
    for (int h = 0; h <= config.max_halvings; ++h) {
        // Dirichlet rows are identity rows; set them exactly instead of through the LU solve
        for (std::size_t i = 0; i < u.size(); ++i)
            trial[i] = disc.is_boundary(i) ? static_cast<Height>(epsilon)
                                           : u[i] + static_cast<Height>(t * delta[static_cast<Eigen::Index>(i)]);
        try {
            const double rn = sup_norm(residual(disc, trial, spec, sigma, epsilon, config.threads));
            if (rn < r0) {
                out.u = trial;
                out.step_norm = t * delta.lpNorm<Eigen::Infinity>();
                out.residual_norm = rn;
                out.halvings = h;
                return out;
            }
        } catch (const AdmissibilityLost&) {
            ++out.admissibility_backtracks;
        }
        t *= config.damping;
    }
    std::ostringstream os;
    os << "line search exhausted " << config.max_halvings << " halvings at residual " << r0 << " (sigma " << sigma
       << ", epsilon " << epsilon << ")";
    throw NonConvergence(os.str());
}

NewtonSolveResult newton_solve(const Discretization& disc, Heights u, double sigma, double epsilon,
                               const SolverConfig& config) {
    for (std::size_t i = 0; i < u.size(); ++i)
        if (disc.is_boundary(i)) u[i] = static_cast<Height>(epsilon);
    const double tol = config.tolerance();
    NewtonSolveResult out;
    double rn = sup_norm(residual(disc, u, config.spec, sigma, epsilon, config.threads));
    while (rn > tol) {
        if (out.iterations >= config.max_newton_iters) {
            std::ostringstream os;
            os << "no convergence in " << config.max_newton_iters << " Newton iterations (residual " << rn << ")";
            throw NonConvergence(os.str());
        }
        auto step = newton_step(disc, u, sigma, epsilon, config);
        u = std::move(step.u);
        rn = step.residual_norm;
        out.admissibility_backtracks += step.admissibility_backtracks;
        ++out.iterations;
    }
    out.u = std::move(u);
    out.residual_norm = rn;
    return out;
}

Heights cap_initializer(const Discretization& disc, double sigma, double epsilon) {
    const auto& dom = disc.domain();
    const double b = dom.inscribed_radius();
    const auto cap = hypgeom::make_cap(b, sigma, epsilon);
    Heights u(disc.size(), epsilon);
    for (std::size_t i = 0; i < disc.size(); ++i) {
        if (disc.is_boundary(i)) continue;
        const Eigen::VectorXd& x = disc.position(i);
        double s;  // radius of x's level set, measured in the inscribed-ball scale
        if (const auto* e = std::get_if<hypgeom::Ellipse>(&dom.shape())) {
            const double p = x[0] / e->a_axis, q = x[1] / e->b_axis;
            s = b * std::sqrt(p * p + q * q);
        } else {
            s = x.norm();
        }
        u[i] = std::max(epsilon, cap.height(std::min(s, b)));
    }
    return u;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Marched {
    Heights u;
    int iterations = 0;
    int bisections = 0;
    double residual = 0.0;
    std::size_t backtracks = 0;
};

// Moves a converged state from parameter value `from` to `to`, halving the step on failure.
// `solve(u, value)` Newton-solves at the given parameter value from the predictor `u`.
template <class Predict>
Marched march(Heights u, double from, double to, int max_bisections, Predict&& predict_and_solve) {
    Marched out;
    double current = from;
    double step = to - from;
    while (current != to) {
        double next = current + step;
        if ((step > 0.0 && next > to) || (step < 0.0 && next < to) || std::abs(to - next) < 1e-15) next = to;
        try {
            NewtonSolveResult r = predict_and_solve(u, current, next);
            u = std::move(r.u);
            out.iterations += r.iterations;
            out.residual = r.residual_norm;
            out.backtracks += r.admissibility_backtracks;
            current = next;
        } catch (const NonConvergence&) {
            if (++out.bisections > max_bisections) throw;
            step *= 0.5;
        } catch (const SingularJacobian&) {
            if (++out.bisections > max_bisections) throw;
            step *= 0.5;
        } catch (const AdmissibilityLost&) {
            if (++out.bisections > max_bisections) throw;
            step *= 0.5;
        }
    }
    out.u = std::move(u);
    return out;
}

Heights shift_predictor(const Discretization& disc, const Heights& u, double eps_old, double eps_new) {
    Heights v(u.size());
    const Height shift = static_cast<Height>(eps_new) - static_cast<Height>(eps_old);
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = disc.is_boundary(i) ? static_cast<Height>(eps_new) : u[i] + shift;
    return v;
}

Marched march_sigma(const Discretization& disc, Heights u, double from, double to, double epsilon,
                    const SolverConfig& config) {
    return march(std::move(u), from, to, config.max_bisections,
                 [&](const Heights& start, double, double s) {
                     return newton_solve(disc, start, s, epsilon, config);
                 });
}

Marched march_epsilon(const Discretization& disc, Heights u, double from, double to, double sigma,
                      const SolverConfig& config) {
    return march(std::move(u), from, to, config.max_bisections,
                 [&](const Heights& start, double e_old, double e_new) {
                     return newton_solve(disc, shift_predictor(disc, start, e_old, e_new), sigma, e_new, config);
                 });
}

double center_value(const Discretization& disc, const Heights& u) { return static_cast<double>(u[disc.center_node()]); }

}  // namespace

std::optional<double> richardson_epsilon(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 3) return std::nullopt;
    const auto& [e1, u1] = samples[samples.size() - 3];
    const auto& [e2, u2] = samples[samples.size() - 2];
    const auto& [e3, u3] = samples[samples.size() - 1];
    auto ratio_two = [](double big, double small) { return std::abs(big / small - 2.0) < 1e-9; };
    if (!ratio_two(e1, e2) || !ratio_two(e2, e3)) return std::nullopt;
    // Eliminate the O(eps) and O(eps^2) terms.
    const double a = 2.0 * u2 - u1;
    const double b = 2.0 * u3 - u2;
    return (4.0 * b - a) / 3.0;
}

void finalize_solution(GraphSolution& sol) {
    const Discretization& disc = *sol.discretization;
    auto& rep = sol.report;
    sol.jets.clear();
    sol.boundary_jets.clear();
    rep.kappa_max = -std::numeric_limits<double>::infinity();
    rep.boundary_kappa_max = -std::numeric_limits<double>::infinity();
    rep.min_nu_vertical = 1.0;
    rep.admissibility_violations = 0;
    const int cone = sol.spec.cone_index();
    for (std::size_t i : disc.interior_nodes()) {
        auto jet = disc.jet_at(i, sol.u, sol.epsilon);
        if (!symfunc::cone_contains(symfunc::Kappa(jet.kappa), cone)) ++rep.admissibility_violations;
        rep.kappa_max = std::max(rep.kappa_max, jet.kappa[0]);
        rep.min_nu_vertical = std::min(rep.min_nu_vertical, jet.nu_vertical);
        bool touches_boundary = false;
        for (const Tap& tap : disc.stencil(i))
            if (tap.node == kBoundaryValue || disc.is_boundary(static_cast<std::size_t>(tap.node))) touches_boundary = true;
        if (touches_boundary && disc.kind() == GridKind::Tensor)
            rep.boundary_kappa_max = std::max(rep.boundary_kappa_max, jet.kappa[0]);
        sol.jets.push_back(std::move(jet));
    }
    for (std::size_t i = 0; i < disc.size(); ++i) {
        if (!disc.is_boundary(i)) continue;
        if (auto bj = disc.boundary_jet(i, sol.u)) {
            rep.boundary_kappa_max = std::max(rep.boundary_kappa_max, bj->kappa[0]);
            sol.boundary_jets.emplace_back(i, std::move(*bj));
        }
    }
    if (!std::isfinite(rep.boundary_kappa_max)) rep.boundary_kappa_max = rep.kappa_max;
    rep.u_center = center_value(disc, sol.u);
    rep.below_classical_threshold = sol.sigma < kClassicalSigmaThreshold;
    rep.newton_tol = std::max(rep.newton_tol, 0.0);
}

namespace {

GraphSolution package(const SolverConfig& config, std::shared_ptr<const Discretization> disc, Heights u,
                      double sigma, double epsilon, SolveReport report) {
    GraphSolution sol;
    sol.domain = config.domain;
    sol.spec = config.spec;
    sol.sigma = sigma;
    sol.epsilon = epsilon;
    sol.discretization = std::move(disc);
    sol.u = std::move(u);
    sol.report = std::move(report);
    sol.report.newton_tol = config.tolerance();
    sol.report.final_residual =
        sup_norm(residual(*sol.discretization, sol.u, sol.spec, sigma, epsilon, config.threads));
    finalize_solution(sol);
    sol.report.converged = sol.report.final_residual <= sol.report.newton_tol && sol.report.admissibility_violations == 0;
    return sol;
}

void record(SolveReport& rep, const char* parameter, double sigma, double epsilon, const Marched& m) {
    ContinuationStep step;
    step.parameter = parameter;
    step.sigma = sigma;
    step.epsilon = epsilon;
    step.iterations = m.iterations;
    step.residual = m.residual;
    step.bisections = m.bisections;
    rep.steps.push_back(step);
    rep.total_iterations += m.iterations;
    rep.admissibility_backtracks += m.backtracks;
}

}  // namespace

GraphSolution continuation_solve(const SolverConfig& config) {
    config.validate();
    const auto t0 = Clock::now();
    auto disc = make_discretization(config.domain, config.grid_kind, config.resolution);
    const auto sigmas = config.sigmas();
    const auto epsilons = config.epsilons();
    SolveReport rep;

    Heights u = cap_initializer(*disc, sigmas.front(), epsilons.front());
    try {
        (void)residual(*disc, u, config.spec, sigmas.front(), epsilons.front(), config.threads);
    } catch (const AdmissibilityLost& e) {
        throw AdmissibilityLost("no admissible initializer: " + std::string(e.what()), e.nodes());
    }

    {
        const auto first = newton_solve(*disc, u, sigmas.front(), epsilons.front(), config);
        u = first.u;
        Marched m;
        m.iterations = first.iterations;
        m.residual = first.residual_norm;
        m.backtracks = first.admissibility_backtracks;
        record(rep, "sigma", sigmas.front(), epsilons.front(), m);
    }
    for (std::size_t j = 1; j < sigmas.size(); ++j) {
        auto m = march_sigma(*disc, std::move(u), sigmas[j - 1], sigmas[j], epsilons.front(), config);
        u = std::move(m.u);
        record(rep, "sigma", sigmas[j], epsilons.front(), m);
    }
    const double sigma = sigmas.back();
    rep.center_by_epsilon.emplace_back(epsilons.front(), center_value(*disc, u));
    for (std::size_t j = 1; j < epsilons.size(); ++j) {
        auto m = march_epsilon(*disc, std::move(u), epsilons[j - 1], epsilons[j], sigma, config);
        u = std::move(m.u);
        record(rep, "epsilon", sigma, epsilons[j], m);
        rep.center_by_epsilon.emplace_back(epsilons[j], center_value(*disc, u));
    }
    rep.u_center_extrapolated = richardson_epsilon(rep.center_by_epsilon);
    GraphSolution sol = package(config, disc, std::move(u), sigma, epsilons.back(), std::move(rep));
    sol.report.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    return sol;
}

GraphSolution continue_to_sigma(const GraphSolution& from, double sigma, const SolverConfig& config) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("sigma must lie in (0, 1)");
    const auto t0 = Clock::now();
    const Discretization& disc = *from.discretization;
    SolveReport rep;
    auto m = march_sigma(disc, from.u, from.sigma, sigma, from.epsilon, config);
    record(rep, "sigma", sigma, from.epsilon, m);
    Heights u = std::move(m.u);
    rep.center_by_epsilon.emplace_back(from.epsilon, center_value(disc, u));
    GraphSolution sol = package(config, from.discretization, std::move(u), sigma, from.epsilon, std::move(rep));
    sol.report.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    return sol;
}

namespace {

// u(0) extrapolated to epsilon -> 0 from a converged solution at its epsilon, 2 epsilon and 4 epsilon.
std::optional<double> extrapolated_center(const GraphSolution& sol, const SolverConfig& config) {
    const Discretization& disc = *sol.discretization;
    std::vector<std::pair<double, double>> samples;
    try {
        Heights u = sol.u;
        double eps = sol.epsilon;
        for (int j = 0; j < 2; ++j) {
            auto m = march_epsilon(disc, std::move(u), eps, 2.0 * eps, sol.sigma, config);
            u = std::move(m.u);
            eps *= 2.0;
            samples.emplace(samples.begin(), eps, center_value(disc, u));
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    samples.emplace_back(sol.epsilon, sol.report.u_center);
    return richardson_epsilon(samples);
}

SweepRow row_from(const GraphSolution& sol, const SolverConfig& config) {
    SweepRow row;
    row.sigma = sol.sigma;
    row.converged = sol.report.converged;
    const auto ex = extrapolated_center(sol, config);
    row.u_center = ex.value_or(sol.report.u_center);
    row.u_max = static_cast<double>(*std::max_element(sol.u.begin(), sol.u.end()));
    row.kappa_max = sol.report.kappa_max;
    row.min_nu_vertical = sol.report.min_nu_vertical;
    row.iterations = sol.report.total_iterations;
    row.below_classical_threshold = sol.report.below_classical_threshold;
    row.status = sol.report.converged ? "converged" : "residual above tolerance";
    return row;
}

}  // namespace

std::vector<SweepRow> sweep_sigma(const SolverConfig& config, const std::vector<double>& sigmas,
                                  std::vector<GraphSolution>* solutions) {
    if (sigmas.empty()) throw DomainError("sweep needs at least one sigma");
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (!(sigmas[i] > 0.0 && sigmas[i] < 1.0)) throw DomainError("sweep sigmas must lie in (0, 1)");
        if (i > 0 && !(sigmas[i] < sigmas[i - 1])) throw DomainError("sweep sigmas must be sorted descending");
    }
    std::vector<SweepRow> rows;
    std::optional<GraphSolution> last;
    for (double s : sigmas) {
        try {
            GraphSolution sol;
            if (!last) {
                SolverConfig c = config;
                c.sigma_target = s;
                c.sigma_schedule.clear();
                sol = continuation_solve(c);
            } else {
                sol = continue_to_sigma(*last, s, config);
            }
            rows.push_back(row_from(sol, config));
            if (sol.report.converged) last = sol;
            if (solutions) solutions->push_back(std::move(sol));
        } catch (const Error& e) {
            SweepRow row;
            row.sigma = s;
            row.converged = false;
            row.below_classical_threshold = s < kClassicalSigmaThreshold;
            row.status = std::string("failed: ") + e.what();
            rows.push_back(row);
        }
    }
    return rows;
}

RefineTable refine_study(const SolverConfig& config, int levels) {
    if (levels < 2) throw DomainError("refine study needs at least 2 levels");
    RefineTable table;
    std::vector<std::optional<double>> errors;
    for (int L = 0; L < levels; ++L) {
        SolverConfig c = config;
        c.resolution = config.resolution << L;
        RefineRow row;
        row.resolution = c.resolution;
        try {
            const GraphSolution sol = continuation_solve(c);
            row.converged = sol.report.converged;
            row.u_center = sol.report.u_center;
            row.kappa_max = sol.report.kappa_max;
            row.status = row.converged ? "converged" : "residual above tolerance";
            if (config.domain.is_ball()) {
                const double R = config.domain.inscribed_radius();
                row.cap_error = std::abs(sol.report.u_center - hypgeom::make_cap(R, sol.sigma, sol.epsilon).apex());
            }
        } catch (const Error& e) {
            row.status = std::string("failed: ") + e.what();
        }
        table.rows.push_back(row);
    }
    const auto& rows = table.rows;
    const std::size_t m = rows.size();
    if (rows[m - 1].converged && rows[m - 2].converged) {
        if (rows[m - 1].cap_error && rows[m - 2].cap_error && *rows[m - 1].cap_error > 0.0)
            table.observed_order = std::log2(*rows[m - 2].cap_error / *rows[m - 1].cap_error);
        else if (m >= 3 && rows[m - 3].converged) {
            const double d1 = rows[m - 2].u_center - rows[m - 3].u_center;
            const double d2 = rows[m - 1].u_center - rows[m - 2].u_center;
            if (d2 != 0.0) table.observed_order = std::log2(std::abs(d1 / d2));
        }
        const double k1 = rows[m - 2].kappa_max, k2 = rows[m - 1].kappa_max;
        table.kappa_max_drift = std::abs(k2 - k1) / std::max(std::abs(k2), 1e-300);
    }
    return table;
}

}  // namespace hyplateau::solver
