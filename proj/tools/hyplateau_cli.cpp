// hyplateau: constant-curvature graphs in hyperbolic space.
//
// Exit status: 0 success, 1 a verification reported failures, 2 non-convergence,
// 3 admissibility lost, 4 configuration error.

#include "hyplateau/config.hpp"
#include "hyplateau/errors.hpp"
#include "hyplateau/hypgeom.hpp"
#include "hyplateau/serialize.hpp"
#include "hyplateau/solver.hpp"
#include "hyplateau/symfunc.hpp"
#include "hyplateau/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using namespace hyplateau;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitAdmissibility = 3;
constexpr int kExitConfig = 4;

struct Flags {
    std::string config;
    std::optional<std::string> family, shape, out, grid_kind, jacobian;
    std::optional<int> k, l, n, grid, threads, levels;
    std::optional<double> radius, b_axis, sigma, epsilon_min;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::vector<double> sigmas;
    std::vector<std::string> exports;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "flat-key JSON config file; flags override its values");
    cmd->add_option("--family", f.family, "consecutive-quotient | general-quotient | kth-root (default consecutive-quotient)");
    cmd->add_option("--k", f.k, "numerator index k (default 1)");
    cmd->add_option("--l", f.l, "denominator index l (general-quotient only)");
    cmd->add_option("--n", f.n, "dimension n (default 2)");
    cmd->add_option("--shape", f.shape, "ball | ellipse (default ball)");
    cmd->add_option("--radius", f.radius, "ball radius, or ellipse major semi-axis (default 1)");
    cmd->add_option("--b-axis", f.b_axis, "ellipse minor semi-axis");
    cmd->add_option("--sigma", f.sigma, "target curvature in (0, 1)");
    cmd->add_option("--sigmas", f.sigmas, "sweep curvatures, descending, comma separated")->delimiter(',');
    cmd->add_option("--grid", f.grid, "intervals: across the radius (radial, default 1024) or long axis (tensor, default 64)");
    cmd->add_option("--grid-kind", f.grid_kind, "radial | tensor (default radial for balls)");
    cmd->add_option("--epsilon-min", f.epsilon_min, "smallest boundary height (default 1e-3)");
    cmd->add_option("--jacobian", f.jacobian, "finite_difference | analytic_Fij (default finite_difference)");
    cmd->add_option("--levels", f.levels, "refinement levels (refine, default 3)");
    cmd->add_option("--samples", f.samples, "random samples for property checks (default 10000)");
    cmd->add_option("--seed", f.seed, "sampling seed (default 1)");
    cmd->add_option("--threads", f.threads, "threads for residual and Jacobian assembly (default 1)");
    cmd->add_option("--out", f.out, "output directory (default hyplateau-out)");
    cmd->add_option("--export", f.exports, "report-json,table-csv,mesh-obj (default report-json)")->delimiter(',');
}

cli::RunConfig resolve(const std::string& command, const Flags& f) {
    cli::RunConfig c;
    if (!f.config.empty()) cli::load_config_file(c, f.config);
    c.command = command;
    if (f.family) c.family = *f.family;
    if (f.k) c.k = *f.k;
    if (f.l) c.l = *f.l;
    if (f.n) c.n = *f.n;
    if (f.shape) c.shape = *f.shape;
    if (f.radius) {
        c.radius = *f.radius;
        if (c.shape == "ellipse") c.a_axis = *f.radius;
    }
    if (f.b_axis) c.b_axis = *f.b_axis;
    if (f.sigma) c.sigma = *f.sigma;
    if (!f.sigmas.empty()) c.sigmas = f.sigmas;
    if (f.grid) c.grid = *f.grid;
    if (f.grid_kind) c.grid_kind = *f.grid_kind;
    if (f.epsilon_min) {
        c.epsilon_min = *f.epsilon_min;
        c.epsilon_schedule.clear();
    }
    if (f.jacobian) c.jacobian = *f.jacobian;
    if (f.levels) c.levels = *f.levels;
    if (f.samples) c.samples = *f.samples;
    if (f.seed) c.seed = *f.seed;
    if (f.threads) c.threads = *f.threads;
    if (f.out) c.out = *f.out;
    if (!f.exports.empty()) c.exports = f.exports;
    return cli::validate_config(std::move(c));
}

bool wants(const cli::RunConfig& c, const std::string& format) {
    return std::find(c.exports.begin(), c.exports.end(), format) != c.exports.end();
}

void emit_report(const cli::RunConfig& c, json result, json timing = json::object()) {
    if (!wants(c, "report-json")) return;
    const fs::path path = fs::path(c.out) / (c.command + ".json");
    io::write_atomic(path, io::envelope(c.command, cli::to_json(c), std::move(result), std::move(timing)).dump(2) + "\n");
    std::cout << "wrote " << path.string() << "\n";
}

void emit_text(const cli::RunConfig& c, const std::string& format, const std::string& name, const std::string& text) {
    if (!wants(c, format)) return;
    const fs::path path = fs::path(c.out) / name;
    io::write_atomic(path, text);
    std::cout << "wrote " << path.string() << "\n";
}

void note_unused_exports(const cli::RunConfig& c, bool table, bool mesh) {
    if (wants(c, "table-csv") && !table) std::cerr << "note: table-csv does not apply to " << c.command << "\n";
    if (wants(c, "mesh-obj") && !mesh) std::cerr << "note: mesh-obj does not apply to " << c.command << "\n";
}

json solution_result(const solver::GraphSolution& sol) {
    json r;
    r["spec"] = io::to_json(sol.spec);
    r["domain"] = sol.domain.describe();
    r["sigma"] = sol.sigma;
    r["epsilon"] = sol.epsilon;
    r["grid_nodes"] = sol.discretization->size();
    r["statistics"] = io::statistics_json(sol.report);
    r["gradient_estimate"] = io::to_json(verify::gradient_estimate_check(sol));
    if (sol.discretization->kind() == solver::GridKind::Radial)
        r["nu_derivative_identity"] = io::to_json(hypgeom::check_lemma21_ii(sol));
    return r;
}

int run_verify_f(const cli::RunConfig& c) {
    note_unused_exports(c, false, false);
    const auto spec = cli::make_spec(c);
    const auto rep = symfunc::check_conditions(spec, c.samples, c.seed);
    json assumption;
    if (spec.family() == symfunc::Family::ConsecutiveQuotient) {
        assumption = {{"id", "1.3"},
                      {"measured_sup_gradient_sum", symfunc::sup_gradient_sum(spec, c.samples, c.seed)},
                      {"normalized_constant", symfunc::assumption_constant(spec)},
                      {"unnormalized_constant", spec.n() - spec.k() + 1}};
    } else {
        assumption = {{"id", "1.4"},
                      {"measured_sup_ratio", symfunc::sup_ratio_assumption(spec, c.samples, c.seed)},
                      {"bound", symfunc::assumption_constant(spec)}};
    }
    emit_report(c, {{"conditions", io::to_json(rep)}, {"assumption", assumption}});
    for (const auto& r : rep.records)
        std::printf("%-14s samples %-8zu violations %-6zu worst margin % .3e  %s\n", r.id.c_str(), r.samples,
                    r.violations, r.worst_margin, r.pass ? "pass" : "FAIL");
    return rep.pass() ? kExitOk : kExitVerifyFailed;
}

int run_solve(const cli::RunConfig& c) {
    note_unused_exports(c, false, true);
    const auto sol = solver::continuation_solve(cli::make_solver_config(c));
    emit_report(c, solution_result(sol), {{"wall_time_s", sol.report.wall_time_s}});
    if (c.n == 2) emit_text(c, "mesh-obj", "solve.obj", io::mesh_obj(sol));
    const auto& r = sol.report;
    std::printf("converged %s  residual %.3e  u(0) %.9f  extrapolated %s  kappa_max %.9f  min nu %.6f  %.2f s\n",
                r.converged ? "yes" : "no", r.final_residual, r.u_center,
                r.u_center_extrapolated ? std::to_string(*r.u_center_extrapolated).c_str() : "n/a", r.kappa_max,
                r.min_nu_vertical, r.wall_time_s);
    return r.converged ? kExitOk : kExitNonConvergence;
}

int run_sweep(const cli::RunConfig& c) {
    note_unused_exports(c, true, true);
    std::vector<solver::GraphSolution> sols;
    const auto rows = solver::sweep_sigma(cli::make_solver_config(c), c.sigmas, &sols);
    std::vector<verify::CurvatureSample> samples;
    for (const auto& r : rows) samples.push_back({r.sigma, *c.grid, r.kappa_max, r.converged});
    emit_report(c, {{"rows", io::to_json(rows)}, {"curvature_bounds", io::to_json(verify::curvature_bound_study(samples))}});
    emit_text(c, "table-csv", "sweep.csv", io::sweep_csv(rows));
    if (c.n == 2)
        for (const auto& s : sols) {
            char name[64];
            std::snprintf(name, sizeof name, "sweep_sigma_%.4f.obj", s.sigma);
            emit_text(c, "mesh-obj", name, io::mesh_obj(s));
        }
    bool all = true;
    for (const auto& r : rows) {
        std::printf("sigma %.4f  %-9s u(0) %.9f  kappa_max %.9f  min nu %.6f  iters %d%s\n", r.sigma,
                    r.converged ? "converged" : "FAILED", r.u_center, r.kappa_max, r.min_nu_vertical, r.iterations,
                    r.below_classical_threshold ? "  [below classical threshold]" : "");
        all = all && r.converged;
    }
    return all ? kExitOk : kExitNonConvergence;
}

int run_cap(const cli::RunConfig& c) {
    note_unused_exports(c, false, false);
    const auto cap = hypgeom::make_cap(c.radius, *c.sigma);
    emit_report(c, io::to_json(cap));
    std::printf("u(0) = %.7f  r = %.7f  c = %.7f\n", cap.apex(), cap.r, cap.c);
    return kExitOk;
}

int run_check_estimates(const cli::RunConfig& c) {
    note_unused_exports(c, false, true);
    const auto sol = solver::continuation_solve(cli::make_solver_config(c));
    const auto grad = verify::gradient_estimate_check(sol);
    const auto est = verify::estimate_constants(sol);
    const auto alg = verify::algebraic_subinequalities(c.samples, c.seed);
    json result = solution_result(sol);
    result["estimate"] = io::to_json(est);
    result["algebra"] = io::to_json(alg);
    emit_report(c, result, {{"wall_time_s", sol.report.wall_time_s}});
    if (c.n == 2) emit_text(c, "mesh-obj", "check-estimates.obj", io::mesh_obj(sol));
    std::printf("min nu %.6f vs sigma %.4f: %s\n", grad.min_nu_vertical, grad.sigma, grad.pass ? "pass" : "FAIL");
    std::printf("a %.6f  eta %.6f  kappa1 %.6f  M0 %.6f  threshold %.3f  window %s  (%s)\n", est.constants.a,
                est.constants.eta, est.constants.kappa1, est.constants.M0, est.constants.kappa1_threshold,
                est.constants.window.nonempty ? "nonempty" : "empty", est.label.c_str());
    for (const auto& r : alg.records)
        std::printf("%-12s samples %-8zu violations %-7zu worst margin % .3e  %s\n", r.id.c_str(), r.samples,
                    r.violations, r.worst_margin, r.pass ? "pass" : "FAIL");
    if (!sol.report.converged) return kExitNonConvergence;
    return grad.pass && alg.pass() ? kExitOk : kExitVerifyFailed;
}

int run_refine(const cli::RunConfig& c) {
    note_unused_exports(c, true, false);
    const auto table = solver::refine_study(cli::make_solver_config(c), c.levels);
    const auto bounds = verify::curvature_bound_study(verify::samples_from(table, *c.sigma));
    emit_report(c, {{"table", io::to_json(table)}, {"curvature_bounds", io::to_json(bounds)}});
    emit_text(c, "table-csv", "refine.csv", io::refine_csv(table));
    bool all = true;
    for (const auto& r : table.rows) {
        std::printf("grid %-6d %-9s u(0) %.10f  kappa_max %.9f  cap error %s\n", r.resolution,
                    r.converged ? "converged" : "FAILED", r.u_center, r.kappa_max,
                    r.cap_error ? std::to_string(*r.cap_error).c_str() : "n/a");
        all = all && r.converged;
    }
    if (table.observed_order) std::printf("observed order %.3f\n", *table.observed_order);
    if (table.kappa_max_drift) std::printf("kappa_max drift %.3e\n", *table.kappa_max_drift);
    return all ? kExitOk : kExitNonConvergence;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyplateau: constant-curvature hypersurfaces in hyperbolic space with prescribed asymptotic boundary\n"
                 "exit status: 0 ok, 1 verification failures, 2 non-convergence, 3 admissibility lost, 4 config error"};
    app.require_subcommand(1);
    Flags flags;
    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const cli::RunConfig&);
    };
    const Entry entries[] = {
        {"verify-f", "sample the structural conditions and assumption bounds of a curvature function", run_verify_f},
        {"solve", "solve the Dirichlet problem by continuation in sigma and epsilon", run_solve},
        {"sweep", "solve for descending sigmas with warm starts", run_sweep},
        {"cap", "closed-form umbilic cap on a ball", run_cap},
        {"check-estimates", "solve, then evaluate the curvature-estimate constants and algebra checks", run_check_estimates},
        {"refine", "grid refinement study: order and kappa_max stability", run_refine},
    };
    std::vector<CLI::App*> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_flags(sub, flags);
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return entries[i].run(resolve(entries[i].name, flags));
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const NonConvergence& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const SingularJacobian& e) {
        std::cerr << "non-convergence (singular Jacobian): " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const AdmissibilityLost& e) {
        std::cerr << "admissibility lost: " << e.what() << "\n";
        return kExitAdmissibility;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}
