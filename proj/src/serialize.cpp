#include "hyplateau/serialize.hpp"

#include "hyplateau/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace hyplateau::io {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& o) {
    return o ? json(*o) : json(nullptr);
}

}  // namespace

json to_json(const symfunc::CurvatureSpec& spec) {
    return {{"family", symfunc::to_string(spec.family())},
            {"n", spec.n()},
            {"k", spec.k()},
            {"l", spec.l()},
            {"cone_index", spec.cone_index()},
            {"description", spec.describe()}};
}

json to_json(const symfunc::ConditionRecord& r) {
    return {{"id", r.id},           {"samples", r.samples}, {"violations", r.violations},
            {"worst_margin", r.worst_margin}, {"tolerance", r.tolerance}, {"pass", r.pass},
            {"note", r.note}};
}

json to_json(const symfunc::ConditionReport& rep) {
    json records = json::array();
    for (const auto& r : rep.records) records.push_back(to_json(r));
    return {{"spec", to_json(rep.spec)},
            {"sample_cone", rep.sample_cone},
            {"sample_count", rep.sample_count},
            {"seed", rep.seed},
            {"epsilon0", rep.epsilon0},
            {"delta0", rep.delta0},
            {"R", rep.R},
            {"pass", rep.pass()},
            {"records", records}};
}

json to_json(const hypgeom::CapSolution& cap) {
    return {{"R", cap.R},
            {"sigma", cap.sigma},
            {"r", cap.r},
            {"c", cap.c},
            {"boundary_height", cap.boundary_height},
            {"u0", cap.apex()},
            {"closed_form_u0", cap.R * std::sqrt((1.0 - cap.sigma) / (1.0 + cap.sigma))}};
}

json to_json(const hypgeom::NuDerivativeCheck& c) {
    return {{"max_residual", c.max_residual}, {"nodes_checked", c.nodes_checked}, {"worst_node", c.worst_node}};
}

json statistics_json(const solver::SolveReport& r) {
    json steps = json::array();
    for (const auto& s : r.steps)
        steps.push_back({{"parameter", s.parameter},
                         {"sigma", s.sigma},
                         {"epsilon", s.epsilon},
                         {"iterations", s.iterations},
                         {"residual", s.residual},
                         {"bisections", s.bisections}});
    json centers = json::array();
    for (const auto& [e, u] : r.center_by_epsilon) centers.push_back({{"epsilon", e}, {"u_center", u}});
    return {{"converged", r.converged},
            {"final_residual", r.final_residual},
            {"newton_tol", r.newton_tol},
            {"total_iterations", r.total_iterations},
            {"kappa_max", r.kappa_max},
            {"boundary_kappa_max", r.boundary_kappa_max},
            {"min_nu_vertical", r.min_nu_vertical},
            {"admissibility_violations", r.admissibility_violations},
            {"admissibility_backtracks", r.admissibility_backtracks},
            {"u_center", r.u_center},
            {"u_center_extrapolated", opt(r.u_center_extrapolated)},
            {"center_by_epsilon", centers},
            {"below_classical_threshold", r.below_classical_threshold},
            {"steps", steps}};
}

json to_json(const verify::GradientEstimate& g) {
    return {{"min_nu_vertical", g.min_nu_vertical},
            {"sigma", g.sigma},
            {"tolerance", g.tolerance},
            {"worst_node", g.worst_node},
            {"pass", g.pass}};
}

json to_json(const verify::EstimateReport& rep) {
    const auto& c = rep.constants;
    return {{"a", c.a},
            {"eta", c.eta},
            {"kappa1", c.kappa1},
            {"lambda", c.lambda},
            {"nu_at_max", c.nu_at_max},
            {"M0", c.M0},
            {"kappa1_threshold", c.kappa1_threshold},
            {"theta_window", {{"lo", c.window.lo}, {"hi", c.window.hi}, {"nonempty", c.window.nonempty}}},
            {"theta", opt(c.theta)},
            {"mu", opt(c.mu)},
            {"J", rep.sets.J},
            {"L", rep.sets.L},
            {"Neg", rep.sets.Neg},
            {"middle", rep.sets.middle},
            {"split", rep.sets.split},
            {"max_node", rep.max_node},
            {"boundary_attained", rep.boundary_attained},
            {"label", rep.label}};
}

json to_json(const verify::AlgebraReport& rep) {
    json records = json::array();
    for (const auto& r : rep.records) records.push_back(to_json(r));
    return {{"seed", rep.seed}, {"samples", rep.samples}, {"pass", rep.pass()}, {"records", records}};
}

json to_json(const verify::BoundStudy& s) {
    json groups = json::array();
    for (const auto& g : s.groups) {
        json levels = json::array();
        for (const auto& [res, k] : g.levels) levels.push_back({{"resolution", res}, {"kappa_max", k}});
        groups.push_back({{"sigma", g.sigma},
                          {"levels", levels},
                          {"drift", opt(g.drift)},
                          {"stable", g.stable},
                          {"diverging", g.diverging}});
    }
    return {{"groups", groups}, {"any_diverging", s.any_diverging}, {"all_stable", s.all_stable}, {"note", s.note}};
}

json to_json(const solver::RefineTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"resolution", r.resolution},
                        {"converged", r.converged},
                        {"u_center", r.u_center},
                        {"kappa_max", r.kappa_max},
                        {"cap_error", opt(r.cap_error)},
                        {"status", r.status}});
    return {{"rows", rows}, {"observed_order", opt(t.observed_order)}, {"kappa_max_drift", opt(t.kappa_max_drift)}};
}

json to_json(const std::vector<solver::SweepRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"sigma", r.sigma},
                       {"converged", r.converged},
                       {"u_center", r.u_center},
                       {"u_max", r.u_max},
                       {"kappa_max", r.kappa_max},
                       {"min_nu_vertical", r.min_nu_vertical},
                       {"iterations", r.iterations},
                       {"below_classical_threshold", r.below_classical_threshold},
                       {"status", r.status}});
    return out;
}

json envelope(const std::string& command, const json& config, json result, json timing) {
    json j;
    j["schema"] = kReportSchema;
    j["command"] = command;
    j["config"] = config;
    j["result"] = std::move(result);
    j["timing"] = std::move(timing);
    return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

namespace {

std::string num(double x) {
    if (!std::isfinite(x)) return "";
    // shortest text that reads back to the same double
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string sweep_csv(const std::vector<solver::SweepRow>& rows) {
    std::ostringstream os;
    os << "schema,sigma,converged,u_center,u_max,kappa_max,min_nu_vertical,iterations,below_classical_threshold,status\n";
    for (const auto& r : rows)
        os << kTableSchema << ',' << num(r.sigma) << ',' << (r.converged ? 1 : 0) << ',' << num(r.u_center) << ','
           << num(r.u_max) << ',' << num(r.kappa_max) << ',' << num(r.min_nu_vertical) << ',' << r.iterations << ','
           << (r.below_classical_threshold ? 1 : 0) << ',' << quoted(r.status) << '\n';
    return os.str();
}

std::string refine_csv(const solver::RefineTable& t) {
    std::ostringstream os;
    os << "schema,resolution,converged,u_center,kappa_max,cap_error,status\n";
    for (const auto& r : t.rows)
        os << kTableSchema << ',' << r.resolution << ',' << (r.converged ? 1 : 0) << ',' << num(r.u_center) << ','
           << num(r.kappa_max) << ',' << (r.cap_error ? num(*r.cap_error) : "") << ',' << quoted(r.status) << '\n';
    return os.str();
}

std::string mesh_obj(const solver::GraphSolution& sol, int segments) {
    const auto& disc = *sol.discretization;
    if (disc.n() != 2) throw Unsupported("mesh export is for n = 2 solutions");
    std::ostringstream os;
    os.precision(17);
    os << "# " << kMeshSchema << "\n# vertices (x1, x2, u); faces counter-clockwise seen from +x3\n";
    os << "# " << sol.spec.describe() << " on " << sol.domain.describe() << ", sigma " << sol.sigma << ", epsilon "
       << sol.epsilon << "\n";

    if (disc.kind() == solver::GridKind::Radial) {
        if (segments < 3) throw DomainError("mesh needs at least 3 angular segments");
        const std::size_t N = disc.size();
        os << "v 0 0 " << static_cast<double>(sol.u[0]) << "\n";
        for (std::size_t j = 1; j < N; ++j) {
            const double rho = disc.position(j)[0];
            for (int s = 0; s < segments; ++s) {
                const double t = 2.0 * std::numbers::pi * s / segments;
                os << "v " << rho * std::cos(t) << ' ' << rho * std::sin(t) << ' ' << static_cast<double>(sol.u[j]) << "\n";
            }
        }
        auto ring = [&](std::size_t j, int s) { return 2 + (j - 1) * segments + static_cast<std::size_t>(s % segments); };
        for (int s = 0; s < segments; ++s) os << "f 1 " << ring(1, s) << ' ' << ring(1, s + 1) << "\n";
        for (std::size_t j = 1; j + 1 < N; ++j)
            for (int s = 0; s < segments; ++s) {
                os << "f " << ring(j, s) << ' ' << ring(j + 1, s) << ' ' << ring(j + 1, s + 1) << "\n";
                os << "f " << ring(j, s) << ' ' << ring(j + 1, s + 1) << ' ' << ring(j, s + 1) << "\n";
            }
        return os.str();
    }

    const auto& tensor = dynamic_cast<const solver::TensorDiscretization&>(disc);
    const int nx = tensor.nx(), ny = tensor.ny();
    auto interior = [&](int ix, int iy) { return !tensor.is_boundary(tensor.index(ix, iy)); };
    // A cell is meshed when any corner is interior.
    std::vector<char> used(tensor.size(), 0);
    std::vector<std::array<int, 2>> cells;
    for (int iy = 0; iy + 1 < ny; ++iy)
        for (int ix = 0; ix + 1 < nx; ++ix) {
            if (!(interior(ix, iy) || interior(ix + 1, iy) || interior(ix, iy + 1) || interior(ix + 1, iy + 1))) continue;
            cells.push_back({ix, iy});
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) used[tensor.index(ix + dx, iy + dy)] = 1;
        }
    std::vector<std::size_t> vid(tensor.size(), 0);
    std::size_t next = 1;
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
    for (std::size_t i = 0; i < tensor.size(); ++i) {
        if (!used[i]) continue;
        vid[i] = next++;
        Eigen::VectorXd x = tensor.position(i);
        double z = static_cast<double>(sol.u[i]);
        if (tensor.is_boundary(i)) {
            const double t = x.norm() > 0.0 ? sol.domain.ray_exit(origin, x) : 0.0;
            x *= t;
            z = sol.epsilon;
        }
        os << "v " << x[0] << ' ' << x[1] << ' ' << z << "\n";
    }
    for (const auto& [ix, iy] : cells) {
        const std::size_t a = vid[tensor.index(ix, iy)], b = vid[tensor.index(ix + 1, iy)];
        const std::size_t c = vid[tensor.index(ix + 1, iy + 1)], d = vid[tensor.index(ix, iy + 1)];
        os << "f " << a << ' ' << b << ' ' << c << "\n";
        os << "f " << a << ' ' << c << ' ' << d << "\n";
    }
    return os.str();
}

}  // namespace hyplateau::io
