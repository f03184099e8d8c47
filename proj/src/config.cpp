#include "hyplateau/config.hpp"

#include "hyplateau/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hyplateau {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::ostringstream os;
    os << "configuration error";
    if (problems.size() != 1) os << "s (" << problems.size() << ")";
    os << ":";
    for (const auto& p : problems) os << "\n  - " << p;
    return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace hyplateau

namespace hyplateau::cli {

using nlohmann::json;

int default_grid(const std::string& grid_kind) { return grid_kind == "tensor" ? 64 : 1024; }

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

template <class T>
bool read_number(const json& v, T& out) {
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) return false;
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_unsigned()) out = v.get<T>();
            else {
                const auto s = v.get<long long>();
                if (s < 0) return false;
                out = static_cast<T>(s);
            }
        } else {
            out = v.get<T>();
        }
        return true;
    } else {
        if (!v.is_number()) return false;
        out = v.get<T>();
        return true;
    }
}

}  // namespace

void apply_json(RunConfig& c, const json& obj, std::vector<std::string>& problems) {
    if (!obj.is_object()) {
        problems.push_back("config file must hold a JSON object with flat keys");
        return;
    }
    for (const auto& [key, v] : obj.items()) {
        auto bad_type = [&](const char* expected) { problems.push_back("key '" + key + "' must be " + expected); };
        auto str = [&](std::string& out) {
            if (v.is_string()) out = v.get<std::string>();
            else bad_type("a string");
        };
        auto integer = [&](auto& out) {
            if (!read_number(v, out)) bad_type("an integer");
        };
        auto real = [&](double& out) {
            if (!read_number(v, out)) bad_type("a number");
        };
        auto opt_int = [&](std::optional<int>& out) {
            if (v.is_null()) out.reset();
            else if (int x; read_number(v, x)) out = x;
            else bad_type("an integer or null");
        };
        auto opt_real = [&](std::optional<double>& out) {
            if (v.is_null()) out.reset();
            else if (double x; read_number(v, x)) out = x;
            else bad_type("a number or null");
        };
        auto real_list = [&](std::vector<double>& out) {
            if (!v.is_array()) return bad_type("an array of numbers");
            std::vector<double> tmp;
            for (const auto& e : v) {
                double x;
                if (!read_number(e, x)) return bad_type("an array of numbers");
                tmp.push_back(x);
            }
            out = std::move(tmp);
        };
        auto string_list = [&](std::vector<std::string>& out) {
            if (!v.is_array()) return bad_type("an array of strings");
            std::vector<std::string> tmp;
            for (const auto& e : v) {
                if (!e.is_string()) return bad_type("an array of strings");
                tmp.push_back(e.get<std::string>());
            }
            out = std::move(tmp);
        };

        if (key == "command") str(c.command);
        else if (key == "family") str(c.family);
        else if (key == "k") integer(c.k);
        else if (key == "l") opt_int(c.l);
        else if (key == "n") integer(c.n);
        else if (key == "cone") opt_int(c.cone);
        else if (key == "shape") str(c.shape);
        else if (key == "radius") real(c.radius);
        else if (key == "a_axis") opt_real(c.a_axis);
        else if (key == "b_axis") opt_real(c.b_axis);
        else if (key == "sigma") opt_real(c.sigma);
        else if (key == "sigmas") real_list(c.sigmas);
        else if (key == "grid_kind") str(c.grid_kind);
        else if (key == "grid") opt_int(c.grid);
        else if (key == "epsilon_max") real(c.epsilon_max);
        else if (key == "epsilon_min") real(c.epsilon_min);
        else if (key == "epsilon_factor") real(c.epsilon_factor);
        else if (key == "epsilon_schedule") real_list(c.epsilon_schedule);
        else if (key == "sigma_start") real(c.sigma_start);
        else if (key == "sigma_step") real(c.sigma_step);
        else if (key == "newton_tol") opt_real(c.newton_tol);
        else if (key == "max_newton_iters") integer(c.max_newton_iters);
        else if (key == "jacobian") str(c.jacobian);
        else if (key == "levels") integer(c.levels);
        else if (key == "seed") integer(c.seed);
        else if (key == "samples") integer(c.samples);
        else if (key == "threads") integer(c.threads);
        else if (key == "out") str(c.out);
        else if (key == "export") string_list(c.exports);
        else problems.push_back("unknown key '" + key + "'");
    }
}

void load_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    json obj;
    try {
        obj = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({"config file '" + path + "' is not valid JSON: " + e.what()});
    }
    std::vector<std::string> problems;
    apply_json(config, obj, problems);
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

namespace {

bool needs_solver(const std::string& cmd) {
    return cmd == "solve" || cmd == "sweep" || cmd == "check-estimates" || cmd == "refine";
}

bool needs_sigma(const std::string& cmd) {
    return cmd == "solve" || cmd == "cap" || cmd == "check-estimates" || cmd == "refine";
}

}  // namespace

RunConfig validate_config(RunConfig c) {
    std::vector<std::string> p;
    if (c.command.empty()) p.push_back("command is required (one of verify-f, solve, sweep, cap, check-estimates, refine)");
    else if (!contains(kCommands, c.command)) p.push_back("unknown command '" + c.command + "'");

    // curvature function
    std::optional<symfunc::Family> family;
    try {
        family = symfunc::family_from_string(c.family);
        c.family = symfunc::to_string(*family);
    } catch (const DomainError&) {
        p.push_back("family must be consecutive-quotient, general-quotient or kth-root (got '" + c.family + "')");
    }
    if (c.n < 2) p.push_back("n must be >= 2");
    if (c.k < 1 || c.k > c.n) p.push_back("k must satisfy 1 <= k <= n");
    if (family == symfunc::Family::GeneralQuotient) {
        if (!c.l) p.push_back("l is required for general-quotient");
        else if (*c.l < 1 || *c.l >= c.k) p.push_back("general-quotient needs 1 <= l < k");
    } else if (family == symfunc::Family::ConsecutiveQuotient) {
        if (c.l && *c.l != c.k - 1) p.push_back("consecutive-quotient fixes l = k - 1");
        c.l = c.k - 1;
    } else if (family == symfunc::Family::KthRoot) {
        if (c.l && *c.l != 0) p.push_back("kth-root fixes l = 0");
        c.l = 0;
    }
    if (c.cone) {
        if (family != symfunc::Family::KthRoot) p.push_back("cone may only be set for kth-root");
        else if (*c.cone != std::min(c.k + 1, c.n) && *c.cone != c.n) p.push_back("kth-root cone must be k+1 or n");
    }

    // domain
    if (c.shape != "ball" && c.shape != "ellipse" && c.shape != "annulus") p.push_back("shape must be ball or ellipse");
    if (c.shape == "annulus" && needs_solver(c.command))
        p.push_back("annulus domains are provided for curvature evaluation only; the solver needs ball or ellipse");
    if (!(c.radius > 0.0)) p.push_back("radius must be positive");
    if (c.shape == "ellipse") {
        if (c.n != 2) p.push_back("ellipse domains are planar (n = 2)");
        const double a = c.a_axis.value_or(c.radius);
        if (!c.b_axis) p.push_back("b_axis is required for ellipse");
        else if (!(*c.b_axis > 0.0) || !(a >= *c.b_axis)) p.push_back("ellipse needs a_axis >= b_axis > 0");
        c.a_axis = a;
    } else if (c.a_axis || c.b_axis) {
        p.push_back("a_axis/b_axis only apply to ellipse");
    }

    // sigma
    if (needs_sigma(c.command) && !c.sigma) p.push_back("sigma is required for " + c.command);
    if (c.sigma && !(*c.sigma > 0.0 && *c.sigma < 1.0)) p.push_back("sigma must lie in (0, 1)");
    if (c.command == "sweep") {
        if (c.sigmas.empty()) p.push_back("sigmas is required for sweep");
        for (std::size_t i = 0; i < c.sigmas.size(); ++i) {
            if (!(c.sigmas[i] > 0.0 && c.sigmas[i] < 1.0)) {
                p.push_back("sigmas must lie in (0, 1)");
                break;
            }
            if (i > 0 && !(c.sigmas[i] < c.sigmas[i - 1])) {
                p.push_back("sigmas must be sorted strictly descending");
                break;
            }
        }
    }

    // grid and solver
    if (c.grid_kind.empty()) c.grid_kind = c.shape == "ball" ? "radial" : "tensor";
    if (c.grid_kind != "radial" && c.grid_kind != "tensor") p.push_back("grid_kind must be radial or tensor");
    if (c.grid_kind == "radial" && c.shape != "ball") p.push_back("radial grids need a ball domain");
    if (c.grid_kind == "tensor" && c.n != 2) p.push_back("tensor grids are planar (n = 2)");
    if (!c.grid) c.grid = default_grid(c.grid_kind);
    if (*c.grid < 4) p.push_back("grid must be at least 4 intervals");
    if (!(c.epsilon_min > 0.0)) p.push_back("epsilon_min must be positive");
    if (!(c.epsilon_max >= c.epsilon_min)) p.push_back("epsilon_max must be >= epsilon_min");
    if (!(c.epsilon_factor > 0.0 && c.epsilon_factor < 1.0)) p.push_back("epsilon_factor must lie in (0, 1)");
    if (!(c.sigma_start > 0.0 && c.sigma_start < 1.0)) p.push_back("sigma_start must lie in (0, 1)");
    if (!(c.sigma_step > 0.0)) p.push_back("sigma_step must be positive");
    if (c.newton_tol && !(*c.newton_tol > 0.0)) p.push_back("newton_tol must be positive");
    if (c.max_newton_iters < 1) p.push_back("max_newton_iters must be positive");
    try {
        (void)solver::jacobian_mode_from_string(c.jacobian);
        c.jacobian = solver::to_string(solver::jacobian_mode_from_string(c.jacobian));
    } catch (const DomainError&) {
        p.push_back("jacobian must be finite_difference or analytic_Fij");
    }
    if (c.command == "refine" && c.levels < 2) p.push_back("levels must be >= 2 for refine");
    if (c.epsilon_schedule.empty()) {
        if (c.epsilon_min > 0.0 && c.epsilon_max >= c.epsilon_min && c.epsilon_factor > 0.0 && c.epsilon_factor < 1.0)
            c.epsilon_schedule = solver::epsilon_schedule(c.epsilon_max, c.epsilon_min, c.epsilon_factor);
    } else {
        for (std::size_t i = 0; i < c.epsilon_schedule.size(); ++i) {
            if (!(c.epsilon_schedule[i] > 0.0) || (i > 0 && !(c.epsilon_schedule[i] < c.epsilon_schedule[i - 1]))) {
                p.push_back("epsilon_schedule must be positive and strictly decreasing");
                break;
            }
        }
    }

    // run
    if (c.samples < 1) p.push_back("samples must be >= 1");
    if (c.threads < 1) p.push_back("threads must be >= 1");
    if (c.out.empty()) p.push_back("out directory must not be empty");
    for (const auto& e : c.exports)
        if (!contains(kExportFormats, e)) p.push_back("unknown export format '" + e + "'");
    if (contains(c.exports, "mesh-obj") && needs_solver(c.command) && c.n != 2)
        p.push_back("mesh-obj export needs an n = 2 solution");

    if (!p.empty()) throw ConfigError(std::move(p));
    return c;
}

json to_json(const RunConfig& c) {
    auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
    json j;
    j["command"] = c.command;
    j["family"] = c.family;
    j["k"] = c.k;
    j["l"] = opt(c.l);
    j["n"] = c.n;
    j["cone"] = opt(c.cone);
    j["shape"] = c.shape;
    j["radius"] = c.radius;
    j["a_axis"] = opt(c.a_axis);
    j["b_axis"] = opt(c.b_axis);
    j["sigma"] = opt(c.sigma);
    j["sigmas"] = c.sigmas;
    j["grid_kind"] = c.grid_kind;
    j["grid"] = opt(c.grid);
    j["epsilon_max"] = c.epsilon_max;
    j["epsilon_min"] = c.epsilon_min;
    j["epsilon_factor"] = c.epsilon_factor;
    j["epsilon_schedule"] = c.epsilon_schedule;
    j["sigma_start"] = c.sigma_start;
    j["sigma_step"] = c.sigma_step;
    j["newton_tol"] = opt(c.newton_tol);
    j["max_newton_iters"] = c.max_newton_iters;
    j["jacobian"] = c.jacobian;
    j["levels"] = c.levels;
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    j["threads"] = c.threads;
    j["out"] = c.out;
    j["export"] = c.exports;
    return j;
}

symfunc::CurvatureSpec make_spec(const RunConfig& c) {
    switch (symfunc::family_from_string(c.family)) {
        case symfunc::Family::ConsecutiveQuotient: return symfunc::CurvatureSpec::consecutive_quotient(c.n, c.k);
        case symfunc::Family::GeneralQuotient: return symfunc::CurvatureSpec::general_quotient(c.n, c.k, c.l.value_or(0));
        case symfunc::Family::KthRoot: return symfunc::CurvatureSpec::kth_root(c.n, c.k, c.cone);
    }
    throw DomainError("unknown family");
}

hypgeom::Domain make_domain(const RunConfig& c) {
    if (c.shape == "ellipse") return hypgeom::Domain::ellipse(c.a_axis.value_or(c.radius), c.b_axis.value_or(c.radius));
    return hypgeom::Domain::ball(c.n, c.radius);
}

solver::SolverConfig make_solver_config(const RunConfig& c) {
    solver::SolverConfig s;
    s.spec = make_spec(c);
    s.domain = make_domain(c);
    s.grid_kind = c.grid_kind == "tensor" ? solver::GridKind::Tensor : solver::GridKind::Radial;
    s.resolution = c.grid.value_or(default_grid(c.grid_kind));
    if (c.sigma) s.sigma_target = *c.sigma;
    else if (!c.sigmas.empty()) s.sigma_target = c.sigmas.front();
    s.sigma_start = c.sigma_start;
    s.sigma_step = c.sigma_step;
    s.epsilon_max = c.epsilon_max;
    s.epsilon_min = c.epsilon_min;
    s.epsilon_factor = c.epsilon_factor;
    s.epsilon_schedule = c.epsilon_schedule;
    s.newton_tol = c.newton_tol;
    s.max_newton_iters = c.max_newton_iters;
    s.jacobian_mode = solver::jacobian_mode_from_string(c.jacobian);
    s.threads = c.threads;
    return s;
}

}  // namespace hyplateau::cli
