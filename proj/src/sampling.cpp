#include "hyplateau/errors.hpp"
#include "hyplateau/symfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyplateau::symfunc {

ConeSampler::ConeSampler(int n, int cone_index, std::uint64_t seed, double box)
    : n_(n), cone_(cone_index), box_(box), engine_(seed) {
    if (n < 2) throw DomainError("sampler dimension must be >= 2");
    if (cone_index < 1 || cone_index > n) throw DomainError("sampler cone index out of range");
}

double ConeSampler::uniform(double lo, double hi) {
    // 53-bit mantissa draw; avoids implementation-defined distribution objects.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::uint64_t ConeSampler::engine_draw() { return engine_(); }

Kappa ConeSampler::box_point() {
    Eigen::VectorXd v(n_);
    for (int i = 0; i < n_; ++i) v[i] = uniform(-box_, box_);
    return Kappa(std::move(v));
}

Kappa ConeSampler::interior() {
    for (;;) {
        Kappa p = box_point();
        if (cone_contains(p, cone_)) return p;
    }
}

namespace {

// Bisection along p -> q for the exit point of K_cone; returns the inner bracket end.
Kappa bisect_exit(const Kappa& p, const Kappa& q, int cone) {
    double lo = 0.0, hi = 1.0;
    const Eigen::VectorXd d = q.values() - p.values();
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (cone_contains(Kappa(Eigen::VectorXd(p.values() + mid * d)), cone))
            lo = mid;
        else
            hi = mid;
    }
    return Kappa(Eigen::VectorXd(p.values() + lo * d));
}

}  // namespace

ConeSampler::Ray ConeSampler::boundary_ray(int boundary_cone) {
    const Kappa p = interior();
    for (;;) {
        Kappa q = box_point();
        if (!cone_contains(q, boundary_cone)) return {p, bisect_exit(p, q, boundary_cone)};
    }
}

Kappa ConeSampler::near_boundary() {
    for (;;) {
        const Ray ray = boundary_ray(cone_);
        const double t = std::exp(uniform(std::log(1e-6), std::log(0.5)));
        Kappa x(Eigen::VectorXd(ray.boundary.values() + t * (ray.inside.values() - ray.boundary.values())));
        if (cone_contains(x, cone_)) return x;
    }
}

Kappa ConeSampler::next() {
    const bool edge = (counter_++ % 5) == 4;
    return edge ? near_boundary() : interior();
}

bool ConditionReport::pass() const {
    return std::all_of(records.begin(), records.end(), [](const ConditionRecord& r) { return r.pass; });
}

const ConditionRecord* ConditionReport::find(const std::string& id) const {
    for (const auto& r : records)
        if (r.id == id) return &r;
    return nullptr;
}

namespace {

class Tally {
public:
    Tally(std::string id, double tolerance, std::string note = {})
        : rec_{std::move(id), 0, 0, std::numeric_limits<double>::infinity(), tolerance, true, std::move(note)} {}

    void add(double margin) {
        ++rec_.samples;
        if (!(margin >= -rec_.tolerance)) ++rec_.violations;
        if (!(margin >= rec_.worst_margin)) rec_.worst_margin = margin;  // NaN propagates as worst
    }
    void fail() {
        ++rec_.samples;
        ++rec_.violations;
        rec_.worst_margin = -std::numeric_limits<double>::infinity();
    }
    ConditionRecord finish() {
        rec_.pass = rec_.samples > 0 && rec_.violations == 0;
        return rec_;
    }

private:
    ConditionRecord rec_;
};

double max_eigenvalue(const Eigen::MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

}  // namespace

ConditionReport check_conditions(const CurvatureSpec& spec, std::size_t sample_count, std::uint64_t seed,
                                 std::optional<int> sample_cone) {
    if (sample_count < 1) throw DomainError("sample_count must be >= 1");
    const int n = spec.n();
    const int cone = sample_cone.value_or(spec.cone_index());

    ConditionReport report;
    report.spec = spec;
    report.sample_cone = cone;
    report.sample_count = sample_count;
    report.seed = seed;

    ConeSampler sampler(n, cone, seed);

    Tally admissible("admissibility", 0.0, "samples outside the spec cone");
    Tally monotone("2.1", 1e-9, "min_i f_i");
    Tally concave("2.2", 1e-8, "-max eig(D^2 f) / (1 + |D^2 f|)");
    Tally positive("2.3", 1e-9, "f inside; 0.05 f(b + 1e-2 d) - f(b + 1e-10 d) toward the boundary of K_k");
    Tally normalized("2.4", 1e-12, "1 - |f(1,...,1) - 1|");
    Tally homogeneous("2.5", 1e-10, "-|f(t k) - t f(k)| / (1 + t f(k))");
    Tally limit("2.6", 0.0, "f(l_1,...,l_n + R) - (1 + eps0)");
    const bool cq = spec.family() == Family::ConsecutiveQuotient;
    const double C = assumption_constant(spec);
    Tally assumption(cq ? "1.3" : "1.4", 1e-8, cq ? "C - sum_i f_i" : "C - max_{kappa_i>0} kappa_i f_i / f");

    for (std::size_t s = 0; s < sample_count; ++s) {
        const Kappa kappa = sampler.next();
        Evaluation ev;
        try {
            ev = evaluate(spec, kappa, 2);
        } catch (const AdmissibilityError&) {
            admissible.fail();
            continue;
        }
        admissible.add(0.0);

        monotone.add(ev.grad.minCoeff());
        concave.add(-max_eigenvalue(ev.hess) / (1.0 + ev.hess.norm()));
        positive.add(ev.value);

        const double t = std::exp(sampler.uniform(std::log(0.1), std::log(10.0)));
        const double scaled = eval_f(spec, Kappa(Eigen::VectorXd(t * kappa.values())));
        homogeneous.add(-std::abs(scaled - t * ev.value) / (1.0 + t * ev.value));

        if (cq) {
            assumption.add(C - ev.grad.sum());
        } else {
            double worst = 0.0;
            for (int i = 0; i < n; ++i)
                if (kappa[i] > 0.0) worst = std::max(worst, kappa[i] * ev.grad[i] / ev.value);
            assumption.add(C - worst);
        }
    }

    // f -> 0 approaching the boundary of K_k, where the formula for f is still defined;
    // K_k contains every cone the families are admissible in.
    // A sampled cone wider than K_k (negative controls) cannot seed these rays, so they come
    // from the spec's own cone instead.
    const std::size_t rays = std::max<std::size_t>(1, sample_count / 10);
    const int natural = spec.k();
    std::optional<ConeSampler> own;
    if (cone < natural) own.emplace(n, spec.cone_index(), seed + 1);
    ConeSampler& ray_source = own ? *own : sampler;
    for (std::size_t s = 0; s < rays; ++s) {
        const auto ray = ray_source.boundary_ray(natural);
        try {
            // f is concave, not monotone, along the whole segment; only the approach is checked
            const Eigen::VectorXd d = ray.inside.values() - ray.boundary.values();
            double first = 0.0, previous = std::numeric_limits<double>::infinity();
            bool decreasing = true;
            for (double step : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
                Kappa x(Eigen::VectorXd(ray.boundary.values() + step * d));
                const double value = evaluate_in_cone(spec, x, natural, 0).value;
                if (!(value < previous)) decreasing = false;
                if (step == 1e-2) first = value;
                previous = value;
            }
            positive.add(decreasing ? 0.05 * first - previous : -std::abs(previous));
        } catch (const AdmissibilityError&) {
            positive.fail();
        }
    }

    {
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        normalized.add(-std::abs(eval_f(spec, Kappa(ones)) - 1.0));
    }

    const std::size_t ball = std::max<std::size_t>(1, sample_count / 10);
    for (std::size_t s = 0; s < ball; ++s) {
        Eigen::VectorXd dir(n);
        for (;;) {
            for (int i = 0; i < n; ++i) dir[i] = sampler.uniform(-1.0, 1.0);
            if (dir.squaredNorm() <= 1.0) break;
        }
        Eigen::VectorXd lambda = Eigen::VectorXd::Ones(n) + report.delta0 * dir;
        lambda[n - 1] += report.R;
        try {
            limit.add(eval_f(spec, Kappa(lambda)) - (1.0 + report.epsilon0));
        } catch (const AdmissibilityError&) {
            limit.fail();
        }
    }

    report.records = {admissible.finish(), monotone.finish(), concave.finish(), positive.finish(),
                      normalized.finish(), homogeneous.finish(), limit.finish(), assumption.finish()};
    return report;
}

double sup_gradient_sum(const CurvatureSpec& spec, std::size_t sample_count, std::uint64_t seed) {
    if (spec.family() != Family::ConsecutiveQuotient)
        throw DomainError("sup_gradient_sum applies to consecutive quotients H_k/H_{k-1}");
    if (sample_count < 1) throw DomainError("sample_count must be >= 1");
    ConeSampler sampler(spec.n(), spec.cone_index(), seed);
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sample_count; ++s) sup = std::max(sup, grad_f(spec, sampler.next()).sum());
    return sup;
}

double sup_ratio_assumption(const CurvatureSpec& spec, std::size_t sample_count, std::uint64_t seed) {
    if (spec.family() == Family::ConsecutiveQuotient)
        throw DomainError("sup_ratio_assumption applies to general quotients and k-th roots");
    if (sample_count < 1) throw DomainError("sample_count must be >= 1");
    ConeSampler sampler(spec.n(), spec.cone_index(), seed);
    double sup = 0.0;
    for (std::size_t s = 0; s < sample_count; ++s) {
        const Kappa kappa = sampler.next();
        const Evaluation ev = evaluate(spec, kappa, 1);
        for (int i = 0; i < spec.n(); ++i)
            if (kappa[i] > 0.0) sup = std::max(sup, kappa[i] * ev.grad[i] / ev.value);
    }
    return sup;
}

}  // namespace hyplateau::symfunc
