#include "rmtlab/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rmtlab/quadrature.hpp"
#include "rmtlab/rng.hpp"

namespace rmtlab {

namespace {

constexpr double kQuadTol = 1e-11; // per-integral budget, below the 1e-10 contract

double require_param(const DistributionSpec& spec, const char* name) {
    if (spec.params.empty()) {
        throw std::invalid_argument(std::string("invalid-params: missing ") + name);
    }
    return spec.params[0];
}

double pareto_alpha(const DistributionSpec& spec) {
    const double a = require_param(spec, "alpha");
    if (!(a > 2.0)) {
        throw std::invalid_argument("invalid-params: symmetric-pareto requires alpha > 2");
    }
    return a;
}

double student_nu(const DistributionSpec& spec) {
    const double nu = require_param(spec, "nu");
    if (!(nu > 2.0)) {
        throw std::invalid_argument("invalid-params: student-t requires nu > 2");
    }
    return nu;
}

double two_point_p(const DistributionSpec& spec) {
    const double p = require_param(spec, "p");
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("invalid-params: two-point requires p in (0,1)");
    }
    return p;
}

// Standardized density where one exists (all kinds but rademacher/two-point).
double density(const DistributionSpec& spec, double x) {
    switch (spec.kind) {
    case DistKind::Gaussian:
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case DistKind::Uniform: {
        const double half = std::sqrt(3.0);
        return std::abs(x) <= half ? 1.0 / (2.0 * half) : 0.0;
    }
    case DistKind::SymmetricPareto: {
        const double a = pareto_alpha(spec);
        const double c = std::sqrt(a / (a - 2.0)); // emitted = sign * P / c
        const double ax = std::abs(x);
        if (ax < 1.0 / c) return 0.0;
        return 0.5 * a * std::pow(c, -a) * std::pow(ax, -a - 1.0);
    }
    case DistKind::StudentT: {
        const double nu = student_nu(spec);
        const double c = std::sqrt(nu / (nu - 2.0)); // emitted = t / c
        const double t = c * x;
        const double lognorm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                               0.5 * std::log(nu * std::numbers::pi);
        return c * std::exp(lognorm - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
    }
    default:
        throw std::logic_error("density: discrete kind");
    }
}

double box_muller(std::uint64_t seed, std::uint64_t index, std::uint64_t draw0) {
    const double u1 = rng::uniform_pos(rng::bits(seed, index, draw0));
    const double u2 = rng::uniform01(rng::bits(seed, index, draw0 + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Marsaglia-Tsang Gamma(a,1), a >= 1. Consumes draws starting at `draw0`,
// three per attempt, all inside counter `index`.
double gamma_sample(double a, std::uint64_t seed, std::uint64_t index,
                    std::uint64_t draw0) {
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (std::uint64_t j = 0;; ++j) {
        const double x = box_muller(seed, index, draw0 + 3 * j);
        const double u = rng::uniform_pos(rng::bits(seed, index, draw0 + 3 * j + 2));
        const double v = (1.0 + c * x) * (1.0 + c * x) * (1.0 + c * x);
        if (v <= 0.0) continue;
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
            return d * v;
        }
    }
}

// Adaptive Simpson over dyadic panels [lo,1],[1,2],[2,4],...: the integrand
// x^2 f(x) is unimodal near 1, and a single [0,M] call with large M would
// sample right past the mass.
double integrate_panels(const std::function<double(double)>& f, double lo, double M) {
    double total = 0.0;
    double a = lo;
    double b = std::max(1.0, 2.0 * std::max(lo, 0.5));
    while (a < M) {
        const double end = std::min(b, M);
        total += integrate_adaptive(f, a, end, 1e-13);
        a = end;
        b *= 2.0;
    }
    return total;
}

// E(xi^2 chi_{|xi| <= M}) of the standardized law; analytic for the discrete
// and uniform kinds, adaptive quadrature elsewhere.
double second_moment_below(const DistributionSpec& spec, double M,
                           TruncMethod& method) {
    switch (spec.kind) {
    case DistKind::Rademacher:
        method = TruncMethod::ClosedForm;
        return M >= 1.0 ? 1.0 : 0.0;
    case DistKind::Uniform: {
        method = TruncMethod::ClosedForm;
        const double a = std::min(M, std::sqrt(3.0));
        return a * a * a / (3.0 * std::sqrt(3.0));
    }
    case DistKind::TwoPoint: {
        method = TruncMethod::ClosedForm;
        const double p = two_point_p(spec);
        const double hi = std::sqrt((1.0 - p) / p);
        const double lo = -std::sqrt(p / (1.0 - p));
        double s = 0.0;
        if (std::abs(hi) <= M) s += p * hi * hi;
        if (std::abs(lo) <= M) s += (1.0 - p) * lo * lo;
        return s;
    }
    case DistKind::Gaussian:
    case DistKind::StudentT: {
        method = TruncMethod::Quadrature;
        auto f = [&](double x) { return x * x * density(spec, x); };
        return 2.0 * integrate_adaptive(f, 0.0, M, kQuadTol);
    }
    case DistKind::SymmetricPareto: {
        method = TruncMethod::Quadrature;
        const double a = pareto_alpha(spec);
        const double lo = 1.0 / std::sqrt(a / (a - 2.0)); // support edge
        if (M <= lo) return 0.0;
        auto f = [&](double x) { return x * x * density(spec, x); };
        return 2.0 * integrate_adaptive(f, lo, M, kQuadTol);
    }
    }
    throw std::logic_error("unreachable");
}

double first_moment_below(const DistributionSpec& spec, double M,
                          TruncMethod& method) {
    if (spec.symmetric()) {
        // Odd integrand over a symmetric window.
        return 0.0;
    }
    // Only two-point is asymmetric in the registry.
    method = TruncMethod::ClosedForm;
    const double p = two_point_p(spec);
    const double hi = std::sqrt((1.0 - p) / p);
    const double lo = -std::sqrt(p / (1.0 - p));
    double s = 0.0;
    if (std::abs(hi) <= M) s += p * hi;
    if (std::abs(lo) <= M) s += (1.0 - p) * lo;
    return s;
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

} // namespace

bool DistributionSpec::fourth_moment_finite() const {
    switch (kind) {
    case DistKind::SymmetricPareto:
        return pareto_alpha(*this) > 4.0;
    case DistKind::StudentT:
        return student_nu(*this) > 4.0;
    default:
        return true;
    }
}

bool DistributionSpec::bounded_support() const {
    switch (kind) {
    case DistKind::Rademacher:
    case DistKind::Uniform:
    case DistKind::TwoPoint:
        return true;
    default:
        return false;
    }
}

bool DistributionSpec::symmetric() const {
    return kind != DistKind::TwoPoint;
}

DistributionSpec make_spec(DistKind kind, const std::vector<double>& params) {
    DistributionSpec spec;
    spec.kind = kind;
    spec.params = params;
    switch (kind) {
    case DistKind::Gaussian:
    case DistKind::Rademacher:
        spec.shift = 0.0;
        spec.scale = 1.0;
        break;
    case DistKind::Uniform:
        // raw U[-1,1]
        spec.shift = 0.0;
        spec.scale = 1.0 / std::sqrt(3.0);
        break;
    case DistKind::SymmetricPareto: {
        const double a = pareto_alpha(spec);
        spec.shift = 0.0;
        spec.scale = std::sqrt(a / (a - 2.0)); // raw sign*Pareto(alpha, min 1)
        break;
    }
    case DistKind::StudentT: {
        const double nu = student_nu(spec);
        spec.shift = 0.0;
        spec.scale = std::sqrt(nu / (nu - 2.0));
        break;
    }
    case DistKind::TwoPoint: {
        const double p = two_point_p(spec);
        spec.shift = p; // raw Bernoulli(p)
        spec.scale = std::sqrt(p * (1.0 - p));
        break;
    }
    }
    return spec;
}

DistributionSpec parse_spec(const std::string& key) {
    const auto colon = key.find(':');
    const std::string name = key.substr(0, colon);
    std::vector<double> params;
    std::string expected_param;
    DistKind kind;
    if (name == "gaussian") {
        kind = DistKind::Gaussian;
    } else if (name == "rademacher") {
        kind = DistKind::Rademacher;
    } else if (name == "uniform") {
        kind = DistKind::Uniform;
    } else if (name == "symmetric-pareto") {
        kind = DistKind::SymmetricPareto;
        expected_param = "alpha";
    } else if (name == "student-t") {
        kind = DistKind::StudentT;
        expected_param = "nu";
    } else if (name == "two-point") {
        kind = DistKind::TwoPoint;
        expected_param = "p";
    } else {
        throw std::invalid_argument("invalid-params: unknown distribution '" + name + "'");
    }
    if (colon != std::string::npos) {
        const std::string rest = key.substr(colon + 1);
        const auto eq = rest.find('=');
        if (eq == std::string::npos || rest.substr(0, eq) != expected_param) {
            throw std::invalid_argument("invalid-params: bad key '" + key + "'");
        }
        const std::string valstr = rest.substr(eq + 1);
        double v{};
        auto [p, ec] = std::from_chars(valstr.data(), valstr.data() + valstr.size(), v);
        if (ec != std::errc{} || p != valstr.data() + valstr.size()) {
            throw std::invalid_argument("invalid-params: bad value in '" + key + "'");
        }
        params.push_back(v);
    } else if (!expected_param.empty()) {
        throw std::invalid_argument("invalid-params: '" + name + "' needs " + expected_param);
    }
    return make_spec(kind, params);
}

std::string spec_key(const DistributionSpec& spec) {
    switch (spec.kind) {
    case DistKind::Gaussian: return "gaussian";
    case DistKind::Rademacher: return "rademacher";
    case DistKind::Uniform: return "uniform";
    case DistKind::SymmetricPareto:
        return "symmetric-pareto:alpha=" + format_double(spec.params.at(0));
    case DistKind::StudentT:
        return "student-t:nu=" + format_double(spec.params.at(0));
    case DistKind::TwoPoint:
        return "two-point:p=" + format_double(spec.params.at(0));
    }
    throw std::logic_error("unreachable");
}

MomentReport analytic_moments(const DistributionSpec& spec) {
    MomentReport r;
    r.mean = 0.0;
    r.variance = 1.0;
    r.method = MomentMethod::ClosedForm;
    const double inf = std::numeric_limits<double>::infinity();
    switch (spec.kind) {
    case DistKind::Gaussian:
        r.fourth_moment = 3.0;
        break;
    case DistKind::Rademacher:
        r.fourth_moment = 1.0;
        break;
    case DistKind::Uniform:
        r.fourth_moment = 9.0 / 5.0;
        break;
    case DistKind::SymmetricPareto: {
        const double a = pareto_alpha(spec);
        r.fourth_moment = a > 4.0 ? (a - 2.0) * (a - 2.0) / (a * (a - 4.0)) : inf;
        break;
    }
    case DistKind::StudentT: {
        const double nu = student_nu(spec);
        r.fourth_moment = nu > 4.0 ? 3.0 * (nu - 2.0) / (nu - 4.0) : inf;
        break;
    }
    case DistKind::TwoPoint: {
        const double p = two_point_p(spec);
        r.fourth_moment = (1.0 - 3.0 * p + 3.0 * p * p) / (p * (1.0 - p));
        break;
    }
    }
    return r;
}

double sample_one(const DistributionSpec& spec, std::uint64_t seed,
                  std::uint64_t index) {
    switch (spec.kind) {
    case DistKind::Gaussian:
        return box_muller(seed, index, 0);
    case DistKind::Rademacher:
        return (rng::bits(seed, index, 0) >> 63) ? 1.0 : -1.0;
    case DistKind::Uniform: {
        const double u = rng::uniform01(rng::bits(seed, index, 0));
        return (2.0 * u - 1.0) * std::sqrt(3.0);
    }
    case DistKind::SymmetricPareto: {
        const double a = pareto_alpha(spec);
        const double u = rng::uniform_pos(rng::bits(seed, index, 0));
        const double p = std::pow(u, -1.0 / a);
        const double sign = (rng::bits(seed, index, 1) >> 63) ? 1.0 : -1.0;
        return sign * p / spec.scale;
    }
    case DistKind::StudentT: {
        const double nu = student_nu(spec);
        const double z = box_muller(seed, index, 0);
        const double chi2 = 2.0 * gamma_sample(0.5 * nu, seed, index, 2);
        return (z * std::sqrt(nu / chi2)) / spec.scale;
    }
    case DistKind::TwoPoint: {
        const double p = two_point_p(spec);
        const double u = rng::uniform01(rng::bits(seed, index, 0));
        const double raw = u < p ? 1.0 : 0.0;
        return (raw - spec.shift) / spec.scale;
    }
    }
    throw std::logic_error("unreachable");
}

std::vector<double> sample_entries(const DistributionSpec& spec,
                                   std::size_t count, std::uint64_t seed) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = sample_one(spec, seed, i);
    }
    return out;
}

TruncationReport truncation_report(const DistributionSpec& spec, double M) {
    if (!(M > 0.0)) {
        throw std::invalid_argument("invalid-params: truncation level M must be > 0");
    }
    TruncationReport r;
    r.M = M;
    TruncMethod m1 = TruncMethod::ClosedForm, m2 = TruncMethod::ClosedForm;
    r.mu_trunc = first_moment_below(spec, M, m1);
    r.second_moment_below = second_moment_below(spec, M, m2);
    r.method = (m1 == TruncMethod::Quadrature || m2 == TruncMethod::Quadrature)
                   ? TruncMethod::Quadrature
                   : TruncMethod::ClosedForm;
    r.abs_error_bound = r.method == TruncMethod::Quadrature ? 1e-10 : 0.0;
    r.var_trunc = r.second_moment_below - r.mu_trunc * r.mu_trunc;
    r.tail_second_moment = 1.0 - 2.0 * r.second_moment_below + r.var_trunc;
    // Clamp tiny negative quadrature residue.
    if (r.tail_second_moment < 0.0 && r.tail_second_moment > -1e-10) {
        r.tail_second_moment = 0.0;
    }
    return r;
}

double apply_centered_truncation_one(double value, const TruncationReport& report) {
    const double kept = std::abs(value) <= report.M ? value : 0.0;
    return kept - report.mu_trunc;
}

std::vector<double> apply_centered_truncation(const std::vector<double>& values,
                                              const TruncationReport& report) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = apply_centered_truncation_one(values[i], report);
    }
    return out;
}

double choose_truncation_level(const DistributionSpec& spec, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("invalid-params: eta must lie in (0,1)");
    }
    const double var_floor = (1.0 - eta) * (1.0 - eta);
    const double tail_cap = eta * eta;
    auto ok = [&](double M) {
        const TruncationReport r = truncation_report(spec, M);
        return r.var_trunc >= var_floor && r.tail_second_moment <= tail_cap;
    };
    // Bracket: grow until satisfied, then tighten the lower end.
    double hi = 1.0;
    while (!ok(hi)) {
        hi *= 2.0;
        if (hi > 1e9) {
            throw std::runtime_error("not-found: no truncation level up to 1e9 "
                                     "meets both conditions for eta=" +
                                     format_double(eta));
        }
    }
    double lo = hi * 0.5;
    while (ok(lo)) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-12) break;
    }
    while ((hi - lo) / hi > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    // Re-verify the returned level through the public path.
    const TruncationReport r = truncation_report(spec, hi);
    if (!(r.var_trunc >= var_floor && r.tail_second_moment <= tail_cap)) {
        throw std::runtime_error("not-found: bisection endpoint failed re-verification");
    }
    return hi;
}

double weighted_sum_tail_probe(const DistributionSpec& spec,
                               const std::vector<double>& weights, double eps,
                               std::size_t trials, std::uint64_t seed) {
    if (!(eps > 0.0) || trials == 0) {
        throw std::invalid_argument("invalid-params: eps > 0 and trials >= 1 required");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("bad-weights: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("bad-weights: weights must sum to 1");
    }
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t s = rng::derive(seed, t, 0);
        double sum = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            sum += weights[j] * sample_one(spec, s, j);
        }
        if (std::abs(sum) > eps) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

} // namespace rmtlab
