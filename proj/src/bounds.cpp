#include "rmtlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rmtlab {

namespace {

constexpr std::uint64_t kSearchCap = 1ULL << 62;

long double logsumexp3(long double a, long double b, long double c) {
    const long double m = std::max({a, b, c});
    if (std::isinf(m) && m < 0) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

long double logsumexp2(long double a, long double b) {
    const long double m = std::max(a, b);
    if (std::isinf(m) && m < 0) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

} // namespace

void BoundConstants::validate() const {
    auto need = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string("bad-params: constant ") + name +
                                        " must be > 0");
        }
    };
    need(c_bernstein, "c_bernstein");
    need(C_cubicnet, "C_cubicnet");
    need(c_31, "c_31");
    need(C_31, "C_31");
    for (const auto& [k, v] : extra) need(v, k.c_str());
}

double bernstein_tail(double tau, double M, double c) {
    if (!(tau >= 0.0) || !(M > 0.0) || !(c > 0.0)) {
        throw std::invalid_argument("bad-params: bernstein_tail");
    }
    return 2.0 * std::exp(-c * tau * tau / (M * M));
}

double log_net_cardinality(NetKind kind, double n, double param) {
    switch (kind) {
    case NetKind::Ball:
        if (!(n >= 1.0) || !(param > 0.0 && param <= 1.0)) {
            throw std::invalid_argument("bad-params: ball net needs n >= 1, eps in (0,1]");
        }
        return n * std::log(3.0 / param);
    case NetKind::CubeNet:
        if (!(n >= 1.0) || !(param > 0.0)) {
            throw std::invalid_argument("bad-params: cube net needs n >= 1, C > 0");
        }
        return param * n;
    case NetKind::Sparse:
        if (!(n >= 1.0)) throw std::invalid_argument("bad-params: sparse net needs N >= 1");
        return std::sqrt(n) * std::log(12.0 * std::exp(1.0) * n);
    }
    throw std::invalid_argument("bad-params: unknown net kind");
}

double epsilon_for_eta_residual(double eps, double eta, double M, double c) {
    const double lhs = c * eta * eta / (2.0 * M * M);
    const double rhs = eps * (1.0 + std::log(6.0 * std::exp(1.0) / eps));
    return lhs - rhs;
}

double epsilon_for_eta(double eta, double M, double c) {
    if (!(eta > 0.0) || !(M > 0.0) || !(c > 0.0)) {
        throw std::invalid_argument("bad-params: epsilon_for_eta");
    }
    if (epsilon_for_eta_residual(1.0, eta, M, c) >= 0.0) return 1.0;
    // The right side increases in eps on (0,1], so the admissible set is an
    // interval (0, eps*]; bisect for the endpoint.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        (epsilon_for_eta_residual(mid, eta, M, c) >= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

bool lemma31_condition(std::uint64_t N, double eps) {
    const auto n = static_cast<long double>(N);
    const long double e = std::exp(1.0L);
    const long double lhs =
        logsumexp2(eps * n * std::log(e / 4.0L), -eps * e * n / 4.0L);
    return lhs <= -eps * n / 3.0L;
}

bool lemma36_condition3(std::uint64_t N, double eps, const BoundConstants& c) {
    const auto n = static_cast<long double>(N);
    const long double e = std::exp(1.0L);
    const long double sparse = std::sqrt(n) * std::log(12.0L * e * n);
    const long double lhs = logsumexp3(sparse - c.c_31 * eps * n / 3.0L,
                                       -c.C_cubicnet * n, -n);
    const long double w =
        std::min({c.c_31 * static_cast<long double>(eps) / 6.0L,
                  static_cast<long double>(c.C_cubicnet) / 2.0L, 0.5L});
    return lhs <= -w * n;
}

bool prop41_condition(std::uint64_t N, double eps) {
    const long double x = static_cast<long double>(eps) * static_cast<long double>(N);
    return std::floor(x) >= x / 2.0L;
}

bool prop38_condition(std::uint64_t N, double w36) {
    return static_cast<long double>(w36) * static_cast<long double>(N) / 2.0L >=
           std::log(4.0L / 3.0L);
}

bool theorem42_condition(std::uint64_t N, double eps, double w38) {
    const auto n = static_cast<long double>(N);
    const long double lhs = logsumexp2(-static_cast<long double>(eps) * n,
                                       -static_cast<long double>(w38) * n);
    const long double w = std::min(static_cast<long double>(eps) / 2.0L,
                                   static_cast<long double>(w38) / 2.0L);
    return lhs <= -w * n;
}

bool holds_with_tail(const std::function<bool(std::uint64_t)>& cond, std::uint64_t N) {
    if (!cond(N)) return false;
    for (int i = 1; i <= 32; ++i) {
        const long double factor = std::exp2(2.0L * i / 32.0L); // up to 4x
        const long double scaled = static_cast<long double>(N) * factor;
        const auto Ni = static_cast<std::uint64_t>(
            std::min(scaled, static_cast<long double>(kSearchCap) * 4.0L));
        if (!cond(Ni)) return false;
    }
    return true;
}

namespace {

Threshold smallest_threshold_from(const std::function<bool(std::uint64_t)>& cond,
                                  std::uint64_t lo_bound) {
    auto block = [&](std::uint64_t N) { return holds_with_tail(cond, N); };
    std::uint64_t hi = 0, last_fail = 0;
    for (std::uint64_t N = std::max<std::uint64_t>(lo_bound, 1);;) {
        if (block(N)) {
            hi = N;
            break;
        }
        last_fail = N;
        if (N >= kSearchCap) return std::nullopt;
        N = std::min(N * 2, kSearchCap);
    }
    std::uint64_t lo = last_fail; // 0 when the very first probe satisfied
    while (hi - lo > 1 && lo > 0) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (block(mid) ? hi : lo) = mid;
    }
    // The log-space condition is eventually monotone but not provably so from
    // the start; walk down so the block genuinely fails at hi - 1.
    std::uint64_t walked = 0;
    while (hi > std::max<std::uint64_t>(lo_bound, 1) && block(hi - 1)) {
        --hi;
        if (++walked > 1000000) {
            throw std::runtime_error("threshold search: condition not eventually monotone");
        }
    }
    return hi;
}

} // namespace

Threshold smallest_threshold(const std::function<bool(std::uint64_t)>& cond) {
    return smallest_threshold_from(cond, 1);
}

Threshold lemma31_threshold(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("bad-params: eps in (0,1]");
    return smallest_threshold([&](std::uint64_t N) { return lemma31_condition(N, eps); });
}

Lemma36Thresholds lemma36_thresholds(double eps, const BoundConstants& consts) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("bad-params: eps in (0,1]");
    consts.validate();
    Lemma36Thresholds out;
    out.w36 = std::min({consts.c_31 * eps / 6.0, consts.C_cubicnet / 2.0, 0.5});
    out.condition3 = smallest_threshold(
        [&](std::uint64_t N) { return lemma36_condition3(N, eps, consts); });

    // Condition 1: floor(N^(1/4)) * delta_34(eps/3, 2 C_cubicnet) >= 1.
    if (auto it = consts.extra.find("delta_34"); it != consts.extra.end()) {
        const double delta = it->second;
        auto quartic_floor = [](std::uint64_t N) {
            auto r = static_cast<std::uint64_t>(
                std::pow(static_cast<long double>(N), 0.25L));
            // repair pow() rounding at exact fourth powers
            while ((r + 1) * (r + 1) * (r + 1) * (r + 1) <= N) ++r;
            while (r > 0 && r * r * r * r > N) --r;
            return r;
        };
        out.condition1 = smallest_threshold([&](std::uint64_t N) {
            return static_cast<long double>(quartic_floor(N)) *
                       static_cast<long double>(delta) >=
                   1.0L;
        });
    } else {
        out.distribution_dependent.push_back("N_36_condition1 (needs delta_34)");
    }

    // Condition 2: N >= max(N_31(eps/3), n_35(eps/3, 1)).
    const Threshold n31 = lemma31_threshold(eps / 3.0);
    if (auto it = consts.extra.find("n_35"); it != consts.extra.end()) {
        const auto n35 = static_cast<std::uint64_t>(it->second);
        if (n31.has_value()) {
            out.condition2 = std::max(*n31, n35);
        }
    } else {
        out.distribution_dependent.push_back("N_36_condition2 (needs n_35)");
    }
    return out;
}

Threshold lemma36_threshold(double eps, const BoundConstants& consts) {
    return lemma36_thresholds(eps, consts).condition3;
}

std::string Certificate::to_json() const {
    nlohmann::ordered_json j;
    j["eta"] = eta;
    j["M"] = M;
    nlohmann::ordered_json cs;
    cs["c_bernstein"] = constants.c_bernstein;
    cs["C_cubicnet"] = constants.C_cubicnet;
    cs["c_31"] = constants.c_31;
    cs["C_31"] = constants.C_31;
    for (const auto& [k, v] : constants.extra) cs[k] = v;
    j["constants"] = cs;
    j["epsilon_41"] = epsilon_41;
    j["epsilon_41_residual"] = epsilon_41_residual;
    j["w36"] = w36;
    j["w38"] = w38;
    j["w_final"] = w_final;
    nlohmann::ordered_json lc;
    for (const auto& [k, v] : log_cardinalities) lc[k] = v;
    j["log_cardinalities"] = lc;
    nlohmann::ordered_json th;
    for (const auto& [k, v] : thresholds) {
        if (v.has_value()) {
            th[k] = *v;
        } else {
            th[k] = "overflow";
        }
    }
    j["thresholds"] = th;
    j["distribution_dependent"] = distribution_dependent;
    return j.dump(2);
}

std::string Certificate::to_text() const {
    std::ostringstream os;
    os << "certificate (constants are user-supplied; defaults are illustrative)\n";
    os << "  eta                 = " << eta << "\n";
    os << "  M                   = " << M << "\n";
    os << "  epsilon_41          = " << epsilon_41 << "\n";
    os << "  epsilon_41 residual = " << epsilon_41_residual << "\n";
    os << "  w36 / w38 / w_final = " << w36 << " / " << w38 << " / " << w_final << "\n";
    os << "  log cardinalities:\n";
    for (const auto& [k, v] : log_cardinalities) {
        os << "    " << k << " = " << v << "\n";
    }
    os << "  thresholds:\n";
    for (const auto& [k, v] : thresholds) {
        os << "    " << k << " = ";
        if (v.has_value()) {
            os << *v;
        } else {
            os << "overflow";
        }
        os << "\n";
    }
    for (const auto& d : distribution_dependent) {
        os << "  distribution-dependent: " << d << "\n";
    }
    return os.str();
}

Certificate theorem42_certificate(double eta, double M, const BoundConstants& consts) {
    if (!(eta > 0.0) || !(M > 0.0)) throw std::invalid_argument("bad-params: eta, M > 0");
    consts.validate();
    Certificate cert;
    cert.eta = eta;
    cert.M = M;
    cert.constants = consts;

    // Truncated entries are bounded by 2M, so the submatrix step runs at 2M.
    cert.epsilon_41 = epsilon_for_eta(eta, 2.0 * M, consts.c_bernstein);
    cert.epsilon_41_residual =
        epsilon_for_eta_residual(cert.epsilon_41, eta, 2.0 * M, consts.c_bernstein);
    const double eps = cert.epsilon_41;

    const Lemma36Thresholds l36 = lemma36_thresholds(eps, consts);
    cert.w36 = l36.w36;
    cert.w38 = l36.w36 / 2.0;
    cert.distribution_dependent = l36.distribution_dependent;

    const Threshold n31 = lemma31_threshold(eps / 3.0);
    const Threshold n41 =
        smallest_threshold([&](std::uint64_t N) { return prop41_condition(N, eps); });

    // N_36 combines every available condition.
    Threshold n36 = l36.condition3;
    for (const Threshold& t : {l36.condition1, l36.condition2}) {
        if (n36.has_value() && t.has_value()) n36 = std::max(*n36, *t);
    }

    Threshold n38;
    if (n36.has_value()) {
        n38 = smallest_threshold_from(
            [&](std::uint64_t N) {
                return N > *n36 && prop38_condition(N, cert.w36);
            },
            *n36 + 1);
    }

    Threshold n42;
    if (n38.has_value() && n41.has_value()) {
        const std::uint64_t base = std::max(*n38, *n41) + 1;
        n42 = smallest_threshold_from(
            [&](std::uint64_t N) {
                return N > std::max(*n38, *n41) &&
                       theorem42_condition(N, eps, cert.w38);
            },
            base);
    }

    cert.w_final = std::min(eps / 2.0, cert.w38 / 2.0);

    if (l36.condition3.has_value()) {
        const auto n = static_cast<double>(*l36.condition3);
        cert.log_cardinalities.emplace_back("sparse_net_log_at_N36",
                                            log_net_cardinality(NetKind::Sparse, n, 0.0));
        cert.log_cardinalities.emplace_back(
            "cubic_net_log_at_N36",
            log_net_cardinality(NetKind::CubeNet, n, consts.C_cubicnet));
    }
    if (n41.has_value()) {
        const auto n = static_cast<double>(*n41);
        cert.log_cardinalities.emplace_back(
            "subset_family_log_at_N41",
            eps * n * std::log(2.0 * std::exp(1.0) / eps));
    }

    cert.thresholds.emplace_back("N_31(eps/3)", n31);
    cert.thresholds.emplace_back("N_36_condition3", l36.condition3);
    if (l36.condition1.has_value()) cert.thresholds.emplace_back("N_36_condition1", l36.condition1);
    if (l36.condition2.has_value()) cert.thresholds.emplace_back("N_36_condition2", l36.condition2);
    cert.thresholds.emplace_back("N_38", n38);
    cert.thresholds.emplace_back("N_41", n41);
    cert.thresholds.emplace_back("N_42", n42);
    return cert;
}

} // namespace rmtlab
