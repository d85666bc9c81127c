// Acceptance suite: every criterion runs at its stated tolerance and prints
// one [PASS]/[FAIL] line; the binary exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rmtlab/bounds.hpp"
#include "rmtlab/distribution.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/matrix.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/trimmed_sup.hpp"

using namespace rmtlab;

namespace {

int g_failures = 0;

void report(int criterion, const char* label, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, label,
                detail.c_str());
    if (!ok) ++g_failures;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// -- criterion 1: convergence, plus the desk-scale limsup check --------------
void criterion1() {
    ExperimentConfig c;
    c.experiment = Experiment::Converge;
    c.dist = "gaussian";
    c.z = 0.25;
    c.m_list = {400};
    c.trials = 50;
    c.seed = 20251;
    c.workers = 1; // the runtime budget is single-threaded
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult res = run_convergence_sweep(c);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    double mean = 0.0;
    int limsup_ok = 0;
    for (const TrialRecord& r : res.records) {
        mean += r.sm_scaled;
        if (r.sm_scaled <= 0.5 + 0.08) ++limsup_ok;
    }
    mean /= static_cast<double>(res.records.size());

    report(1, "mean sm_scaled in [0.45, 0.55], gaussian z=0.25 m=400",
           mean >= 0.45 && mean <= 0.55, "mean=" + fmt(mean));
    report(1, "single-threaded runtime <= 60 s", secs <= 60.0, fmt(secs) + " s");
    // Finite-m surrogate for limsup sm/sqrt(N) <= 1-sqrt(z): 95% of trials
    // within +0.08 of the target.
    report(1, "scaled_sm <= (1-sqrt(z)) + 0.08 in >= 95% of trials",
           limsup_ok >= 48, std::to_string(limsup_ok) + "/50");
}

// -- criteria 2 and 3: heavy-tailed contrast and trimmed-sup boundedness -----
void criteria2and3() {
    ExperimentConfig c;
    c.experiment = Experiment::HeavyTail;
    c.dist = "symmetric-pareto:alpha=2.5";
    c.z = 0.25;
    c.m_list = {200, 400};
    c.trials = 50;
    c.eps = 0.1;
    c.seed = 20252;
    c.workers = 2;
    const RunResult res = run_heavy_tail_contrast(c);

    std::vector<double> sm400, s1_400, q200, q400;
    for (const TrialRecord& r : res.records) {
        const double rootN = std::sqrt(static_cast<double>(r.N));
        if (r.m == 400) {
            sm400.push_back(r.sm_scaled);
            s1_400.push_back(r.s1 / rootN);
            q400.push_back(r.q_eps / rootN);
        } else {
            q200.push_back(r.q_eps / rootN);
        }
    }
    const double med_sm = median_of(sm400);
    const double med_s1 = median_of(s1_400);
    report(2, "median sm_scaled in [0.42, 0.58], pareto alpha=2.5 m=400",
           med_sm >= 0.42 && med_sm <= 0.58, "median=" + fmt(med_sm));
    report(2, "median s1/sqrt(N) >= 2 (norm blow-up coexists)", med_s1 >= 2.0,
           "median=" + fmt(med_s1));

    const double mq200 = median_of(q200), mq400 = median_of(q400);
    const double ratio = std::max(mq200, mq400) / std::min(mq200, mq400);
    report(3, "median q_eps/sqrt(N) within factor 1.3 between m=200 and m=400",
           ratio <= 1.3, "m200=" + fmt(mq200) + " m400=" + fmt(mq400) +
                             " ratio=" + fmt(ratio));
}

// -- criterion 4: Marchenko-Pastur law ---------------------------------------
void criterion4() {
    ExperimentConfig c;
    c.experiment = Experiment::MpCheck;
    c.dist = "gaussian";
    c.z = 0.25;
    c.m_list = {400};
    c.trials = 20;
    c.seed = 20254;
    c.workers = 2;
    const RunResult res = run_mp_check(c);
    const QuantileRow* ks = res.summary.find("ks", 400);
    const double med = ks ? ks->median : 1.0;
    report(4, "median KS(ESD, F_MP) <= 0.05, gaussian z=0.25 m=400", med <= 0.05,
           "median=" + fmt(med));

    // The second-moment-only variant of the same law.
    ExperimentConfig p = c;
    p.dist = "symmetric-pareto:alpha=2.5";
    const RunResult pres = run_mp_check(p);
    const QuantileRow* pks = pres.summary.find("ks", 400);
    const double pmed = pks ? pks->median : 1.0;
    report(4, "median KS <= 0.08 for symmetric-pareto alpha=2.5", pmed <= 0.08,
           "median=" + fmt(pmed));
}

// -- criterion 5: exact oracle equivalences ----------------------------------
void criterion5() {
    // trimmed_norm vs subset enumeration, bit-exact, 1000 cases
    std::size_t exact = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng::bits(91, t, 0) % 11;
        const double eps = rng::uniform01(rng::bits(91, t, 1));
        const auto x = sample_entries(make_spec(DistKind::Gaussian), n, 5000 + t);
        if (trimmed_norm(x, drop_count(eps, n)) == brute_force_trimmed_min(x, eps)) {
            ++exact;
        }
    }
    report(5, "trimmed_norm == brute force on 1000 cases (exact)", exact == 1000,
           std::to_string(exact) + "/1000");

    // exhaustive vs greedy sandwich, 100 cases, N <= 12, k <= 2
    std::size_t sandwich = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const std::size_t N = 6 + rng::bits(92, t, 0) % 7;  // 6..12
        const std::size_t m = 2 + rng::bits(92, t, 1) % 3;  // 2..4
        const double eps = (rng::bits(92, t, 2) % 2 == 0) ? 2.4 / static_cast<double>(N)
                                                          : 1.4 / static_cast<double>(N);
        const auto A = sample_matrix(make_spec(DistKind::Gaussian), N, m, 7000 + t);
        const auto ex = submatrix_ssv_min(A.matrix, eps, SsvMinStrategy::Exhaustive);
        const auto gr = submatrix_ssv_min(A.matrix, eps, SsvMinStrategy::Greedy);
        const double sm = bottom_singular_pair(A.matrix, nullptr).sigma;
        if (ex.value <= gr.value + 1e-12 && gr.value <= sm + 1e-10) ++sandwich;
    }
    report(5, "exhaustive <= greedy <= s_m on 100 cases", sandwich == 100,
           std::to_string(sandwich) + "/100");

    // ascent vs angular grid oracle at m <= 2, within 1e-6, 100 cases
    std::size_t matched = 0;
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const std::size_t N = 4 + rng::bits(93, t, 0) % 9; // 4..12
        const std::size_t m = 1 + rng::bits(93, t, 1) % 2;
        const double eps = 0.5 * rng::uniform01(rng::bits(93, t, 2));
        const auto A = sample_matrix(make_spec(DistKind::Gaussian), N, m, 9000 + t);
        const double grid = brute_force_sup_trimmed(A.matrix, eps, 200000);
        const auto est = estimate_sup_trimmed(A.matrix, eps, 40, 80, 1e-12, t);
        worst = std::max(worst, std::abs(est.value - grid));
        if (std::abs(est.value - grid) <= 1e-6) ++matched;
    }
    report(5, "estimate_sup_trimmed within 1e-6 of the m<=2 grid oracle", matched == 100,
           std::to_string(matched) + "/100 worst=" + fmt(worst));
}

// -- criterion 6: numeric accuracy -------------------------------------------
void criterion6() {
    // 4x2 grid minimization within 1e-3
    double worst_sv = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto A = sample_matrix(make_spec(DistKind::Gaussian), 4, 2, 100 + seed);
        const auto s = singular_values(A.matrix);
        double grid_min = 1e300;
        std::vector<double> y(2);
        for (int g = 0; g < 10000; ++g) {
            const double th = 2.0 * std::numbers::pi * g / 10000.0;
            y[0] = std::cos(th);
            y[1] = std::sin(th);
            grid_min = std::min(grid_min, norm2(matvec(A.matrix, y)));
        }
        worst_sv = std::max(worst_sv, std::abs(s.sm - grid_min));
    }
    report(6, "singular_values vs 1e4-point grid on 4x2 within 1e-3", worst_sv <= 1e-3,
           "worst=" + fmt(worst_sv));

    // mp_cdf vs the independent fixed-node oracle on a 100-point grid
    double worst_mp = 0.0;
    for (double z : {0.25, 0.5, 0.81}) {
        const double r = (1.0 - std::sqrt(z)) * (1.0 - std::sqrt(z));
        const double R = (1.0 + std::sqrt(z)) * (1.0 + std::sqrt(z));
        for (int i = 0; i < 100; ++i) {
            const double t = r + (R - r) * (i + 0.5) / 100.0;
            worst_mp = std::max(worst_mp, std::abs(mp_cdf(t, z) - oracle::mp_cdf(t, z)));
        }
    }
    report(6, "mp_cdf vs high-node oracle within 1e-8 on 100-point grids",
           worst_mp <= 1e-8, "worst=" + fmt(worst_mp));

    // eigensolver residuals
    double worst_res = 0.0;
    for (std::size_t m : {5, 20, 50}) {
        const auto A = sample_matrix(make_spec(DistKind::Gaussian), 3 * m, m, 55 + m);
        const Matrix G = gram(A.matrix);
        worst_res = std::max(worst_res, max_pair_residual(G, jacobi_eigensolve(G, true)));
    }
    report(6, "eigensolver residuals <= 1e-10", worst_res <= 1e-10,
           "worst=" + fmt(worst_res));
}

// -- criterion 7: truncation machinery ---------------------------------------
void criterion7() {
    // tail identity across the grid, against the independent oracle route
    double worst = 0.0;
    const std::vector<DistributionSpec> kinds = {
        make_spec(DistKind::Gaussian),
        make_spec(DistKind::Rademacher),
        make_spec(DistKind::Uniform),
        make_spec(DistKind::SymmetricPareto, {2.5}),
        make_spec(DistKind::StudentT, {3.0}),
        make_spec(DistKind::TwoPoint, {0.3}),
    };
    for (const auto& spec : kinds) {
        for (double M : {0.5, 1.0, 2.0, 4.0, 8.0, 32.0}) {
            const auto r = truncation_report(spec, M);
            worst = std::max(worst, std::abs(r.tail_second_moment -
                                             oracle::tail_second_moment(spec, M)));
        }
    }
    report(7, "tail identity residual <= 1e-8 across the (spec, M) grid", worst <= 1e-8,
           "worst=" + fmt(worst));

    // chooser outputs re-verify both conditions
    bool chooser_ok = true;
    std::string chooser_note;
    for (const auto& spec : kinds) {
        for (double eta : {0.1, 0.3}) {
            const double M = choose_truncation_level(spec, eta);
            const auto r = truncation_report(spec, M);
            if (!(r.var_trunc >= (1.0 - eta) * (1.0 - eta) &&
                  r.tail_second_moment <= eta * eta + 1e-12)) {
                chooser_ok = false;
                chooser_note = spec_key(spec) + " eta=" + fmt(eta);
            }
        }
    }
    report(7, "choose_truncation_level outputs re-verify", chooser_ok, chooser_note);

    // coupled truncation pipeline, one-sided gap acceptance
    ExperimentConfig c;
    c.experiment = Experiment::TruncatePipeline;
    c.dist = "symmetric-pareto:alpha=2.5";
    c.z = 0.25;
    c.m_list = {400};
    c.trials = 50;
    c.eta = 0.1;
    c.seed = 20257;
    c.workers = 2;
    const RunResult res = run_truncation_pipeline(c);
    int ok = 0;
    for (const TrialRecord& r : res.records) {
        if (r.gap_scaled <= 0.15) ++ok;
    }
    report(7, "fraction{gap_scaled <= 0.15} >= 0.95, pareto eta=0.1 m=400",
           ok >= 48, std::to_string(ok) + "/50");
}

// -- criterion 8: certificates ------------------------------------------------
void criterion8() {
    // residual and failure just above the root, across a parameter grid
    bool root_ok = true;
    std::string note;
    for (double eta : {0.1, 0.5, 1.0}) {
        for (double M : {0.5, 1.0, 4.0}) {
            for (double cc : {0.25, 1.0}) {
                const double eps = epsilon_for_eta(eta, M, cc);
                const double lhs = cc * eta * eta / (2.0 * M * M);
                if (eps < 1.0) {
                    if (std::abs(epsilon_for_eta_residual(eps, eta, M, cc)) > 1e-12 * lhs) {
                        root_ok = false;
                        note = "residual at eta=" + fmt(eta);
                    }
                    if (1.01 * eps <= 1.0 &&
                        epsilon_for_eta_residual(1.01 * eps, eta, M, cc) >= 0.0) {
                        root_ok = false;
                        note = "no failure at 1.01*eps";
                    }
                }
            }
        }
    }
    report(8, "epsilon_for_eta residual <= 1e-12 and failure at 1.01 eps*", root_ok, note);

    // thresholds from the composed certificate hold and fail at T-1
    BoundConstants ones;
    const Certificate cert = theorem42_certificate(1.0, 1.0, ones);
    auto get = [&](const std::string& name) -> Threshold {
        for (const auto& [k, v] : cert.thresholds) {
            if (k == name) return v;
        }
        return std::nullopt;
    };
    const double eps = cert.epsilon_41;
    bool thr_ok = true;
    std::string thr_note;
    auto check_pair = [&](const std::string& name,
                          const std::function<bool(std::uint64_t)>& cond) {
        const Threshold t = get(name);
        if (!t.has_value()) {
            thr_ok = false;
            thr_note = name + " overflowed";
            return;
        }
        if (!holds_with_tail(cond, *t) || (*t > 1 && holds_with_tail(cond, *t - 1))) {
            thr_ok = false;
            thr_note = name + " boundary wrong";
        }
    };
    check_pair("N_31(eps/3)",
               [&](std::uint64_t N) { return lemma31_condition(N, eps / 3.0); });
    check_pair("N_36_condition3",
               [&](std::uint64_t N) { return lemma36_condition3(N, eps, ones); });
    check_pair("N_41", [&](std::uint64_t N) { return prop41_condition(N, eps); });
    {
        const auto n36 = get("N_36_condition3");
        const auto n38 = get("N_38");
        const auto n41 = get("N_41");
        const auto n42 = get("N_42");
        if (!(n36 && n38 && n41 && n42)) {
            thr_ok = false;
            thr_note = "missing threshold";
        } else {
            if (!(*n38 > *n36 && prop38_condition(*n38, cert.w36)) ||
                (*n38 - 1 > *n36 && prop38_condition(*n38 - 1, cert.w36))) {
                thr_ok = false;
                thr_note = "N_38 boundary wrong";
            }
            const std::uint64_t lower = std::max(*n38, *n41);
            if (!(*n42 > lower && theorem42_condition(*n42, eps, cert.w38)) ||
                (*n42 - 1 > lower && theorem42_condition(*n42 - 1, eps, cert.w38))) {
                thr_ok = false;
                thr_note = "N_42 boundary wrong";
            }
        }
    }
    report(8, "every finite threshold holds and fails at T-1", thr_ok, thr_note);

    const std::uint64_t big = 1ULL << 62;
    const bool finite_ok = lemma31_condition(big, 1e-6) &&
                           lemma36_condition3(big, 1e-3, ones) &&
                           theorem42_condition(big, 1e-6, 1e-6) &&
                           std::isfinite(log_net_cardinality(NetKind::Sparse,
                                                             static_cast<double>(big), 0.0));
    report(8, "log-space evaluations finite for N up to 2^62", finite_ok, "");
}

// -- criterion 9: determinism --------------------------------------------------
void criterion9() {
    auto jsonl_of = [](const ExperimentConfig& c) {
        const RunResult res = run_experiment(c);
        std::ostringstream os;
        write_records(res.records, os, OutputFormat::Jsonl);
        return os.str();
    };

    ExperimentConfig c;
    c.experiment = Experiment::Converge;
    c.dist = "gaussian";
    c.z = 0.25;
    c.m_list = {50};
    c.trials = 10;
    c.seed = 20259;
    c.workers = 1;
    const std::string w1 = jsonl_of(c);
    c.workers = 8;
    const std::string w8 = jsonl_of(c);
    const std::string w8b = jsonl_of(c);
    bool ok = (w1 == w8) && (w8 == w8b);

    // the heavy-tail path carries the estimator and must stay deterministic too
    ExperimentConfig h;
    h.experiment = Experiment::HeavyTail;
    h.dist = "symmetric-pareto:alpha=2.5";
    h.z = 0.25;
    h.m_list = {30};
    h.trials = 4;
    h.eps = 0.1;
    h.seed = 20259;
    h.workers = 1;
    const std::string h1 = jsonl_of(h);
    h.workers = 8;
    const std::string h8 = jsonl_of(h);
    ok = ok && (h1 == h8);

    report(9, "byte-identical JSONL across runs and worker counts", ok,
           ok ? "converge and heavy-tail configs" : "byte difference found");
}

} // namespace

int main() {
    criterion1();
    criteria2and3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d check(s) failed\n", g_failures);
    return 1;
}
