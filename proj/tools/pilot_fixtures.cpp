// Prints every statistical fixture that the test suite pins. Test expectations
// marked "pilot-pinned" were produced by this program at the seeds shown here;
// rerun it after any change to the sampling layer and refresh the constants.

#include <cstdio>

#include "rmtlab/bounds.hpp"
#include "rmtlab/distribution.hpp"
#include "rmtlab/matrix.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/trimmed_sup.hpp"

using namespace rmtlab;

int main() {
    // dist-lab: weighted-LLN probe, gaussian, uniform weights 1/n, trend in
    // the flatness delta = 1/n at fixed eps, 1e5 trials, seed 7.
    {
        const auto spec = make_spec(DistKind::Gaussian);
        for (std::size_t n : {25, 50, 100}) {
            const std::vector<double> w(n, 1.0 / static_cast<double>(n));
            const double f = weighted_sum_tail_probe(spec, w, 0.5, 100000, 7);
            std::printf("lln_trend n=%zu delta=%.4f freq=%.6f\n", n,
                        1.0 / static_cast<double>(n), f);
        }
        const std::vector<double> w(10000, 1.0 / 10000.0);
        std::printf("lln_gaussian_n1e4 freq=%.6f\n",
                    weighted_sum_tail_probe(spec, w, 0.1, 2000, 7));
    }

    // matrix-core lemma probes.
    {
        const auto gauss = make_spec(DistKind::Gaussian);
        const auto rade = make_spec(DistKind::Rademacher);
        std::printf("probe_trim_bound_gauss freq=%.6f\n",
                    lemma_probe(LemmaProbeKind::TrimBound, gauss, 200, 50, 0.1, 500, 11));
        std::printf("probe_iy_card_gauss freq=%.6f\n",
                    lemma_probe(LemmaProbeKind::IyCardinality, gauss, 200, 50, 0.6, 500, 11));
        std::printf("probe_vertex_rade stat=%.6f\n",
                    lemma_probe(LemmaProbeKind::Vertex, rade, 200, 50, 0.1, 1000, 11));
    }

    // dist-lab: truncation levels.
    {
        const auto gauss = make_spec(DistKind::Gaussian);
        const double M = choose_truncation_level(gauss, 0.1);
        const auto r = truncation_report(gauss, M);
        std::printf("gauss_trunc_level eta=0.1 M=%.8f var=%.10f tail=%.10f\n", M,
                    r.var_trunc, r.tail_second_moment);
        const auto r1 = truncation_report(gauss, 1.0);
        std::printf("gauss_trunc_report M=1 mu=%.12f var=%.12f tail=%.12f\n",
                    r1.mu_trunc, r1.var_trunc, r1.tail_second_moment);
        const auto pareto = make_spec(DistKind::SymmetricPareto, {2.5});
        const double Mp = choose_truncation_level(pareto, 0.1);
        std::printf("pareto_trunc_level eta=0.1 M=%.6f\n", Mp);
    }

    // spectral: MP CDF fixture.
    std::printf("mp_cdf t=1 z=0.25 value=%.12f\n", mp_cdf(1.0, 0.25));

    // trimmed-sup: exhaustive vs greedy on a 10x3 gaussian sample, k=2.
    {
        const auto A = sample_matrix(make_spec(DistKind::Gaussian), 10, 3, 2024);
        const auto ex = submatrix_ssv_min(A.matrix, 0.2, SsvMinStrategy::Exhaustive);
        const auto gr = submatrix_ssv_min(A.matrix, 0.2, SsvMinStrategy::Greedy);
        std::printf("ssv_min_10x3 seed=2024 exhaustive=%.12f greedy=%.12f\n", ex.value,
                    gr.value);
        std::printf("ssv_gap_probe_rade freq=%.6f\n",
                    ssv_gap_probe(make_spec(DistKind::Rademacher), 200, 50, 0.05, 0.3,
                                  200, 5));
    }

    // bounds.
    {
        const double e = epsilon_for_eta(0.5, 1.0, 0.5);
        std::printf("epsilon_for_eta eta=0.5 M=1 c=0.5 eps=%.14f residual=%.3e\n", e,
                    epsilon_for_eta_residual(e, 0.5, 1.0, 0.5));
        BoundConstants ones;
        const auto n36 = lemma36_threshold(1.0, ones);
        std::printf("lemma36_threshold eps=1 consts=1 N=%llu\n",
                    static_cast<unsigned long long>(n36.value_or(0)));
        const Certificate cert = theorem42_certificate(1.0, 1.0, ones);
        std::printf("cert eta=1 M=1 eps41=%.14f\n", cert.epsilon_41);
        for (const auto& [k, v] : cert.thresholds) {
            std::printf("cert threshold %s = %llu\n", k.c_str(),
                        static_cast<unsigned long long>(v.value_or(0)));
        }
    }
    return 0;
}
