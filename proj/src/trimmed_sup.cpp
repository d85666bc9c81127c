#include "rmtlab/trimmed_sup.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

namespace {

// Keep-set for the current iterate: all rows except the k largest |(Ay)_i|,
// ties dropping the lower index (the same rule as trimmed_norm).
IndexSet keep_set(std::span<const double> Ay, std::size_t k) {
    IndexSet dropped;
    trimmed_norm_with_dropped(Ay, k, dropped);
    IndexSet kept;
    kept.reserve(Ay.size() - k);
    std::size_t d = 0;
    for (std::size_t i = 0; i < Ay.size(); ++i) {
        if (d < dropped.size() && dropped[d] == i) {
            ++d;
        } else {
            kept.push_back(i);
        }
    }
    return kept;
}

std::vector<double> random_unit(std::size_t m, std::uint64_t seed, std::uint64_t idx) {
    std::vector<double> y(m);
    const std::uint64_t s = rng::derive(seed, idx, 0xabcd);
    for (std::size_t j = 0; j < m; ++j) {
        const double u1 = rng::uniform_pos(rng::bits(s, j, 0));
        const double u2 = rng::uniform01(rng::bits(s, j, 1));
        y[j] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    const double n = norm2(y);
    for (double& v : y) v /= (n > 0.0 ? n : 1.0);
    return y;
}

} // namespace

std::string TrimmedSupEstimate::to_json() const {
    nlohmann::ordered_json j;
    j["value"] = value;
    j["eps"] = eps;
    j["k"] = k;
    j["restarts_used"] = restarts_used;
    j["iterations"] = iterations;
    j["upper_bound"] = upper_bound;
    j["witness_norm_check"] = norm2(witness_y);
    return j.dump();
}

TrimmedSupEstimate estimate_sup_trimmed(const Matrix& A, double eps,
                                        std::size_t restarts,
                                        std::size_t max_iters, double tol,
                                        std::uint64_t seed) {
    const std::size_t N = A.rows, m = A.cols;
    if (restarts < 1) throw std::invalid_argument("invalid-params: restarts >= 1");
    const std::size_t k = drop_count(eps, N);
    if (tol < 0.0) tol = 1e-9 * std::sqrt(static_cast<double>(N));

    TrimmedSupEstimate best;
    best.eps = eps;
    best.k = k;
    best.value = -1.0;

    const TopSingularPair top = top_singular_pair(A, nullptr, nullptr);
    double upper = top.sigma;

    std::size_t random_idx = 0;
    std::size_t max_steps_used = 0;
    for (std::size_t start = 0; start < restarts; ++start) {
        std::vector<double> y;
        if (start == 0) {
            y = top.v;
        } else if (start <= std::min<std::size_t>(m, 5)) {
            y.assign(m, 0.0);
            y[start - 1] = 1.0;
        } else {
            y = random_unit(m, seed, random_idx++);
        }

        std::vector<double> Ay = matvec(A, y);
        upper = std::max(upper, norm2(Ay));
        double f = trimmed_norm(Ay, k);
        std::size_t steps = 0;
        while (steps < max_iters) {
            const IndexSet kept = keep_set(Ay, k);
            const TopSingularPair next = top_singular_pair(A, &kept, &y);
            std::vector<double> Ay2 = matvec(A, next.v);
            upper = std::max(upper, norm2(Ay2));
            const double f2 = trimmed_norm(Ay2, k);
            if (!(f2 > f + tol)) break;
            y = next.v;
            Ay = std::move(Ay2);
            f = f2;
            ++steps;
        }
        max_steps_used = std::max(max_steps_used, steps);
        if (f > best.value) {
            best.value = f;
            best.witness_y = y;
        }
    }

    best.restarts_used = restarts;
    best.iterations = max_steps_used;
    const std::vector<double> Aw = matvec(A, best.witness_y);
    best.value = trimmed_norm_with_dropped(Aw, k, best.dropped);
    best.upper_bound = std::max(upper, best.value);
    return best;
}

double brute_force_sup_trimmed(const Matrix& A, double eps,
                               std::size_t grid_points) {
    const std::size_t m = A.cols;
    if (m > 2) throw std::invalid_argument("too-large: grid oracle limited to m <= 2");
    if (grid_points < 1000) throw std::invalid_argument("invalid-params: grid_points >= 1e3");
    const std::size_t k = drop_count(eps, A.rows);
    if (m == 1) {
        std::vector<double> col(A.rows);
        for (std::size_t i = 0; i < A.rows; ++i) col[i] = A(i, 0);
        return trimmed_norm(col, k); // same value at y = -1
    }
    double bestv = 0.0;
    std::vector<double> y(2);
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(g) /
                          static_cast<double>(grid_points);
        y[0] = std::cos(th);
        y[1] = std::sin(th);
        bestv = std::max(bestv, trimmed_norm(matvec(A, y), k));
    }
    return bestv;
}

namespace {

// All drop sets of size 0..max_drop, lexicographic.
void enumerate_drops(std::size_t N, std::size_t max_drop,
                     const std::function<void(const IndexSet&)>& visit) {
    IndexSet drops;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t from,
                                                            std::size_t left) {
        if (left == 0) {
            visit(drops);
            return;
        }
        for (std::size_t i = from; i + left <= N; ++i) {
            drops.push_back(i);
            rec(i + 1, left - 1);
            drops.pop_back();
        }
    };
    for (std::size_t d = 0; d <= max_drop; ++d) rec(0, d);
}

IndexSet complement(std::size_t N, const IndexSet& drops) {
    IndexSet kept;
    kept.reserve(N - drops.size());
    std::size_t d = 0;
    for (std::size_t i = 0; i < N; ++i) {
        if (d < drops.size() && drops[d] == i) {
            ++d;
        } else {
            kept.push_back(i);
        }
    }
    return kept;
}

} // namespace

SsvMinResult submatrix_ssv_min(const Matrix& A, double eps,
                               SsvMinStrategy strategy, std::size_t samples,
                               std::uint64_t seed) {
    const std::size_t N = A.rows;
    const std::size_t k = drop_count(eps, N);
    SsvMinResult best;

    switch (strategy) {
    case SsvMinStrategy::Exhaustive: {
        if (N > 12 || k > 3) {
            throw std::invalid_argument("too-large: exhaustive needs N <= 12, k <= 3");
        }
        best.value = -1.0;
        enumerate_drops(N, k, [&](const IndexSet& drops) {
            const IndexSet kept = complement(N, drops);
            const double s = bottom_singular_pair(A, &kept).sigma;
            if (best.value < 0.0 || s < best.value) {
                best.value = s;
                best.kept = kept;
            }
        });
        return best;
    }
    case SsvMinStrategy::Greedy: {
        IndexSet kept(N);
        std::iota(kept.begin(), kept.end(), 0);
        TopSingularPair bottom = bottom_singular_pair(A, &kept);
        for (std::size_t step = 0; step < k; ++step) {
            // First-order effect of deleting row i on the smallest singular
            // value is -<row_i, y_min>^2; delete the largest score.
            std::size_t victim = kept.front();
            double score = -1.0;
            for (std::size_t i : kept) {
                const double* row = A.data.data() + i * A.cols;
                double dot = 0.0;
                for (std::size_t j = 0; j < A.cols; ++j) dot += row[j] * bottom.v[j];
                if (std::abs(dot) > score) {
                    score = std::abs(dot);
                    victim = i;
                }
            }
            kept.erase(std::find(kept.begin(), kept.end(), victim));
            bottom = bottom_singular_pair(A, &kept);
        }
        best.value = bottom.sigma;
        best.kept = kept;
        return best;
    }
    case SsvMinStrategy::RandomSubsets: {
        if (samples < 1) throw std::invalid_argument("invalid-params: samples >= 1");
        best.value = -1.0;
        std::vector<std::size_t> perm(N);
        for (std::size_t t = 0; t < samples; ++t) {
            std::iota(perm.begin(), perm.end(), 0);
            const std::uint64_t s = rng::derive(seed, t, 0x5e7);
            for (std::size_t i = N - 1; i > 0; --i) {
                const std::size_t j = rng::bits(s, i) % (i + 1);
                std::swap(perm[i], perm[j]);
            }
            IndexSet kept(perm.begin(), perm.begin() + (N - k));
            std::sort(kept.begin(), kept.end());
            const double v = bottom_singular_pair(A, &kept).sigma;
            if (best.value < 0.0 || v < best.value) {
                best.value = v;
                best.kept = kept;
            }
        }
        return best;
    }
    }
    throw std::logic_error("unreachable");
}

double ssv_gap_probe(const DistributionSpec& spec, std::size_t N, std::size_t m,
                     double eps, double eta, std::size_t trials,
                     std::uint64_t seed) {
    if (!spec.bounded_support()) {
        throw std::invalid_argument("unbounded-spec: gap probe needs a.s. bounded entries");
    }
    if (trials < 1) throw std::invalid_argument("invalid-params: trials >= 1");
    const double shift = eta * std::sqrt(static_cast<double>(N));
    std::size_t fails = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const MatrixSample A = sample_matrix(spec, N, m, rng::derive(seed, t, 0x6a9));
        const double sm = bottom_singular_pair(A.matrix, nullptr).sigma;
        const SsvMinResult r = submatrix_ssv_min(A.matrix, eps, SsvMinStrategy::Greedy);
        if (sm > r.value + shift) ++fails;
    }
    return static_cast<double>(fails) / static_cast<double>(trials);
}

} // namespace rmtlab
