#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmtlab/matrix.hpp"

namespace rmtlab {

// Certified lower bound on Q_eps(A) = sup_y min_{|I| >= N - eps N} |P_I A y|
// with the witness that attains it.
struct TrimmedSupEstimate {
    double value = 0.0;
    std::vector<double> witness_y;
    IndexSet dropped; // |dropped| = k, the trimmed coordinates at the witness
    std::size_t restarts_used = 0;
    std::size_t iterations = 0; // max ascent steps used by any single start
    double upper_bound = 0.0;   // running estimate of s1(A), never below value
    double eps = 0.0;
    std::size_t k = 0;

    std::string to_json() const;
};

// Alternating max-min ascent with multistart. Starts: top right singular
// vector of A, then e_1..e_min(m,5), then random unit vectors, `restarts`
// in total. A step recomputes the keep-set for the current y, then the top
// right singular vector of the projected matrix; it is accepted only if the
// objective improves by more than `tol` (default 1e-9 sqrt(N) when tol < 0).
TrimmedSupEstimate estimate_sup_trimmed(const Matrix& A, double eps,
                                        std::size_t restarts = 20,
                                        std::size_t max_iters = 50,
                                        double tol = -1.0,
                                        std::uint64_t seed = 0);

// Oracle for m <= 2: direct maximization over the sign pair (m = 1) or a
// uniform angular grid (m = 2, `grid_points` angles).
double brute_force_sup_trimmed(const Matrix& A, double eps,
                               std::size_t grid_points = 10000);

enum class SsvMinStrategy { Exhaustive, Greedy, RandomSubsets };

struct SsvMinResult {
    double value = 0.0;
    IndexSet kept;
};

// min over |I| >= N - eps N of s_m(P_I A). Exhaustive (N <= 12, k <= 3) is
// exact; greedy deletes the row maximizing |<row_i, y_min>| k times; random
// takes the best of `samples` subsets. All results upper-bound the true
// minimum; exhaustive attains it.
SsvMinResult submatrix_ssv_min(const Matrix& A, double eps,
                               SsvMinStrategy strategy,
                               std::size_t samples = 100,
                               std::uint64_t seed = 0);

// Frequency over trials of { s_m(A) > greedy_min + eta sqrt(N) }. The greedy
// estimate upper-bounds the true minimum, so the reported frequency is
// estimate-relative, not an upper bound on the true failure rate.
double ssv_gap_probe(const DistributionSpec& spec, std::size_t N, std::size_t m,
                     double eps, double eta, std::size_t trials,
                     std::uint64_t seed);

} // namespace rmtlab
