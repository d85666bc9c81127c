#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rmtlab/distribution.hpp"

namespace rmtlab {

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
};

// One realized N x m entry matrix with its provenance. Entry (i,j) equals
// sample_entries(spec, N*m, seed) at flat index i*m + j (0-based).
struct MatrixSample {
    Matrix matrix;
    DistributionSpec spec;
    std::uint64_t seed = 0;

    std::size_t N() const { return matrix.rows; }
    std::size_t m() const { return matrix.cols; }
};

// Subset of row indices, kept sorted and distinct, values in [0, N).
using IndexSet = std::vector<std::size_t>;

MatrixSample sample_matrix(const DistributionSpec& spec, std::size_t N,
                           std::size_t m, std::uint64_t seed);

// y = A x.
std::vector<double> matvec(const Matrix& A, std::span<const double> x);
// y = A^T x.
std::vector<double> matvec_transpose(const Matrix& A, std::span<const double> x);

double norm2(std::span<const double> x);

// Drop count k = floor(eps * N); keeping N - k coordinates satisfies the
// cardinality constraint |I| >= N - eps*N.
std::size_t drop_count(double eps, std::size_t N);

// sqrt(|x|^2 - sum of the k largest squared entries). Equals
// min over |I| >= len-k of |P_I x|. Ties drop the lower index first.
double trimmed_norm(std::span<const double> x, std::size_t k);

// Same, also reporting which indices were dropped (size k, sorted).
double trimmed_norm_with_dropped(std::span<const double> x, std::size_t k,
                                 IndexSet& dropped);

// Exact minimum of |P_I x| over all |I| >= len - eps*len by subset
// enumeration; len <= 20.
double brute_force_trimmed_min(std::span<const double> x, double eps);

// Rows outside I zeroed; shape preserved.
Matrix row_projection(const Matrix& A, const IndexSet& I);

// { i < N : sum_j a_ij^2 y_j^2 <= 2 } for unit y.
IndexSet compute_Iy(const Matrix& A, std::span<const double> y);

// The sparse/flat split behind the sphere decomposition: y = y1 + y2 + y3
// with y1 supported on the floor(sqrt(N)) largest coordinates, |y1| <= 2,
// |y2| = 1, |y2|_inf <= 1/floor(N^(1/4)), y3 = 0.
struct SphereDecomposition {
    std::vector<double> y1;
    std::vector<double> y2;
    std::vector<double> y3;
    IndexSet J;
    double r = 0.0;
};

SphereDecomposition sphere_decompose(std::span<const double> y);

enum class LemmaProbeKind { TrimBound, IyCardinality, Vertex };

// Monte Carlo probes for the per-vector estimates:
//   TrimBound     -> frequency of { trimmed_norm(X, floor(eps*N)) > sqrt(2eN) }
//                    over i.i.d. N-vectors X,
//   IyCardinality -> frequency of { |I_y| <= N - eps*N } for flat y,
//   Vertex        -> max over sampled sign vertices v in {+-m^(-1/2)}^m of
//                    trimmed_norm(Av, floor(eps*N)) / sqrt(mN), as a scalar.
double lemma_probe(LemmaProbeKind kind, const DistributionSpec& spec,
                   std::size_t N, std::size_t m, double eps,
                   std::size_t trials, std::uint64_t seed);

// Binary matrix format: magic, version, N, m, spec key, seed, then row-major
// little-endian doubles.
void save_matrix(const MatrixSample& sample, std::ostream& out);
MatrixSample load_matrix(std::istream& in);
void save_matrix_file(const MatrixSample& sample, const std::string& path);
MatrixSample load_matrix_file(const std::string& path);

} // namespace rmtlab
