#pragma once

#include <string>
#include <vector>

#include "rmtlab/matrix.hpp"

namespace rmtlab {

// Eigen-decomposition of a symmetric matrix: eigenvalues descending,
// eigenvectors[i] is the unit eigenvector of eigenvalues[i], with its first
// nonzero coordinate positive.
struct SymmetricEigen {
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
};

// Cyclic Jacobi with threshold skipping; converged when the off-diagonal
// Frobenius mass drops below 1e-14 * ||G||_F. Throws on non-convergence.
SymmetricEigen jacobi_eigensolve(const Matrix& G, bool want_vectors = true);

// max_i ||G v_i - lambda_i v_i|| / ||G||_2 over the returned pairs.
double max_pair_residual(const Matrix& G, const SymmetricEigen& eig);

// G = A^T A (m x m, symmetric PSD).
Matrix gram(const Matrix& A);
// Gram of the rows of A listed in I.
Matrix gram_rows(const Matrix& A, const IndexSet& I);

struct SpectralSummary {
    std::vector<double> singular_values; // descending
    double s1 = 0.0;
    double sm = 0.0;
    double scaled_s1 = 0.0; // s1 / sqrt(N)
    double scaled_sm = 0.0; // sm / sqrt(N)
};

// Singular values of an N x m matrix via the Gram eigensolve; per-pair
// relative residual ||A^T A v - lambda v|| / ||A^T A|| <= 1e-10.
SpectralSummary singular_values(const Matrix& A);

// Right-continuous step CDF of the eigenvalues of (1/N) A^T A.
struct EsdCurve {
    std::vector<double> jumps; // sorted eigenvalues of (1/N) A^T A
    double operator()(double t) const; // F(t) = #{lambda_j <= t} / m

    std::size_t m() const { return jumps.size(); }
};

EsdCurve esd(const Matrix& A);

// Marchenko-Pastur CDF with aspect ratio z in (0,1); support
// [(1-sqrt(z))^2, (1+sqrt(z))^2]. Absolute quadrature error <= 1e-10.
double mp_cdf(double t, double z);

// sup_t |F_emp(t) - F_MP(t)|, evaluated at jump points and their left limits
// (exact for a step function against a continuous monotone CDF).
double ks_distance(const EsdCurve& curve, double z);

// CSV export: header "lambda,F_emp,F_mp", sorted by lambda.
void export_esd_csv(const EsdCurve& curve, double z, const std::string& path);

// Largest singular value and unit right singular vector. Uses the Jacobi
// solve for small m, warm-startable power iteration above; the returned
// sigma always equals ||A v|| for the returned v (a certified lower bound
// on s1 of accuracy controlled by `max_matvecs`).
struct TopSingularPair {
    double sigma = 0.0;
    std::vector<double> v;
};

TopSingularPair top_singular_pair(const Matrix& A, const IndexSet* rows,
                                  const std::vector<double>* warm_start,
                                  std::size_t max_matvecs = 600);

// Smallest singular value and right singular vector (full Jacobi solve).
TopSingularPair bottom_singular_pair(const Matrix& A, const IndexSet* rows);

} // namespace rmtlab
