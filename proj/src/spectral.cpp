#include "rmtlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rmtlab/quadrature.hpp"

namespace rmtlab {

namespace {

constexpr double kOffDiagTarget = 1e-14; // relative to ||G||_F
constexpr int kMaxSweeps = 60;

double frobenius(const Matrix& G) {
    double s = 0.0;
    for (double v : G.data) s += v * v;
    return std::sqrt(s);
}

double offdiag_frobenius(const Matrix& G) {
    const std::size_t n = G.rows;
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            s += G(p, q) * G(p, q);
        }
    }
    return std::sqrt(2.0 * s);
}

void fix_sign(std::vector<double>& v) {
    double maxabs = 0.0;
    for (double x : v) maxabs = std::max(maxabs, std::abs(x));
    if (maxabs == 0.0) return;
    for (double x : v) {
        if (std::abs(x) > 1e-14 * maxabs) {
            if (x < 0.0) {
                for (double& y : v) y = -y;
            }
            return;
        }
    }
}

} // namespace

Matrix gram(const Matrix& A) {
    const std::size_t N = A.rows, m = A.cols;
    Matrix G(m, m);
    for (std::size_t i = 0; i < N; ++i) {
        const double* row = A.data.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double aij = row[j];
            if (aij == 0.0) continue;
            double* gj = G.data.data() + j * m;
            for (std::size_t l = j; l < m; ++l) gj[l] += aij * row[l];
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t l = j + 1; l < m; ++l) G(l, j) = G(j, l);
    }
    return G;
}

Matrix gram_rows(const Matrix& A, const IndexSet& I) {
    const std::size_t m = A.cols;
    Matrix G(m, m);
    for (std::size_t i : I) {
        if (i >= A.rows) throw std::out_of_range("index-out-of-range: gram_rows");
        const double* row = A.data.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double aij = row[j];
            if (aij == 0.0) continue;
            double* gj = G.data.data() + j * m;
            for (std::size_t l = j; l < m; ++l) gj[l] += aij * row[l];
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t l = j + 1; l < m; ++l) G(l, j) = G(j, l);
    }
    return G;
}

SymmetricEigen jacobi_eigensolve(const Matrix& G0, bool want_vectors) {
    if (G0.rows != G0.cols) throw std::invalid_argument("dimension-error: jacobi needs square");
    const std::size_t n = G0.rows;
    Matrix G = G0;
    // Eigenvector accumulator, rows are eigenvectors (V^T of the usual V).
    Matrix Vt(want_vectors ? n : 0, n);
    for (std::size_t i = 0; i < Vt.rows; ++i) Vt(i, i) = 1.0;

    const double scale = frobenius(G);
    const double target = kOffDiagTarget * scale;
    if (scale == 0.0 || offdiag_frobenius(G) <= target) {
        // Already diagonal (or zero).
    } else {
        // Rotations with |a_pq| below `skip` are deferred; even if a whole
        // sweep is skipped the remaining off-diagonal mass is under target.
        const double skip = target / static_cast<double>(n);
        double* g = G.data.data();
        bool converged = false;
        for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
            for (std::size_t p = 0; p < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = g[p * n + q];
                    if (std::abs(apq) <= skip) continue;
                    const double app = g[p * n + p], aqq = g[q * n + q];
                    const double tau = (aqq - app) / (2.0 * apq);
                    const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;

                    // Upper-triangle-only update of G' = J^T G J.
                    g[p * n + p] = app - t * apq;
                    g[q * n + q] = aqq + t * apq;
                    g[p * n + q] = 0.0;
                    for (std::size_t j = 0; j < p; ++j) {
                        const double gjp = g[j * n + p], gjq = g[j * n + q];
                        g[j * n + p] = c * gjp - s * gjq;
                        g[j * n + q] = s * gjp + c * gjq;
                    }
                    for (std::size_t j = p + 1; j < q; ++j) {
                        const double gpj = g[p * n + j], gjq = g[j * n + q];
                        g[p * n + j] = c * gpj - s * gjq;
                        g[j * n + q] = s * gpj + c * gjq;
                    }
                    for (std::size_t j = q + 1; j < n; ++j) {
                        const double gpj = g[p * n + j], gqj = g[q * n + j];
                        g[p * n + j] = c * gpj - s * gqj;
                        g[q * n + j] = s * gpj + c * gqj;
                    }
                    if (want_vectors) {
                        double* vp = Vt.data.data() + p * n;
                        double* vq = Vt.data.data() + q * n;
                        for (std::size_t j = 0; j < n; ++j) {
                            const double up = vp[j], uq = vq[j];
                            vp[j] = c * up - s * uq;
                            vq[j] = s * up + c * uq;
                        }
                    }
                }
            }
            converged = offdiag_frobenius(G) <= target;
        }
        if (!converged) {
            throw std::runtime_error("eigensolver-nonconvergence: cyclic Jacobi "
                                     "did not reach the off-diagonal target");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return G(a, a) > G(b, b);
    });

    SymmetricEigen out;
    out.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = G(order[i], order[i]);
    if (want_vectors) {
        out.eigenvectors.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* src = Vt.data.data() + order[i] * n;
            out.eigenvectors[i].assign(src, src + n);
            fix_sign(out.eigenvectors[i]);
        }
    }
    return out;
}

double max_pair_residual(const Matrix& G, const SymmetricEigen& eig) {
    const std::size_t n = G.rows;
    const double gnorm = std::max(std::abs(eig.eigenvalues.front()),
                                  std::abs(eig.eigenvalues.back()));
    if (gnorm == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = eig.eigenvectors.at(i);
        double res2 = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double gv = 0.0;
            const double* row = G.data.data() + r * n;
            for (std::size_t c = 0; c < n; ++c) gv += row[c] * v[c];
            const double d = gv - eig.eigenvalues[i] * v[r];
            res2 += d * d;
        }
        worst = std::max(worst, std::sqrt(res2) / gnorm);
    }
    return worst;
}

SpectralSummary singular_values(const Matrix& A) {
    const std::size_t N = A.rows, m = A.cols;
    if (m < 1 || m > N) throw std::invalid_argument("dimension-error: need 1 <= m <= N");
    const Matrix G = gram(A);
    // The off-diagonal convergence target pins every eigenpair residual to
    // ||E||_F <= 1e-14 ||G||_F, far below the 1e-10 contract; the residual
    // is verified pair-by-pair in the test suite via max_pair_residual.
    const SymmetricEigen eig = jacobi_eigensolve(G, false);

    SpectralSummary s;
    s.singular_values.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        s.singular_values[i] = std::sqrt(std::max(0.0, eig.eigenvalues[i]));
    }
    s.s1 = s.singular_values.front();
    s.sm = s.singular_values.back();
    const double rootN = std::sqrt(static_cast<double>(N));
    s.scaled_s1 = s.s1 / rootN;
    s.scaled_sm = s.sm / rootN;
    return s;
}

double EsdCurve::operator()(double t) const {
    const auto it = std::upper_bound(jumps.begin(), jumps.end(), t);
    return static_cast<double>(it - jumps.begin()) / static_cast<double>(jumps.size());
}

EsdCurve esd(const Matrix& A) {
    const SpectralSummary s = singular_values(A);
    EsdCurve curve;
    curve.jumps.resize(s.singular_values.size());
    const double invN = 1.0 / static_cast<double>(A.rows);
    for (std::size_t i = 0; i < s.singular_values.size(); ++i) {
        const double sv = s.singular_values[i];
        curve.jumps[i] = sv * sv * invN;
    }
    std::sort(curve.jumps.begin(), curve.jumps.end());
    return curve;
}

double mp_cdf(double t, double z) {
    if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("bad-z: z must lie in (0,1)");
    const double sz = std::sqrt(z);
    const double r = (1.0 - sz) * (1.0 - sz);
    const double R = (1.0 + sz) * (1.0 + sz);
    if (t <= r) return 0.0;
    if (t >= R) return 1.0;
    // tau = r + (R-r) sin^2(theta) removes both endpoint square roots.
    const double width = R - r;
    const double theta_t = std::asin(std::sqrt((t - r) / width));
    auto integrand = [&](double theta) {
        const double s2 = std::sin(2.0 * theta);
        const double tau = r + width * std::sin(theta) * std::sin(theta);
        return width * width * s2 * s2 / (2.0 * tau);
    };
    const double val =
        integrate_adaptive(integrand, 0.0, theta_t, 1e-11) / (2.0 * std::numbers::pi * z);
    return std::clamp(val, 0.0, 1.0);
}

double ks_distance(const EsdCurve& curve, double z) {
    const auto& jumps = curve.jumps;
    const auto m = static_cast<double>(jumps.size());
    double d = 0.0;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const double t = jumps[i];
        const double fmp = mp_cdf(t, z);
        const double above =
            static_cast<double>(std::upper_bound(jumps.begin(), jumps.end(), t) - jumps.begin()) / m;
        const double below =
            static_cast<double>(std::lower_bound(jumps.begin(), jumps.end(), t) - jumps.begin()) / m;
        d = std::max({d, std::abs(above - fmp), std::abs(below - fmp)});
    }
    return d;
}

void export_esd_csv(const EsdCurve& curve, double z, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io-error: cannot open " + path);
    out << "lambda,F_emp,F_mp\n";
    for (double t : curve.jumps) {
        out << t << ',' << curve(t) << ',' << mp_cdf(t, z) << '\n';
    }
    if (!out) throw std::runtime_error("io-error: write failure on " + path);
}

namespace {

// sigma = ||P_I A v||, computed over the kept rows.
double apply_norm(const Matrix& A, const IndexSet* rows, std::span<const double> v) {
    double s = 0.0;
    auto add_row = [&](std::size_t i) {
        const double* row = A.data.data() + i * A.cols;
        double t = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) t += row[j] * v[j];
        s += t * t;
    };
    if (rows) {
        for (std::size_t i : *rows) add_row(i);
    } else {
        for (std::size_t i = 0; i < A.rows; ++i) add_row(i);
    }
    return std::sqrt(s);
}

// w = (P_I A)^T (P_I A) v in one pass over the kept rows.
void gram_apply(const Matrix& A, const IndexSet* rows, const std::vector<double>& v,
                std::vector<double>& w) {
    const std::size_t m = A.cols;
    std::fill(w.begin(), w.end(), 0.0);
    auto add_row = [&](std::size_t i) {
        const double* row = A.data.data() + i * m;
        double t = 0.0;
        for (std::size_t j = 0; j < m; ++j) t += row[j] * v[j];
        if (t == 0.0) return;
        for (std::size_t j = 0; j < m; ++j) w[j] += t * row[j];
    };
    if (rows) {
        for (std::size_t i : *rows) add_row(i);
    } else {
        for (std::size_t i = 0; i < A.rows; ++i) add_row(i);
    }
}

constexpr std::size_t kJacobiCutoff = 64;

} // namespace

TopSingularPair top_singular_pair(const Matrix& A, const IndexSet* rows,
                                  const std::vector<double>* warm_start,
                                  std::size_t max_matvecs) {
    const std::size_t m = A.cols;
    TopSingularPair out;
    if (m <= kJacobiCutoff) {
        const Matrix G = rows ? gram_rows(A, *rows) : gram(A);
        const SymmetricEigen eig = jacobi_eigensolve(G, true);
        out.v = eig.eigenvectors.front();
        out.sigma = apply_norm(A, rows, out.v);
        return out;
    }

    std::vector<double> v;
    if (warm_start && warm_start->size() == m) {
        v = *warm_start;
    } else {
        // Column-norm start: deterministic and well aligned with the top
        // direction for the matrices this laboratory produces.
        v.assign(m, 0.0);
        auto add_row = [&](std::size_t i) {
            const double* row = A.data.data() + i * m;
            for (std::size_t j = 0; j < m; ++j) v[j] += row[j] * row[j];
        };
        if (rows) {
            for (std::size_t i : *rows) add_row(i);
        } else {
            for (std::size_t i = 0; i < A.rows; ++i) add_row(i);
        }
        for (double& x : v) x = std::sqrt(x);
    }
    double nv = norm2(v);
    if (nv == 0.0) {
        v.assign(m, 0.0);
        v[0] = 1.0;
        nv = 1.0;
    }
    for (double& x : v) x /= nv;

    std::vector<double> w(m);
    double prev = -1.0;
    std::size_t plateau = 0;
    for (std::size_t it = 0; it < max_matvecs; ++it) {
        gram_apply(A, rows, v, w);
        double rayleigh = 0.0;
        for (std::size_t j = 0; j < m; ++j) rayleigh += v[j] * w[j];
        const double sigma = std::sqrt(std::max(0.0, rayleigh));
        const double nw = norm2(w);
        if (nw == 0.0) break; // v in the kernel; sigma = 0
        for (std::size_t j = 0; j < m; ++j) v[j] = w[j] / nw;
        if (prev >= 0.0 && std::abs(sigma - prev) <= 1e-13 * std::max(1.0, sigma)) {
            if (++plateau >= 2) break;
        } else {
            plateau = 0;
        }
        prev = sigma;
    }
    fix_sign(v);
    out.v = std::move(v);
    out.sigma = apply_norm(A, rows, out.v);
    return out;
}

TopSingularPair bottom_singular_pair(const Matrix& A, const IndexSet* rows) {
    const Matrix G = rows ? gram_rows(A, *rows) : gram(A);
    const SymmetricEigen eig = jacobi_eigensolve(G, true);
    TopSingularPair out;
    out.v = eig.eigenvectors.back();
    out.sigma = apply_norm(A, rows, out.v);
    return out;
}

} // namespace rmtlab
