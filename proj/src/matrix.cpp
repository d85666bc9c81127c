#include "rmtlab/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rmtlab/rng.hpp"

namespace rmtlab {

namespace {

constexpr char kMagic[8] = {'R', 'M', 'T', 'L', 'M', 'A', 'T', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "matrix container assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("matrix load: truncated stream");
    return v;
}

} // namespace

MatrixSample sample_matrix(const DistributionSpec& spec, std::size_t N,
                           std::size_t m, std::uint64_t seed) {
    if (m < 1 || m > N) {
        throw std::invalid_argument("dimension-error: need 1 <= m <= N");
    }
    MatrixSample s;
    s.spec = spec;
    s.seed = seed;
    s.matrix = Matrix(N, m);
    for (std::size_t i = 0; i < N * m; ++i) {
        s.matrix.data[i] = sample_one(spec, seed, i); // row-major fill
    }
    return s;
}

std::vector<double> matvec(const Matrix& A, std::span<const double> x) {
    if (x.size() != A.cols) throw std::invalid_argument("dimension-error: matvec");
    std::vector<double> y(A.rows, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* row = A.data.data() + i * A.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> matvec_transpose(const Matrix& A, std::span<const double> x) {
    if (x.size() != A.rows) throw std::invalid_argument("dimension-error: matvec_transpose");
    std::vector<double> y(A.cols, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* row = A.data.data() + i * A.cols;
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < A.cols; ++j) y[j] += xi * row[j];
    }
    return y;
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

std::size_t drop_count(double eps, std::size_t N) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("invalid-params: eps must lie in [0,1]");
    }
    const auto k = static_cast<std::size_t>(std::floor(eps * static_cast<double>(N)));
    return std::min(k, N);
}

double trimmed_norm_with_dropped(std::span<const double> x, std::size_t k,
                                 IndexSet& dropped) {
    const std::size_t n = x.size();
    if (k > n) throw std::invalid_argument("bad-k: drop count exceeds length");
    dropped.clear();
    if (k == 0) return norm2(x);

    // Order by (|x_i| desc, index asc); the first k are dropped.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         const double fa = std::abs(x[a]), fb = std::abs(x[b]);
                         if (fa != fb) return fa > fb;
                         return a < b;
                     });
    dropped.assign(order.begin(), order.begin() + k);
    std::sort(dropped.begin(), dropped.end());

    // Kept squares accumulate in ascending index order, the same order the
    // enumeration oracle uses, so the two routes agree bit-for-bit.
    double kept = 0.0;
    std::size_t d = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d < dropped.size() && dropped[d] == i) {
            ++d;
        } else {
            kept += x[i] * x[i];
        }
    }
    return std::sqrt(kept);
}

double trimmed_norm(std::span<const double> x, std::size_t k) {
    IndexSet dropped;
    return trimmed_norm_with_dropped(x, k, dropped);
}

double brute_force_trimmed_min(std::span<const double> x, double eps) {
    const std::size_t n = x.size();
    if (n > 20) throw std::invalid_argument("too-large: brute force limited to len <= 20");
    const std::size_t k = drop_count(eps, n);
    // Keep sets have size >= n - k; dropping fewer coordinates never helps,
    // but enumerate all admissible cardinalities anyway (oracle form).
    double best = norm2(x);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const auto kept = static_cast<std::size_t>(std::popcount(mask));
        if (kept + k < n) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) s += x[i] * x[i];
        }
        best = std::min(best, std::sqrt(s));
    }
    return best;
}

Matrix row_projection(const Matrix& A, const IndexSet& I) {
    Matrix out(A.rows, A.cols);
    for (std::size_t i : I) {
        if (i >= A.rows) throw std::out_of_range("index-out-of-range: row projection");
        std::copy_n(A.data.data() + i * A.cols, A.cols, out.data.data() + i * A.cols);
    }
    return out;
}

IndexSet compute_Iy(const Matrix& A, std::span<const double> y) {
    if (y.size() != A.cols) throw std::invalid_argument("dimension-error: compute_Iy");
    if (std::abs(norm2(y) - 1.0) > 1e-10) {
        throw std::invalid_argument("not-unit: compute_Iy requires a unit vector");
    }
    IndexSet I;
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* row = A.data.data() + i * A.cols;
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) s += row[j] * row[j] * y[j] * y[j];
        if (s <= 2.0) I.push_back(i);
    }
    return I;
}

SphereDecomposition sphere_decompose(std::span<const double> y) {
    const std::size_t N = y.size();
    if (N < 16) throw std::invalid_argument("invalid-params: sphere_decompose needs N >= 16");
    if (std::abs(norm2(y) - 1.0) > 1e-10) {
        throw std::invalid_argument("not-unit: sphere_decompose requires a unit vector");
    }
    const auto sqrtN = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(N))));
    const auto quartN = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(N), 0.25)));

    SphereDecomposition d;
    // J = floor(sqrt(N)) largest |y_j|, ties toward the lower index.
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + (sqrtN - 1), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         const double fa = std::abs(y[a]), fb = std::abs(y[b]);
                         if (fa != fb) return fa > fb;
                         return a < b;
                     });
    d.J.assign(order.begin(), order.begin() + sqrtN);
    std::sort(d.J.begin(), d.J.end());

    double on_mass = 0.0;
    for (std::size_t j : d.J) on_mass += y[j] * y[j];
    // r = sqrt(1 - |y - P_J y|^2) = |P_J y| for unit y.
    d.r = std::sqrt(std::max(0.0, 1.0 - std::max(0.0, 1.0 - on_mass)));

    d.y1.assign(N, 0.0);
    d.y2.assign(y.begin(), y.end());
    d.y3.assign(N, 0.0);
    const double flat = d.r / std::sqrt(static_cast<double>(sqrtN));
    for (std::size_t j : d.J) {
        d.y1[j] = y[j] - flat;
        d.y2[j] = flat;
    }

    // Certificates from the construction; failure is reported, not ignored.
    double n1 = 0.0, n2 = 0.0, inf2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        n1 += d.y1[i] * d.y1[i];
        n2 += d.y2[i] * d.y2[i];
        inf2 = std::max(inf2, std::abs(d.y2[i]));
    }
    const double flat_cap = 1.0 / static_cast<double>(quartN);
    if (!(std::sqrt(n1) <= 2.0 + 1e-10) || std::abs(std::sqrt(n2) - 1.0) > 1e-10 ||
        inf2 > flat_cap + 1e-12) {
        throw std::runtime_error("decomposition-failed: certificate violated");
    }
    return d;
}

double lemma_probe(LemmaProbeKind kind, const DistributionSpec& spec,
                   std::size_t N, std::size_t m, double eps,
                   std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("invalid-params: trials >= 1");
    const std::size_t k = drop_count(eps, N);
    switch (kind) {
    case LemmaProbeKind::TrimBound: {
        const double bound = std::sqrt(2.0 * std::numbers::e * static_cast<double>(N));
        std::size_t fails = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto x = sample_entries(spec, N, rng::derive(seed, t, 1));
            if (trimmed_norm(x, k) > bound) ++fails;
        }
        return static_cast<double>(fails) / static_cast<double>(trials);
    }
    case LemmaProbeKind::IyCardinality: {
        std::vector<double> flat(m, 1.0 / std::sqrt(static_cast<double>(m)));
        const double cap = static_cast<double>(N) - eps * static_cast<double>(N);
        std::size_t fails = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            const MatrixSample A = sample_matrix(spec, N, m, rng::derive(seed, t, 2));
            if (static_cast<double>(compute_Iy(A.matrix, flat).size()) <= cap) ++fails;
        }
        return static_cast<double>(fails) / static_cast<double>(trials);
    }
    case LemmaProbeKind::Vertex: {
        // One matrix, `trials` sampled sign vertices; the max over a sample
        // lower-bounds the max over all 2^m vertices.
        const MatrixSample A = sample_matrix(spec, N, m, rng::derive(seed, 0, 3));
        const double inv = 1.0 / std::sqrt(static_cast<double>(m));
        std::vector<double> v(m);
        double best = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const std::uint64_t s = rng::derive(seed, t, 4);
            for (std::size_t j = 0; j < m; ++j) {
                v[j] = (rng::bits(s, j) >> 63) ? inv : -inv;
            }
            best = std::max(best, trimmed_norm(matvec(A.matrix, v), k));
        }
        return best / std::sqrt(static_cast<double>(m) * static_cast<double>(N));
    }
    }
    throw std::invalid_argument("unknown-kind: lemma_probe");
}

void save_matrix(const MatrixSample& sample, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kFormatVersion);
    write_pod(out, static_cast<std::uint64_t>(sample.N()));
    write_pod(out, static_cast<std::uint64_t>(sample.m()));
    const std::string key = spec_key(sample.spec);
    write_pod(out, static_cast<std::uint32_t>(key.size()));
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    write_pod(out, sample.seed);
    out.write(reinterpret_cast<const char*>(sample.matrix.data.data()),
              static_cast<std::streamsize>(sample.matrix.data.size() * sizeof(double)));
    if (!out) throw std::runtime_error("matrix save: stream failure");
}

MatrixSample load_matrix(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("matrix load: bad magic");
    }
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kFormatVersion) {
        throw std::runtime_error("matrix load: unsupported version");
    }
    const auto N = read_pod<std::uint64_t>(in);
    const auto m = read_pod<std::uint64_t>(in);
    const auto keylen = read_pod<std::uint32_t>(in);
    std::string key(keylen, '\0');
    in.read(key.data(), keylen);
    if (!in) throw std::runtime_error("matrix load: truncated header");
    MatrixSample s;
    s.spec = parse_spec(key);
    s.seed = read_pod<std::uint64_t>(in);
    s.matrix = Matrix(N, m);
    in.read(reinterpret_cast<char*>(s.matrix.data.data()),
            static_cast<std::streamsize>(N * m * sizeof(double)));
    if (!in) throw std::runtime_error("matrix load: truncated payload");
    return s;
}

void save_matrix_file(const MatrixSample& sample, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("io-error: cannot open " + path);
    save_matrix(sample, out);
}

MatrixSample load_matrix_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("io-error: cannot open " + path);
    return load_matrix(in);
}

} // namespace rmtlab
