#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rmtlab {

enum class DistKind {
    Gaussian,
    Rademacher,
    Uniform,
    SymmetricPareto,
    StudentT,
    TwoPoint,
};

// A standardized (zero mean, unit variance) entry law. `shift`/`scale`
// record the affine map applied to the raw law: emitted = (raw - shift)/scale.
struct DistributionSpec {
    DistKind kind = DistKind::Gaussian;
    std::vector<double> params; // pareto: {alpha}; student-t: {nu}; two-point: {p}
    double shift = 0.0;
    double scale = 1.0;

    // True when the analytic fourth moment of the standardized law is finite
    // (pareto needs alpha > 4, student-t nu > 4, the rest always).
    bool fourth_moment_finite() const;
    // True when |emitted| is bounded almost surely.
    bool bounded_support() const;
    // True when the emitted law is symmetric about zero.
    bool symmetric() const;
};

enum class MomentMethod { ClosedForm, Quadrature };

struct MomentReport {
    double mean = 0.0;
    double variance = 1.0;
    double fourth_moment = 0.0; // +inf when divergent
    MomentMethod method = MomentMethod::ClosedForm;
};

enum class TruncMethod { ClosedForm, Quadrature, MonteCarlo };

// Moment quantities of the centered M-truncation and its tail part.
// With chi = indicator of {|xi| <= M}:
//   mu_trunc           = E(xi chi)
//   var_trunc          = E(xi chi - mu_trunc)^2
//   tail_second_moment = E(xi - (xi chi - mu_trunc))^2
//                      = 1 - 2 E(xi^2 chi) + var_trunc
struct TruncationReport {
    double M = 0.0;
    double mu_trunc = 0.0;
    double var_trunc = 0.0;
    double tail_second_moment = 0.0;
    double second_moment_below = 0.0; // E(xi^2 chi), kept for the tail identity
    TruncMethod method = TruncMethod::ClosedForm;
    double abs_error_bound = 0.0; // quadrature error budget per integral
};

// --- registry ---------------------------------------------------------------

DistributionSpec make_spec(DistKind kind, const std::vector<double>& params = {});

// Text keys: "gaussian", "rademacher", "uniform", "symmetric-pareto:alpha=2.5",
// "student-t:nu=3", "two-point:p=0.3". Parse/format round-trip losslessly.
DistributionSpec parse_spec(const std::string& key);
std::string spec_key(const DistributionSpec& spec);

MomentReport analytic_moments(const DistributionSpec& spec);

// Deterministic i.i.d. sampling: value i is a pure function of (spec, seed, i).
std::vector<double> sample_entries(const DistributionSpec& spec,
                                   std::size_t count, std::uint64_t seed);
double sample_one(const DistributionSpec& spec, std::uint64_t seed,
                  std::uint64_t index);

TruncationReport truncation_report(const DistributionSpec& spec, double M);

// Entrywise map v -> (v if |v| <= M else 0) - mu_trunc; outputs lie in
// [-2M, 2M].
std::vector<double> apply_centered_truncation(const std::vector<double>& values,
                                              const TruncationReport& report);
double apply_centered_truncation_one(double value, const TruncationReport& report);

// Smallest M (bisection, relative tolerance 1e-6) with
// var_trunc >= (1-eta)^2 and tail_second_moment <= eta^2; throws
// std::runtime_error("not-found...") if no M up to 1e9 qualifies.
double choose_truncation_level(const DistributionSpec& spec, double eta);

// Monte Carlo estimate of P{ |sum_j weights_j xi_j| > eps }.
double weighted_sum_tail_probe(const DistributionSpec& spec,
                               const std::vector<double>& weights, double eps,
                               std::size_t trials, std::uint64_t seed);

} // namespace rmtlab
