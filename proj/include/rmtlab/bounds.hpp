#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rmtlab {

// The universal constants the statements leave unspecified. Defaults of 1.0
// are illustrative placeholders, not derived values.
struct BoundConstants {
    double c_bernstein = 1.0; // sub-Gaussian tail exponent constant
    double C_cubicnet = 1.0;  // infinity-norm net cardinality exponent
    double c_31 = 1.0;        // single-vector estimate tail exponent
    double C_31 = 1.0;        // single-vector norm bound factor
    std::map<std::string, double> extra; // e.g. "delta_34", "n_35"

    void validate() const; // throws unless every constant is > 0
};

// 2 exp(-c tau^2 / M^2); a bound, not a probability, so it may exceed 1.
double bernstein_tail(double tau, double M, double c);

enum class NetKind { Ball, CubeNet, Sparse };

// Natural log of the stated net cardinality bound:
//   Ball(n, eps)  -> n ln(3/eps)
//   CubeNet(n, C) -> C n
//   Sparse(N)     -> sqrt(N) ln(12 e N)
double log_net_cardinality(NetKind kind, double n, double param);

// Largest eps in (0,1] with (c/(2 M^2)) eta^2 >= eps (1 + ln(6e/eps));
// bisection to relative tolerance 1e-12, capped at 1.
double epsilon_for_eta(double eta, double M, double c);
// Signed slack LHS - RHS of that inequality at a given eps.
double epsilon_for_eta_residual(double eps, double eta, double M, double c);

using Threshold = std::optional<std::uint64_t>; // nullopt = overflow

// Single-point conditions behind each threshold, exposed so certificates can
// be re-verified independently of the search:
bool lemma31_condition(std::uint64_t N, double eps);
bool lemma36_condition3(std::uint64_t N, double eps, const BoundConstants& c);
bool prop41_condition(std::uint64_t N, double eps);           // floor(eps N) >= eps N / 2
bool prop38_condition(std::uint64_t N, double w36);           // exp(w36 N / 2) >= 4/3
bool theorem42_condition(std::uint64_t N, double eps, double w38);

// Block form: the condition holds at N and at 32 geometric points in [N, 4N].
bool holds_with_tail(const std::function<bool(std::uint64_t)>& cond, std::uint64_t N);

// Smallest N <= 2^62 whose tail-checked block satisfies `cond`; doubling scan
// plus bisection on the first satisfying block, then a walk-down so the block
// fails at N-1. nullopt when no N qualifies.
Threshold smallest_threshold(const std::function<bool(std::uint64_t)>& cond);

Threshold lemma31_threshold(double eps);

struct Lemma36Thresholds {
    Threshold condition3;                // universal given the constants
    Threshold condition1;                // needs delta_34 (distribution-dependent)
    Threshold condition2;                // needs n_35 (distribution-dependent)
    double w36 = 0.0;                    // min(c31 eps/6, C_cubicnet/2, 1/2)
    std::vector<std::string> distribution_dependent; // slots left open
};

// eps in (0,1]. delta_34/n_35 come from consts.extra when present.
Lemma36Thresholds lemma36_thresholds(double eps, const BoundConstants& consts);
// Convenience: condition-3 threshold only.
Threshold lemma36_threshold(double eps, const BoundConstants& consts);

struct Certificate {
    double eta = 0.0;
    double M = 0.0;
    BoundConstants constants;
    double epsilon_41 = 0.0; // from epsilon_for_eta(eta, 2M, c_bernstein)
    double epsilon_41_residual = 0.0;
    double w36 = 0.0;
    double w38 = 0.0;
    double w_final = 0.0; // min(epsilon_41/2, w38/2)
    std::vector<std::pair<std::string, double>> log_cardinalities;
    std::vector<std::pair<std::string, Threshold>> thresholds;
    std::vector<std::string> distribution_dependent;

    std::string to_json() const;
    std::string to_text() const; // aligned human-readable table
};

// Composes the submatrix-ssv root condition (with truncation bound 2M), the
// net cardinalities and every computable N-threshold of the coupled
// truncation estimate.
Certificate theorem42_certificate(double eta, double M, const BoundConstants& consts);

} // namespace rmtlab
