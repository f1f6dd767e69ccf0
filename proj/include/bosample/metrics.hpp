#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bosample {

// One simulation repeat's evaluation of one design. All four values are
// non-negative with optimum at 0, in response units.
struct MetricRecord {
    std::string design_name;
    int repeat_index = 0;
    double mean_abs_diff = 0.0;
    double kl_divergence = 0.0;
    double total_abs_diff = 0.0;
    double total_abs_diff_normalized_pi = 0.0;
};

struct Histogram {
    std::vector<double> bin_edges;     // B + 1 ascending
    std::vector<double> probabilities; // length B, sums to 1
};

// |mean(true) - mean(est)|.
double mean_abs_diff(const Eigen::Ref<const Eigen::VectorXd>& true_y,
                     const Eigen::Ref<const Eigen::VectorXd>& est_y);

std::vector<double> equal_width_edges(double lo, double hi, int bins);

// Bin counts (out-of-range values clipped into the end bins) plus `smoothing`
// pseudo-counts per bin, normalized to probabilities.
Histogram build_histogram(const Eigen::Ref<const Eigen::VectorXd>& values,
                          const std::vector<double>& edges, double smoothing);

// sum over bins with P > 0 of P ln(P/Q). Requires identical edges; throws if
// Q has an empty bin where P has mass (pipelines avoid it by smoothing Q).
double kl_divergence(const Histogram& P, const Histogram& Q);

enum class MwuAlternative { AStochasticallySmaller };

struct MwuResult {
    double u_statistic = 0.0; // pairs with a > b, ties counted 1/2
    double p_value = 1.0;
    bool exact = false;
};

// One-sided Mann-Whitney U test of H1 "a is stochastically smaller than b".
// Exact enumeration when |a| + |b| <= 12, otherwise the tie- and
// continuity-corrected normal approximation. p is floored at 1e-300.
MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                         MwuAlternative alternative = MwuAlternative::AStochasticallySmaller);

// The two branches individually, for cross-checking them against each other.
double mwu_exact_p(const std::vector<double>& a, const std::vector<double>& b, double u_obs);
double mwu_normal_p(const std::vector<double>& a, const std::vector<double>& b, double u_obs);

// Five-number summary with linearly interpolated quartiles.
struct FiveNumber {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};
FiveNumber five_number_summary(std::vector<double> values);

} // namespace bosample
