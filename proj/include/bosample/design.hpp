#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace bosample {

enum class SamplingScheme { Poisson, FixedSizeWeighted, Srs };

enum class PiConvention { Paper1OverN, ClassicalNOverN };

const char* scheme_name(SamplingScheme s);

// First-order inclusion probabilities over a frame plus the scheme that
// realizes them. All pi lie strictly inside (0, 1).
struct SamplingDesign {
    std::vector<double> pi;
    SamplingScheme scheme = SamplingScheme::FixedSizeWeighted;
    std::optional<int> nominal_sample_size;
    double epsilon = 1e-3;

    int size() const { return static_cast<int>(pi.size()); }
};

struct SampleDraw {
    std::vector<int> indices;    // selected units, ascending
    std::vector<double> pi_used; // the full pi vector of the generating design
    int realized_size = 0;
};

// Min-max normalization of acquisition scores into inclusion probabilities:
// pi = (score - min) / (max - min), extremes pinned to eps and 1 - eps, and
// every value clamped into [eps, 1 - eps] so Horvitz-Thompson weights stay
// bounded. Equal scores degenerate to pi = 0.5 everywhere.
SamplingDesign minmax_design(const Eigen::Ref<const Eigen::VectorXd>& scores, double epsilon,
                             SamplingScheme scheme, std::optional<int> nominal_sample_size);

// Constant-pi SRS design; the paper convention stores 1/N, the classical
// convention n/N (which matches the realized inclusion probability).
SamplingDesign srs_design(int population_size, int sample_size, PiConvention convention);

SampleDraw draw(const SamplingDesign& design, std::uint64_t rng_seed);

struct JointInclusionBudget {
    int draws = 10000;
    std::uint64_t seed = 0;
};

// pi_kj = E[I_k I_j]. Analytic for Poisson (independence) and SRS; for the
// weighted fixed-size scheme only a Monte Carlo estimate is available and a
// budget must be supplied explicitly.
double joint_inclusion(const SamplingDesign& design, int k, int j,
                       std::optional<JointInclusionBudget> mc = std::nullopt);

// Realized per-unit inclusion probability of the scheme (may differ from the
// stored pi: SRS paper convention stores 1/N but draws n/N).
double realized_inclusion(const SamplingDesign& design, int k);

} // namespace bosample
