#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bosample/acquisition.hpp"
#include "bosample/dataset.hpp"
#include "bosample/design.hpp"
#include "bosample/gp.hpp"
#include "bosample/metrics.hpp"

namespace bosample {

enum class DesignKind { Srs, BoPu, BoIlcb, BoEi, BoSei };

const char* design_kind_name(DesignKind kind);
DesignKind parse_design_kind(const std::string& name);

struct DesignEntry {
    DesignKind kind = DesignKind::Srs;
    std::string name; // unique label in the report, defaults to the kind name
};

enum class SynthChunkMode { Auto, Dense };

// Synthetic stand-in population: uniform features on [0,1]^m, responses a
// squared-exponential GP draw plus Gaussian noise.
struct SyntheticSpec {
    int population_size = 1920;
    int feature_dim = 16;
    double length_scale = 1.5;
    double signal_variance = 1.0;
    double noise_variance = 0.25;
    std::uint64_t seed = 4242;
    SynthChunkMode chunk_mode = SynthChunkMode::Auto;
};

Dataset generate_synthetic_population(const SyntheticSpec& spec);

struct SimulationConfig {
    // exactly one population source
    std::optional<std::string> csv_path;
    std::string response_column = "response";
    std::optional<SyntheticSpec> synthetic;

    int prior_size = 100;
    int sample_size = 50;
    int repeats = 200;
    std::vector<DesignEntry> designs; // empty = srs + all four BO designs
    KernelOverrides kernel;           // response surrogate overrides
    double epsilon = 1e-3;
    SamplingScheme scheme = SamplingScheme::FixedSizeWeighted;
    std::uint64_t master_seed = 1;
    int histogram_bins = 20;
    int objective_rounds = 10;
    double ilcb_lambda = 0.2;

    std::vector<DesignEntry> resolved_designs() const;
    void validate(Eigen::Index population_size) const;
};

inline constexpr std::array<const char*, 4> kMetricNames = {
    "mean_abs_diff", "kl_divergence", "total_abs_diff", "total_abs_diff_normalized_pi"};

struct DesignSummary {
    std::array<FiveNumber, 4> metrics;
};

struct MwuCell {
    double u = 0.0;
    double p = 1.0;
};

struct SimulationReport {
    std::vector<MetricRecord> records; // ordered by (repeat, design list position)
    std::vector<std::string> design_names;
    int repeats_requested = 0;
    int repeats_completed = 0;
    int repeats_failed = 0;
    bool degraded = false;
    std::map<std::string, DesignSummary> summaries;
    // per non-baseline design: p-values of H1 "design metric < baseline" per metric
    std::string baseline_design; // empty when no srs design present
    std::map<std::string, std::array<MwuCell, 4>> mwu_vs_baseline;
    std::uint64_t master_seed = 0;
};

// One Monte Carlo repeat: shared prior + frame, then per design score,
// build design, draw, refit, and evaluate the four metrics.
std::vector<MetricRecord> run_repeat(const Dataset& population, const SimulationConfig& config,
                                     int repeat_index);

SimulationReport run_simulation(const Dataset& population, const SimulationConfig& config);
SimulationReport run_simulation(const SimulationConfig& config);

// records file body (CSV, 17-significant-digit values); byte-stable across
// thread counts.
std::string records_csv(const SimulationReport& report);

} // namespace bosample
