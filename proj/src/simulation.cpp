#include "bosample/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "bosample/csv.hpp"
#include "bosample/errors.hpp"
#include "bosample/estimators.hpp"
#include "bosample/rng.hpp"

namespace bosample {

const char* design_kind_name(DesignKind kind) {
    switch (kind) {
        case DesignKind::Srs: return "srs";
        case DesignKind::BoPu: return "bo-pu";
        case DesignKind::BoIlcb: return "bo-ilcb";
        case DesignKind::BoEi: return "bo-ei";
        case DesignKind::BoSei: return "bo-sei";
    }
    return "?";
}

DesignKind parse_design_kind(const std::string& name) {
    if (name == "srs") return DesignKind::Srs;
    if (name == "bo-pu") return DesignKind::BoPu;
    if (name == "bo-ilcb") return DesignKind::BoIlcb;
    if (name == "bo-ei") return DesignKind::BoEi;
    if (name == "bo-sei") return DesignKind::BoSei;
    throw ConfigError("unknown design: '" + name +
                      "' (expected srs, bo-pu, bo-ilcb, bo-ei or bo-sei)");
}

std::vector<DesignEntry> SimulationConfig::resolved_designs() const {
    std::vector<DesignEntry> out = designs;
    if (out.empty())
        out = {{DesignKind::Srs, ""},  {DesignKind::BoPu, ""}, {DesignKind::BoIlcb, ""},
               {DesignKind::BoEi, ""}, {DesignKind::BoSei, ""}};
    std::map<std::string, int> seen;
    for (DesignEntry& d : out) {
        if (d.name.empty()) d.name = design_kind_name(d.kind);
        const int count = ++seen[d.name];
        if (count > 1) d.name += "#" + std::to_string(count);
    }
    return out;
}

void SimulationConfig::validate(Eigen::Index population_size) const {
    if (prior_size < 10) throw ConfigError("prior_size must be >= 10");
    if (sample_size < 1) throw ConfigError("sample_size must be >= 1");
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    if (histogram_bins < 1) throw ConfigError("histogram_bins must be >= 1");
    if (objective_rounds < 1) throw ConfigError("objective_rounds must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 0.5)");
    if (!(ilcb_lambda >= 0.0)) throw ConfigError("ilcb_lambda must be >= 0");
    if (scheme == SamplingScheme::Srs)
        throw ConfigError("scheme applies to BO designs; use poisson or fixed-size-weighted");
    if (population_size > 0 &&
        static_cast<Eigen::Index>(prior_size) + sample_size >= population_size) {
        std::ostringstream msg;
        msg << "prior_size + sample_size must be < population size ("
            << prior_size << " + " << sample_size << " >= " << population_size << ")";
        throw ConfigError(msg.str());
    }
}

Dataset generate_synthetic_population(const SyntheticSpec& spec) {
    if (spec.population_size < 1) throw std::invalid_argument("synthetic: population_size must be >= 1");
    if (spec.feature_dim < 1) throw std::invalid_argument("synthetic: feature_dim must be >= 1");
    if (!(spec.length_scale > 0.0)) throw std::invalid_argument("synthetic: length_scale must be > 0");
    if (spec.signal_variance < 0.0 || spec.noise_variance < 0.0)
        throw std::invalid_argument("synthetic: variances must be >= 0");

    const int n = spec.population_size;
    const int chunk = spec.chunk_mode == SynthChunkMode::Dense ? n : 2000;
    if (spec.chunk_mode == SynthChunkMode::Dense && n > 10000)
        throw ConfigError("population too large for dense generation (N > 10000); use chunked mode");

    Dataset pop;
    pop.features.resize(n, spec.feature_dim);
    pop.responses.resize(n);
    pop.feature_names.reserve(static_cast<std::size_t>(spec.feature_dim));
    for (int j = 0; j < spec.feature_dim; ++j) pop.feature_names.push_back("f" + std::to_string(j));

    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(SeedPhase::Synthetic)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < spec.feature_dim; ++j) pop.features(i, j) = rng.uniform();

    const double noise_sd = std::sqrt(spec.noise_variance);
    KernelConfig kcfg;
    kcfg.length_scale = spec.length_scale;
    kcfg.noise_variance = 1.0; // unused by gram_matrix, must just validate

    // Independent GP draw per chunk; one exact joint draw when n <= chunk.
    for (int start = 0; start < n; start += chunk) {
        const int len = std::min(chunk, n - start);
        Eigen::VectorXd signal = Eigen::VectorXd::Zero(len);
        if (spec.signal_variance > 0.0 && len > 1) {
            Eigen::MatrixXd C =
                spec.signal_variance * gram_matrix(pop.features.middleRows(start, len), kcfg);
            Eigen::LLT<Eigen::MatrixXd> llt;
            double nugget = 1e-10 * spec.signal_variance;
            for (;;) {
                Eigen::MatrixXd A = C;
                A.diagonal().array() += nugget;
                llt.compute(A);
                if (llt.info() == Eigen::Success) break;
                nugget *= 10.0;
                if (nugget > 1e-2 * spec.signal_variance)
                    throw std::runtime_error("synthetic: covariance factorization failed");
            }
            Eigen::VectorXd z(len);
            for (int i = 0; i < len; ++i) z[i] = rng.normal();
            signal = Eigen::MatrixXd(llt.matrixL()) * z;
        } else if (spec.signal_variance > 0.0 && len == 1) {
            signal[0] = std::sqrt(spec.signal_variance) * rng.normal();
        }
        for (int i = 0; i < len; ++i) pop.responses[start + i] = signal[i] + noise_sd * rng.normal();
    }
    return pop;
}

namespace {

Dataset subset_rows(const Dataset& pop, const std::vector<int>& ids) {
    Dataset d;
    d.features.resize(static_cast<Eigen::Index>(ids.size()), pop.features.cols());
    d.responses.resize(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        d.features.row(static_cast<Eigen::Index>(i)) = pop.features.row(ids[i]);
        d.responses[static_cast<Eigen::Index>(i)] = pop.responses[ids[i]];
    }
    d.feature_names = pop.feature_names;
    return d;
}

int design_stream_id(DesignKind kind) {
    switch (kind) {
        case DesignKind::Srs: return 0;
        case DesignKind::BoPu: return 1;
        case DesignKind::BoIlcb: return 2;
        case DesignKind::BoEi: return 3;
        case DesignKind::BoSei: return 4;
    }
    return 0;
}

bool any_objective_design(const std::vector<DesignEntry>& designs) {
    return std::any_of(designs.begin(), designs.end(), [](const DesignEntry& d) {
        return d.kind == DesignKind::BoIlcb || d.kind == DesignKind::BoEi ||
               d.kind == DesignKind::BoSei;
    });
}

} // namespace

std::vector<MetricRecord> run_repeat(const Dataset& population, const SimulationConfig& config,
                                     int repeat_index) {
    const std::vector<DesignEntry> designs = config.resolved_designs();
    const Eigen::Index population_size = population.size();
    const int frame_size = static_cast<int>(population_size) - config.prior_size;

    // Shared prior draw: every design in this repeat starts from the same
    // prior set and sampling frame.
    const SamplingDesign prior_design = srs_design(static_cast<int>(population_size),
                                                   config.prior_size, PiConvention::Paper1OverN);
    const SampleDraw prior_draw =
        draw(prior_design, derive_seed(config.master_seed, static_cast<std::uint64_t>(repeat_index),
                                       0, static_cast<std::uint64_t>(SeedPhase::Prior)));
    const std::vector<int>& prior_ids = prior_draw.indices;
    std::vector<char> in_prior(static_cast<std::size_t>(population_size), 0);
    for (int id : prior_ids) in_prior[static_cast<std::size_t>(id)] = 1;
    std::vector<int> frame_ids;
    frame_ids.reserve(static_cast<std::size_t>(frame_size));
    for (int id = 0; id < static_cast<int>(population_size); ++id)
        if (!in_prior[static_cast<std::size_t>(id)]) frame_ids.push_back(id);

    const Dataset prior = subset_rows(population, prior_ids);
    const Dataset frame = subset_rows(population, frame_ids);
    const KernelConfig response_cfg = resolve_kernel_config(prior, config.kernel);

    // Shared surrogate work. PU scores come from the response surrogate on
    // the prior; ILCB/EI/SEI from the objective surrogate h.
    Eigen::VectorXd pu_means, pu_stds;
    const bool needs_pu = std::any_of(designs.begin(), designs.end(), [](const DesignEntry& d) {
        return d.kind == DesignKind::BoPu;
    });
    if (needs_pu) {
        const GpPosterior f_prior = GpPosterior::fit(prior, response_cfg);
        f_prior.predict_batch(frame.features, pu_means, pu_stds);
    }

    Eigen::VectorXd h_means, h_stds;
    double g_min = 0.0;
    if (any_objective_design(designs)) {
        const std::vector<ObjectiveRecord> records = estimate_objective_records(
            prior, response_cfg, config.objective_rounds,
            derive_seed(config.master_seed, static_cast<std::uint64_t>(repeat_index), 0,
                        static_cast<std::uint64_t>(SeedPhase::Objective)));
        // h resolves its own kernel defaults: delta-MAE lives on a far
        // smaller scale than the responses.
        const KernelConfig h_cfg = resolve_kernel_config(objective_dataset(records));
        const ObjectiveSurrogate h = fit_objective_surrogate(records, h_cfg);
        h.gp.predict_batch(frame.features, h_means, h_stds);
        g_min = h.g_min;
    }

    // True-population references for metrics (1)-(2).
    const double lo = population.responses.minCoeff();
    const double hi = population.responses.maxCoeff();
    const std::vector<double> edges = equal_width_edges(lo, hi, config.histogram_bins);
    const Histogram P = build_histogram(population.responses, edges, 0.0);
    const double t_frame = frame.responses.sum();

    std::vector<MetricRecord> out;
    out.reserve(designs.size());
    for (const DesignEntry& entry : designs) {
        SamplingDesign design;
        if (entry.kind == DesignKind::Srs) {
            design = srs_design(frame_size, config.sample_size, PiConvention::Paper1OverN);
        } else {
            AcquisitionSpec spec;
            spec.lambda = config.ilcb_lambda;
            Eigen::VectorXd scores;
            if (entry.kind == DesignKind::BoPu) {
                spec.kind = AcquisitionKind::PU;
                scores = scores_from_predictions(spec, pu_means, pu_stds, 0.0);
            } else {
                spec.kind = entry.kind == DesignKind::BoIlcb  ? AcquisitionKind::ILCB
                            : entry.kind == DesignKind::BoEi ? AcquisitionKind::EI
                                                             : AcquisitionKind::SEI;
                scores = scores_from_predictions(spec, h_means, h_stds, g_min);
            }
            design = minmax_design(scores, config.epsilon, config.scheme, config.sample_size);
        }

        const SampleDraw sample = draw(
            design, derive_seed(config.master_seed, static_cast<std::uint64_t>(repeat_index),
                                static_cast<std::uint64_t>(design_stream_id(entry.kind)),
                                static_cast<std::uint64_t>(SeedPhase::Draw)));

        // D_posterior = prior + sample; refit and predict the rest.
        std::vector<int> posterior_ids = prior_ids;
        for (int frame_local : sample.indices) posterior_ids.push_back(frame_ids[static_cast<std::size_t>(frame_local)]);
        std::sort(posterior_ids.begin(), posterior_ids.end());
        const Dataset posterior = subset_rows(population, posterior_ids);
        const GpPosterior f_post =
            GpPosterior::fit(posterior, resolve_kernel_config(posterior, config.kernel));
        const Eigen::VectorXd yhat_frame = f_post.predict_mean_batch(frame.features);

        PopulationFrame de_frame{frame.features, frame.responses, yhat_frame};

        // Estimated population vector: observed y on D_posterior, surrogate
        // mean elsewhere.
        Eigen::VectorXd est = population.responses;
        std::vector<char> sampled(static_cast<std::size_t>(frame_size), 0);
        for (int frame_local : sample.indices) sampled[static_cast<std::size_t>(frame_local)] = 1;
        for (int frame_local = 0; frame_local < frame_size; ++frame_local)
            if (!sampled[static_cast<std::size_t>(frame_local)])
                est[frame_ids[static_cast<std::size_t>(frame_local)]] = yhat_frame[frame_local];

        MetricRecord rec;
        rec.design_name = entry.name;
        rec.repeat_index = repeat_index;
        rec.mean_abs_diff = mean_abs_diff(population.responses, est);
        rec.kl_divergence = kl_divergence(P, build_histogram(est, edges, 0.5));
        rec.total_abs_diff = std::abs(t_frame - difference_total(sample, de_frame, false).value);
        rec.total_abs_diff_normalized_pi =
            std::abs(t_frame - difference_total(sample, de_frame, true).value);
        if (!std::isfinite(rec.mean_abs_diff) || !std::isfinite(rec.kl_divergence) ||
            !std::isfinite(rec.total_abs_diff) || !std::isfinite(rec.total_abs_diff_normalized_pi))
            throw std::runtime_error("run_repeat: non-finite metric value");
        out.push_back(std::move(rec));
    }
    return out;
}

SimulationReport run_simulation(const Dataset& population, const SimulationConfig& config) {
    validate_dataset(population);
    config.validate(population.size());
    const std::vector<DesignEntry> designs = config.resolved_designs();

    SimulationReport report;
    report.master_seed = config.master_seed;
    report.repeats_requested = config.repeats;
    for (const DesignEntry& d : designs) report.design_names.push_back(d.name);

    std::vector<std::vector<MetricRecord>> per_repeat(static_cast<std::size_t>(config.repeats));
    std::vector<char> failed(static_cast<std::size_t>(config.repeats), 0);

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < config.repeats; ++r) {
        try {
            per_repeat[static_cast<std::size_t>(r)] = run_repeat(population, config, r);
        } catch (const std::exception& e) {
            failed[static_cast<std::size_t>(r)] = 1;
#pragma omp critical
            std::fprintf(stderr, "repeat %d failed: %s\n", r, e.what());
        }
    }

    for (int r = 0; r < config.repeats; ++r) {
        if (failed[static_cast<std::size_t>(r)]) {
            ++report.repeats_failed;
            continue;
        }
        ++report.repeats_completed;
        for (MetricRecord& rec : per_repeat[static_cast<std::size_t>(r)])
            report.records.push_back(std::move(rec));
    }
    report.degraded =
        report.repeats_failed > 0 &&
        static_cast<double>(report.repeats_failed) > 0.01 * static_cast<double>(config.repeats);

    // Per-design metric columns in record order.
    std::map<std::string, std::array<std::vector<double>, 4>> columns;
    for (const MetricRecord& rec : report.records) {
        auto& cols = columns[rec.design_name];
        cols[0].push_back(rec.mean_abs_diff);
        cols[1].push_back(rec.kl_divergence);
        cols[2].push_back(rec.total_abs_diff);
        cols[3].push_back(rec.total_abs_diff_normalized_pi);
    }
    for (const auto& [name, cols] : columns) {
        DesignSummary s;
        for (int metric = 0; metric < 4; ++metric)
            s.metrics[static_cast<std::size_t>(metric)] =
                five_number_summary(cols[static_cast<std::size_t>(metric)]);
        report.summaries[name] = s;
    }

    for (const DesignEntry& d : designs)
        if (d.kind == DesignKind::Srs) {
            report.baseline_design = d.name;
            break;
        }
    if (!report.baseline_design.empty() && columns.count(report.baseline_design)) {
        const auto& base = columns[report.baseline_design];
        for (const DesignEntry& d : designs) {
            if (d.name == report.baseline_design) continue;
            if (!columns.count(d.name)) continue;
            std::array<MwuCell, 4> cells;
            for (int metric = 0; metric < 4; ++metric) {
                const MwuResult r = mann_whitney_u(columns[d.name][static_cast<std::size_t>(metric)],
                                                   base[static_cast<std::size_t>(metric)]);
                cells[static_cast<std::size_t>(metric)] = {r.u_statistic, r.p_value};
            }
            report.mwu_vs_baseline[d.name] = cells;
        }
    }
    return report;
}

SimulationReport run_simulation(const SimulationConfig& config) {
    if (config.csv_path.has_value() == config.synthetic.has_value())
        throw ConfigError("exactly one population source (csv_path or synthetic) must be set");
    Dataset population;
    if (config.csv_path) {
        population = load_population_csv(*config.csv_path, config.response_column);
    } else {
        population = generate_synthetic_population(*config.synthetic);
    }
    return run_simulation(population, config);
}

std::string records_csv(const SimulationReport& report) {
    std::string out = "design,repeat,mean_abs_diff,kl_divergence,total_abs_diff,total_abs_diff_normalized_pi\n";
    for (const MetricRecord& rec : report.records) {
        out += rec.design_name;
        out += ',';
        out += std::to_string(rec.repeat_index);
        out += ',';
        out += format_double(rec.mean_abs_diff);
        out += ',';
        out += format_double(rec.kl_divergence);
        out += ',';
        out += format_double(rec.total_abs_diff);
        out += ',';
        out += format_double(rec.total_abs_diff_normalized_pi);
        out += '\n';
    }
    return out;
}

} // namespace bosample
