// Command-line front end: run sampling simulations, export designs, fit the
// surrogate, compute estimators, and run the rank test on user data.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bosample/acquisition.hpp"
#include "bosample/config.hpp"
#include "bosample/csv.hpp"
#include "bosample/design.hpp"
#include "bosample/errors.hpp"
#include "bosample/estimators.hpp"
#include "bosample/gp.hpp"
#include "bosample/metrics.hpp"
#include "bosample/rng.hpp"
#include "bosample/simulation.hpp"
#include "bosample/version.hpp"

namespace {

using namespace bosample;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDegraded = 3;
constexpr int kExitIo = 4;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    std::map<std::string, std::string> overrides;
};

int cmd_simulate(const SimulateArgs& args) {
    if (args.threads > 0) omp_set_num_threads(args.threads);

    SimulationConfig cfg;
    if (!args.config_path.empty()) {
        cfg = parse_simulation_config(args.config_path, args.overrides);
    } else {
        cfg = config_from_pairs(args.overrides);
    }

    const SimulationReport report = run_simulation(cfg);

    std::filesystem::create_directories(args.out_dir);
    const std::string records_path = (std::filesystem::path(args.out_dir) / "records.csv").string();
    const std::string summary_path = (std::filesystem::path(args.out_dir) / "summary.json").string();
    write_text_file(records_path, records_csv(report));
    write_text_file(summary_path, summary_json(report, cfg, iso_timestamp()));

    std::cout << "records: " << records_path << "\n";
    std::cout << "summary: " << summary_path << "\n";
    std::cout << "repeats completed: " << report.repeats_completed << "/"
              << report.repeats_requested << "\n";
    if (report.degraded) {
        std::cerr << "warning: degraded run (" << report.repeats_failed << " failed repeats)\n";
        return kExitDegraded;
    }
    return kExitOk;
}

// ---- design ------------------------------------------------------------

struct DesignArgs {
    std::string population_path;
    std::string prior_path;
    std::string response_column = "response";
    std::string acquisition = "pu";
    std::string out_path;
    double epsilon = 1e-3;
    double ilcb_lambda = 0.2;
    int objective_rounds = 10;
    std::uint64_t seed = 1;
    std::optional<double> length_scale;
    std::optional<double> noise_variance;
};

Eigen::MatrixXd population_features_matching(const CsvTable& pop, const Dataset& prior,
                                             const std::string& response_column) {
    std::vector<std::string> pop_features = pop.columns;
    std::vector<Eigen::Index> keep;
    for (std::size_t c = 0; c < pop.columns.size(); ++c)
        if (pop.columns[c] != response_column) keep.push_back(static_cast<Eigen::Index>(c));
    std::vector<std::string> names;
    for (Eigen::Index c : keep) names.push_back(pop.columns[static_cast<std::size_t>(c)]);
    if (names != prior.feature_names)
        throw ConfigError("population and prior feature columns disagree");
    Eigen::MatrixXd X(pop.values.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) X.col(static_cast<Eigen::Index>(i)) = pop.values.col(keep[i]);
    return X;
}

int cmd_design(const DesignArgs& args) {
    const CsvTable pop = read_numeric_csv(args.population_path);
    const Dataset prior = load_population_csv(args.prior_path, args.response_column);
    const Eigen::MatrixXd X = population_features_matching(pop, prior, args.response_column);

    KernelOverrides overrides;
    overrides.length_scale = args.length_scale;
    overrides.noise_variance = args.noise_variance;
    const KernelConfig cfg = resolve_kernel_config(prior, overrides);

    AcquisitionSpec spec;
    spec.lambda = args.ilcb_lambda;
    Eigen::VectorXd scores;
    const GpPosterior f = GpPosterior::fit(prior, cfg);
    if (args.acquisition == "pu") {
        spec.kind = AcquisitionKind::PU;
        scores = score_population(spec, X, f, nullptr);
    } else {
        if (args.acquisition == "ilcb")
            spec.kind = AcquisitionKind::ILCB;
        else if (args.acquisition == "ei")
            spec.kind = AcquisitionKind::EI;
        else if (args.acquisition == "sei")
            spec.kind = AcquisitionKind::SEI;
        else
            throw ConfigError("acquisition must be pu, ilcb, ei or sei");
        const auto records =
            estimate_objective_records(prior, cfg, args.objective_rounds, args.seed);
        const ObjectiveSurrogate h =
            fit_objective_surrogate(records, resolve_kernel_config(objective_dataset(records)));
        scores = score_population(spec, X, f, &h);
    }

    const SamplingDesign design =
        minmax_design(scores, args.epsilon, SamplingScheme::FixedSizeWeighted, std::nullopt);

    std::string out = "unit_id,score,pi\n";
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(scores[i]);
        out += ',';
        out += format_double(design.pi[static_cast<std::size_t>(i)]);
        out += '\n';
    }
    write_text_file(args.out_path, out);
    std::cout << "design: " << args.out_path << " (" << scores.size() << " units)\n";
    return kExitOk;
}

// ---- fit ---------------------------------------------------------------

struct FitArgs {
    std::string train_path;
    std::string query_path;
    std::string response_column = "response";
    std::string out_path;
    std::optional<double> length_scale;
    std::optional<double> noise_variance;
};

int cmd_fit(const FitArgs& args) {
    const Dataset train = load_population_csv(args.train_path, args.response_column);
    const CsvTable query = read_numeric_csv(args.query_path);
    const Eigen::MatrixXd X = population_features_matching(query, train, args.response_column);

    KernelOverrides overrides;
    overrides.length_scale = args.length_scale;
    overrides.noise_variance = args.noise_variance;
    const KernelConfig cfg = resolve_kernel_config(train, overrides);
    const GpPosterior post = GpPosterior::fit(train, cfg);

    Eigen::VectorXd means, stds;
    post.predict_batch(X, means, stds);
    std::string out = "mean,std_dev\n";
    for (Eigen::Index i = 0; i < means.size(); ++i)
        out += format_double(means[i]) + "," + format_double(stds[i]) + "\n";
    write_text_file(args.out_path, out);
    std::cerr << "fitted n=" << train.size() << " length_scale=" << cfg.length_scale
              << " noise_variance=" << cfg.noise_variance << "\n";
    std::cout << "predictions: " << args.out_path << "\n";
    return kExitOk;
}

// ---- estimate ----------------------------------------------------------

struct EstimateArgs {
    std::string population_path;
    std::string prior_path;
    std::string design_path;
    std::string response_column = "response";
    std::string scheme = "fixed-size-weighted";
    int sample_size = 0;
    std::uint64_t seed = 1;
    std::optional<double> length_scale;
    std::optional<double> noise_variance;
};

int cmd_estimate(const EstimateArgs& args) {
    const Dataset population = load_population_csv(args.population_path, args.response_column);
    const Dataset prior = load_population_csv(args.prior_path, args.response_column);
    const CsvTable design_table = read_numeric_csv(args.design_path);

    const auto pi_it = std::find(design_table.columns.begin(), design_table.columns.end(), "pi");
    if (pi_it == design_table.columns.end())
        throw ConfigError("design table needs a 'pi' column");
    const Eigen::Index pi_col = pi_it - design_table.columns.begin();
    if (design_table.values.rows() != population.size())
        throw ConfigError("design table and population row counts disagree");

    SamplingDesign design;
    design.pi.resize(static_cast<std::size_t>(population.size()));
    for (Eigen::Index i = 0; i < population.size(); ++i)
        design.pi[static_cast<std::size_t>(i)] = design_table.values(i, pi_col);
    if (args.scheme == "poisson")
        design.scheme = SamplingScheme::Poisson;
    else if (args.scheme == "fixed-size-weighted")
        design.scheme = SamplingScheme::FixedSizeWeighted;
    else
        throw ConfigError("scheme must be poisson or fixed-size-weighted");
    if (design.scheme == SamplingScheme::FixedSizeWeighted) {
        if (args.sample_size < 1) throw ConfigError("fixed-size-weighted needs --sample-size");
        design.nominal_sample_size = args.sample_size;
    }

    const SampleDraw sample = draw(design, args.seed);

    // Surrogate on prior + sampled units, predictions over the whole frame.
    Dataset posterior = prior;
    const Eigen::Index extra = static_cast<Eigen::Index>(sample.indices.size());
    posterior.features.conservativeResize(prior.size() + extra, Eigen::NoChange);
    posterior.responses.conservativeResize(prior.size() + extra);
    for (Eigen::Index i = 0; i < extra; ++i) {
        posterior.features.row(prior.size() + i) = population.features.row(sample.indices[static_cast<std::size_t>(i)]);
        posterior.responses[prior.size() + i] = population.responses[sample.indices[static_cast<std::size_t>(i)]];
    }
    KernelOverrides overrides;
    overrides.length_scale = args.length_scale;
    overrides.noise_variance = args.noise_variance;
    const GpPosterior post = GpPosterior::fit(posterior, resolve_kernel_config(posterior, overrides));

    PopulationFrame frame{population.features, population.responses,
                          post.predict_mean_batch(population.features)};

    Eigen::VectorXd y_sample(extra);
    for (Eigen::Index i = 0; i < extra; ++i)
        y_sample[i] = population.responses[sample.indices[static_cast<std::size_t>(i)]];

    const TotalEstimate ht = ht_total(sample, y_sample);
    const TotalEstimate de = difference_total(sample, frame, false);
    const TotalEstimate de_norm = difference_total(sample, frame, true);
    const DesignVariance vde = de_variance(frame, design);
    const DesignVariance vht = ht_variance(frame, design);
    const DesignVariance vde_hat = de_variance_estimate(sample, frame, design);

    nlohmann::ordered_json j;
    j["sample_size"] = sample.realized_size;
    j["ht_total"] = ht.value;
    j["ht_variance"] = vht.value;
    j["de_total"] = de.value;
    j["de_total_normalized_pi"] = de_norm.value;
    j["de_variance"] = vde.value;
    j["de_variance_estimate"] = vde_hat.value;
    j["variance_approximate"] = vde.approximate;
    j["variance_estimate_negative"] = vde_hat.value < 0.0;
    std::cout << j.dump(2) << "\n";
    if (vde_hat.value < 0.0)
        std::cerr << "warning: variance estimate is negative for this design/sample\n";
    return kExitOk;
}

// ---- mwu ---------------------------------------------------------------

struct MwuArgs {
    std::string file_a;
    std::string file_b;
    std::string alternative = "a-smaller";
};

int cmd_mwu(const MwuArgs& args) {
    std::vector<double> a = read_numeric_column(args.file_a);
    std::vector<double> b = read_numeric_column(args.file_b);
    if (a.empty() || b.empty()) throw ConfigError("mwu: input file has no numeric values");
    if (args.alternative == "b-smaller") {
        std::swap(a, b);
    } else if (args.alternative != "a-smaller") {
        throw ConfigError("alternative must be a-smaller or b-smaller");
    }
    const MwuResult r = mann_whitney_u(a, b);
    std::printf("U = %.15g\np = %.15g\n", r.u_statistic, r.p_value);
    return kExitOk;
}

// ---- synth -------------------------------------------------------------

struct SynthArgs {
    SyntheticSpec spec;
    std::string chunk_mode = "auto";
    std::string out_path;
    std::string response_name = "response";
};

int cmd_synth(const SynthArgs& args) {
    SyntheticSpec spec = args.spec;
    if (args.chunk_mode == "dense")
        spec.chunk_mode = SynthChunkMode::Dense;
    else if (args.chunk_mode != "auto")
        throw ConfigError("chunk mode must be auto or dense");

    const Dataset pop = generate_synthetic_population(spec);
    std::string out;
    for (const std::string& name : pop.feature_names) out += name + ",";
    out += args.response_name + "\n";
    for (Eigen::Index i = 0; i < pop.size(); ++i) {
        for (Eigen::Index j = 0; j < pop.dim(); ++j) out += format_double(pop.features(i, j)) + ",";
        out += format_double(pop.responses[i]) + "\n";
    }
    write_text_file(args.out_path, out);
    std::cout << "population: " << args.out_path << " (" << pop.size() << " x " << pop.dim()
              << " + response)\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model-assisted probability sampling designs driven by Bayesian optimization"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    SimulateArgs sim;
    std::vector<std::pair<std::string, std::string>> flag_keys; // flag value -> config key
    auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo design comparison");
    simulate->add_option("--config", sim.config_path, "Flat key = value config file");
    simulate->add_option("--out-dir", sim.out_dir, "Output directory (records.csv, summary.json)");
    simulate->add_option("--threads", sim.threads, "Worker threads (default: all cores)");
    // Direct overrides of config keys.
    std::map<std::string, std::string> ov;
    simulate->add_option_function<std::string>(
        "--repeats", [&ov](const std::string& v) { ov["repeats"] = v; }, "Monte Carlo repeats");
    simulate->add_option_function<std::string>(
        "--designs", [&ov](const std::string& v) { ov["designs"] = v; },
        "Comma list: srs,bo-pu,bo-ilcb,bo-ei,bo-sei");
    simulate->add_option_function<std::string>(
        "--seed", [&ov](const std::string& v) { ov["master_seed"] = v; }, "Master seed");
    simulate->add_option_function<std::string>(
        "--prior-size", [&ov](const std::string& v) { ov["prior_size"] = v; }, "Prior sample size");
    simulate->add_option_function<std::string>(
        "--sample-size", [&ov](const std::string& v) { ov["sample_size"] = v; }, "Design sample size");
    simulate->add_option_function<std::string>(
        "--epsilon", [&ov](const std::string& v) { ov["epsilon"] = v; }, "Min-max clamp epsilon");
    simulate->add_option_function<std::string>(
        "--scheme", [&ov](const std::string& v) { ov["scheme"] = v; },
        "poisson or fixed-size-weighted");
    simulate->add_option_function<std::string>(
        "--population-csv", [&ov](const std::string& v) {
            ov["population_source"] = "csv";
            ov["csv_path"] = v;
        },
        "Population CSV path");
    simulate->add_option_function<std::string>(
        "--response-column", [&ov](const std::string& v) { ov["response_column"] = v; },
        "Response column name");
    simulate->add_option_function<std::string>(
        "--synthetic-n", [&ov](const std::string& v) {
            ov["population_source"] = "synthetic";
            ov["synthetic_n"] = v;
        },
        "Synthetic population size");
    simulate->add_option_function<std::string>(
        "--synthetic-seed", [&ov](const std::string& v) {
            ov["population_source"] = "synthetic";
            ov["synthetic_seed"] = v;
        },
        "Synthetic generator seed");

    DesignArgs des;
    auto* design = app.add_subcommand("design", "Export (unit_id, score, pi) for a population");
    design->add_option("--population", des.population_path)->required();
    design->add_option("--prior", des.prior_path)->required();
    design->add_option("--response", des.response_column, "Response column name");
    design->add_option("--acquisition", des.acquisition, "pu, ilcb, ei or sei");
    design->add_option("--epsilon", des.epsilon);
    design->add_option("--ilcb-lambda", des.ilcb_lambda);
    design->add_option("--objective-rounds", des.objective_rounds);
    design->add_option("--seed", des.seed);
    design->add_option("--length-scale", des.length_scale);
    design->add_option("--noise-variance", des.noise_variance);
    design->add_option("--out", des.out_path)->required();

    FitArgs fit;
    auto* fitcmd = app.add_subcommand("fit", "Fit the surrogate and predict at query points");
    fitcmd->add_option("--train", fit.train_path)->required();
    fitcmd->add_option("--query", fit.query_path)->required();
    fitcmd->add_option("--response", fit.response_column);
    fitcmd->add_option("--length-scale", fit.length_scale);
    fitcmd->add_option("--noise-variance", fit.noise_variance);
    fitcmd->add_option("--out", fit.out_path)->required();

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Draw from a design and report HT/DE totals");
    estimate->add_option("--population", est.population_path)->required();
    estimate->add_option("--prior", est.prior_path)->required();
    estimate->add_option("--design", est.design_path)->required();
    estimate->add_option("--response", est.response_column);
    estimate->add_option("--scheme", est.scheme, "poisson or fixed-size-weighted");
    estimate->add_option("--sample-size", est.sample_size);
    estimate->add_option("--seed", est.seed);
    estimate->add_option("--length-scale", est.length_scale);
    estimate->add_option("--noise-variance", est.noise_variance);

    MwuArgs mwu;
    auto* mwucmd = app.add_subcommand("mwu", "One-sided Mann-Whitney U test on two value files");
    mwucmd->add_option("file_a", mwu.file_a)->required();
    mwucmd->add_option("file_b", mwu.file_b)->required();
    mwucmd->add_option("--alternative", mwu.alternative, "a-smaller (default) or b-smaller");

    SynthArgs synth;
    auto* synthcmd = app.add_subcommand("synth", "Write a synthetic population CSV");
    synthcmd->add_option("--n", synth.spec.population_size);
    synthcmd->add_option("--m", synth.spec.feature_dim);
    synthcmd->add_option("--length-scale", synth.spec.length_scale);
    synthcmd->add_option("--signal-variance", synth.spec.signal_variance);
    synthcmd->add_option("--noise-variance", synth.spec.noise_variance);
    synthcmd->add_option("--seed", synth.spec.seed);
    synthcmd->add_option("--chunk-mode", synth.chunk_mode, "auto or dense");
    synthcmd->add_option("--response-name", synth.response_name);
    synthcmd->add_option("--out", synth.out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    try {
        sim.overrides = ov;
        if (simulate->parsed()) return cmd_simulate(sim);
        if (design->parsed()) return cmd_design(des);
        if (fitcmd->parsed()) return cmd_fit(fit);
        if (estimate->parsed()) return cmd_estimate(est);
        if (mwucmd->parsed()) return cmd_mwu(mwu);
        if (synthcmd->parsed()) return cmd_synth(synth);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
