#include "bosample/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bosample/csv.hpp"
#include "bosample/errors.hpp"
#include "bosample/version.hpp"

namespace bosample {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

SimulationConfig config_from_pairs(const std::map<std::string, std::string>& pairs) {
    SimulationConfig cfg;
    std::string source = pairs.count("population_source") ? pairs.at("population_source") : "";
    SyntheticSpec synth;
    bool any_synth_key = false;

    for (const auto& [key, value] : pairs) {
        if (key == "population_source") {
            if (value != "csv" && value != "synthetic")
                throw ConfigError("config: population_source must be csv or synthetic");
        } else if (key == "csv_path") {
            cfg.csv_path = value;
        } else if (key == "response_column") {
            cfg.response_column = value;
        } else if (key == "synthetic_n") {
            synth.population_size = static_cast<int>(parse_int(key, value));
            any_synth_key = true;
        } else if (key == "synthetic_m") {
            synth.feature_dim = static_cast<int>(parse_int(key, value));
            any_synth_key = true;
        } else if (key == "synthetic_length_scale") {
            synth.length_scale = parse_double(key, value);
            any_synth_key = true;
        } else if (key == "synthetic_signal_variance") {
            synth.signal_variance = parse_double(key, value);
            any_synth_key = true;
        } else if (key == "synthetic_noise_variance") {
            synth.noise_variance = parse_double(key, value);
            any_synth_key = true;
        } else if (key == "synthetic_seed") {
            synth.seed = static_cast<std::uint64_t>(parse_int(key, value));
            any_synth_key = true;
        } else if (key == "synthetic_chunk_mode") {
            if (value == "auto")
                synth.chunk_mode = SynthChunkMode::Auto;
            else if (value == "dense")
                synth.chunk_mode = SynthChunkMode::Dense;
            else
                throw ConfigError("config: synthetic_chunk_mode must be auto or dense");
            any_synth_key = true;
        } else if (key == "prior_size") {
            cfg.prior_size = static_cast<int>(parse_int(key, value));
        } else if (key == "sample_size") {
            cfg.sample_size = static_cast<int>(parse_int(key, value));
        } else if (key == "repeats") {
            cfg.repeats = static_cast<int>(parse_int(key, value));
        } else if (key == "designs") {
            cfg.designs.clear();
            for (const std::string& name : split_list(value))
                cfg.designs.push_back({parse_design_kind(name), ""});
            if (cfg.designs.empty()) throw ConfigError("config: designs list is empty");
        } else if (key == "epsilon") {
            cfg.epsilon = parse_double(key, value);
        } else if (key == "scheme") {
            if (value == "poisson")
                cfg.scheme = SamplingScheme::Poisson;
            else if (value == "fixed-size-weighted" || value == "fixed_size_weighted")
                cfg.scheme = SamplingScheme::FixedSizeWeighted;
            else
                throw ConfigError("config: scheme must be poisson or fixed-size-weighted");
        } else if (key == "master_seed") {
            cfg.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
        } else if (key == "histogram_bins") {
            cfg.histogram_bins = static_cast<int>(parse_int(key, value));
        } else if (key == "objective_rounds") {
            cfg.objective_rounds = static_cast<int>(parse_int(key, value));
        } else if (key == "ilcb_lambda") {
            cfg.ilcb_lambda = parse_double(key, value);
        } else if (key == "length_scale") {
            if (value != "auto") cfg.kernel.length_scale = parse_double(key, value);
        } else if (key == "noise_variance") {
            if (value != "auto") cfg.kernel.noise_variance = parse_double(key, value);
        } else if (key == "jitter") {
            if (value != "auto") cfg.kernel.jitter = parse_double(key, value);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }

    if (source == "synthetic" || (source.empty() && any_synth_key && !cfg.csv_path))
        cfg.synthetic = synth;
    if (source == "csv" && !cfg.csv_path) throw ConfigError("config: csv source needs csv_path");
    if (cfg.csv_path && cfg.synthetic)
        throw ConfigError("config: choose one population source, not both");
    return cfg;
}

SimulationConfig parse_simulation_config(const std::string& path,
                                         const std::map<std::string, std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::map<std::string, std::string> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
        pairs[key] = value;
    }
    for (const auto& [key, value] : overrides) pairs[key] = value;
    return config_from_pairs(pairs);
}

std::string config_echo(const SimulationConfig& config) {
    std::map<std::string, std::string> kv;
    if (config.csv_path) {
        kv["population_source"] = "csv";
        kv["csv_path"] = *config.csv_path;
        kv["response_column"] = config.response_column;
    } else if (config.synthetic) {
        kv["population_source"] = "synthetic";
        kv["synthetic_n"] = std::to_string(config.synthetic->population_size);
        kv["synthetic_m"] = std::to_string(config.synthetic->feature_dim);
        kv["synthetic_length_scale"] = format_double(config.synthetic->length_scale);
        kv["synthetic_signal_variance"] = format_double(config.synthetic->signal_variance);
        kv["synthetic_noise_variance"] = format_double(config.synthetic->noise_variance);
        kv["synthetic_seed"] = std::to_string(config.synthetic->seed);
        kv["synthetic_chunk_mode"] =
            config.synthetic->chunk_mode == SynthChunkMode::Dense ? "dense" : "auto";
    }
    kv["prior_size"] = std::to_string(config.prior_size);
    kv["sample_size"] = std::to_string(config.sample_size);
    kv["repeats"] = std::to_string(config.repeats);
    std::string designs;
    for (const DesignEntry& d : config.resolved_designs()) {
        if (!designs.empty()) designs += ',';
        designs += design_kind_name(d.kind);
    }
    kv["designs"] = designs;
    kv["epsilon"] = format_double(config.epsilon);
    kv["scheme"] = scheme_name(config.scheme);
    kv["master_seed"] = std::to_string(config.master_seed);
    kv["histogram_bins"] = std::to_string(config.histogram_bins);
    kv["objective_rounds"] = std::to_string(config.objective_rounds);
    kv["ilcb_lambda"] = format_double(config.ilcb_lambda);
    kv["length_scale"] =
        config.kernel.length_scale ? format_double(*config.kernel.length_scale) : "auto";
    kv["noise_variance"] =
        config.kernel.noise_variance ? format_double(*config.kernel.noise_variance) : "auto";
    kv["jitter"] = config.kernel.jitter ? format_double(*config.kernel.jitter) : "auto";

    std::string out;
    for (const auto& [key, value] : kv) out += key + " = " + value + "\n";
    return out;
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string summary_json(const SimulationReport& report, const SimulationConfig& config,
                         const std::string& timestamp) {
    using json = nlohmann::ordered_json;
    json j;
    j["designs"] = report.design_names;
    j["repeats"] = {{"requested", report.repeats_requested},
                    {"completed", report.repeats_completed},
                    {"failed", report.repeats_failed}};
    j["degraded"] = report.degraded;

    json summaries = json::object();
    for (const std::string& name : report.design_names) {
        const auto it = report.summaries.find(name);
        if (it == report.summaries.end()) continue;
        json per_metric = json::object();
        for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
            const FiveNumber& f = it->second.metrics[metric];
            per_metric[kMetricNames[metric]] = {{"min", f.min},
                                                {"q1", f.q1},
                                                {"median", f.median},
                                                {"q3", f.q3},
                                                {"max", f.max}};
        }
        summaries[name] = per_metric;
    }
    j["summaries"] = summaries;

    j["baseline_design"] = report.baseline_design;
    json mwu = json::object();
    for (const std::string& name : report.design_names) {
        const auto it = report.mwu_vs_baseline.find(name);
        if (it == report.mwu_vs_baseline.end()) continue;
        json per_metric = json::object();
        for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric)
            per_metric[kMetricNames[metric]] = {{"u", it->second[metric].u},
                                                {"p", it->second[metric].p}};
        mwu[name] = per_metric;
    }
    j["mann_whitney_vs_baseline"] = mwu;

    const std::string echo = config_echo(config);
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(echo)));
    j["provenance"] = {{"version", kVersion},
                       {"master_seed", report.master_seed},
                       {"config_hash", hash_hex},
                       {"config", echo},
                       {"generated_at", timestamp}};
    return j.dump(2) + "\n";
}

} // namespace bosample
