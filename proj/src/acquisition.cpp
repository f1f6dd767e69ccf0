#include "bosample/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bosample/normal.hpp"
#include "bosample/rng.hpp"

namespace bosample {

void AcquisitionSpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("AcquisitionSpec: lambda must be non-negative");
}

const char* acquisition_name(AcquisitionKind kind) {
    switch (kind) {
        case AcquisitionKind::PU: return "pu";
        case AcquisitionKind::ILCB: return "ilcb";
        case AcquisitionKind::EI: return "ei";
        case AcquisitionKind::SEI: return "sei";
    }
    return "?";
}

namespace {

double mean_abs_error(const GpPosterior& gp, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, const std::vector<int>& idx,
                      int skip = -1) {
    double sum = 0.0;
    int count = 0;
    for (int i : idx) {
        if (i == skip) continue;
        sum += std::abs(y[i] - gp.predict_mean(X.row(i)));
        ++count;
    }
    return sum / static_cast<double>(count);
}

Dataset subset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<int>& idx, int extra = -1) {
    const Eigen::Index m = X.cols();
    const Eigen::Index n = static_cast<Eigen::Index>(idx.size()) + (extra >= 0 ? 1 : 0);
    Dataset d;
    d.features.resize(n, m);
    d.responses.resize(n);
    Eigen::Index r = 0;
    for (int i : idx) {
        d.features.row(r) = X.row(i);
        d.responses[r] = y[i];
        ++r;
    }
    if (extra >= 0) {
        d.features.row(r) = X.row(extra);
        d.responses[r] = y[extra];
    }
    return d;
}

} // namespace

std::vector<ObjectiveRecord> estimate_objective_records(const Dataset& prior,
                                                        const KernelConfig& cfg,
                                                        int rounds,
                                                        std::uint64_t rng_seed) {
    validate_dataset(prior);
    cfg.validate();
    const int n = static_cast<int>(prior.size());
    if (n < 10)
        throw std::invalid_argument("estimate_objective_records: prior needs at least 10 points");
    if (rounds < 1)
        throw std::invalid_argument("estimate_objective_records: rounds must be >= 1");

    const int n_hold = std::max(1, n / 5); // 20% holdout; >= 2 given n >= 10
    std::vector<ObjectiveRecord> records;
    records.reserve(static_cast<std::size_t>(rounds) * static_cast<std::size_t>(n_hold));

    for (int round = 0; round < rounds; ++round) {
        Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(round)));
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        const std::vector<int> holdout(perm.begin(), perm.begin() + n_hold);
        const std::vector<int> base(perm.begin() + n_hold, perm.end());

        const GpPosterior base_fit = GpPosterior::fit(subset(prior.features, prior.responses, base), cfg);
        const double mae_base = mean_abs_error(base_fit, prior.features, prior.responses, holdout);

        for (int d : holdout) {
            const GpPosterior with_d =
                GpPosterior::fit(subset(prior.features, prior.responses, base, d), cfg);
            const double mae_with_d =
                mean_abs_error(with_d, prior.features, prior.responses, holdout, d);
            records.push_back({prior.features.row(d), mae_with_d - mae_base});
        }
    }
    return records;
}

Dataset objective_dataset(const std::vector<ObjectiveRecord>& records) {
    if (records.empty())
        throw std::invalid_argument("objective_dataset: no records");
    Dataset data;
    const Eigen::Index m = records.front().features.size();
    data.features.resize(static_cast<Eigen::Index>(records.size()), m);
    data.responses.resize(static_cast<Eigen::Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) {
        data.features.row(static_cast<Eigen::Index>(i)) = records[i].features;
        data.responses[static_cast<Eigen::Index>(i)] = records[i].delta_mae;
    }
    return data;
}

ObjectiveSurrogate fit_objective_surrogate(const std::vector<ObjectiveRecord>& records,
                                           const KernelConfig& cfg) {
    const Dataset data = objective_dataset(records);
    ObjectiveSurrogate s{GpPosterior::fit(data, cfg), data.responses.minCoeff()};
    return s;
}

double acq_pu(const Prediction& pred) { return pred.std_dev; }

double acq_ilcb(const Prediction& pred, double lambda) {
    return lambda * pred.std_dev - pred.mean;
}

double acq_ei(const Prediction& pred, double g_min) {
    const double sigma = pred.std_dev;
    if (sigma <= 0.0) return std::max(g_min - pred.mean, 0.0);
    const double z = (g_min - pred.mean) / sigma;
    return std::max(sigma * (z * norm_cdf(z) + norm_pdf(z)), 0.0);
}

double improvement_variance(const Prediction& pred, double g_min) {
    const double sigma = pred.std_dev;
    if (sigma <= 0.0)
        throw std::domain_error("improvement_variance: degenerate (sigma = 0)");
    const double z = (g_min - pred.mean) / sigma;
    const double ei = acq_ei(pred, g_min);
    const double v = sigma * sigma * ((z * z + 1.0) * norm_cdf(z) + z * norm_pdf(z)) - ei * ei;
    return std::max(v, 0.0);
}

double acq_sei(const Prediction& pred, double g_min) {
    if (pred.std_dev <= 0.0) return 0.0;
    const double v = improvement_variance(pred, g_min);
    if (v <= 1e-12) return 0.0;
    return acq_ei(pred, g_min) / std::sqrt(v);
}

Eigen::VectorXd scores_from_predictions(const AcquisitionSpec& spec,
                                        const Eigen::Ref<const Eigen::VectorXd>& means,
                                        const Eigen::Ref<const Eigen::VectorXd>& std_devs,
                                        double g_min) {
    spec.validate();
    const Eigen::Index n = means.size();
    if (n < 1) throw std::invalid_argument("scores_from_predictions: empty input");
    if (std_devs.size() != n)
        throw std::invalid_argument("scores_from_predictions: mean/std length mismatch");

    Eigen::VectorXd scores(n);
#pragma omp parallel for schedule(static) if (n > 512)
    for (Eigen::Index i = 0; i < n; ++i) {
        const Prediction p{means[i], std_devs[i]};
        switch (spec.kind) {
            case AcquisitionKind::PU: scores[i] = acq_pu(p); break;
            case AcquisitionKind::ILCB: scores[i] = acq_ilcb(p, spec.lambda); break;
            case AcquisitionKind::EI: scores[i] = acq_ei(p, g_min); break;
            case AcquisitionKind::SEI: scores[i] = acq_sei(p, g_min); break;
        }
    }

    // The design step assumes strictly positive scores; shift when violated.
    const double lo = scores.minCoeff();
    if (lo <= 0.0) scores.array() += std::abs(lo) + 1e-6;
    return scores;
}

Eigen::VectorXd score_population(const AcquisitionSpec& spec,
                                 const Eigen::Ref<const Eigen::MatrixXd>& population_features,
                                 const GpPosterior& response_surrogate,
                                 const ObjectiveSurrogate* objective_surrogate) {
    spec.validate();
    if (population_features.rows() < 1)
        throw std::invalid_argument("score_population: empty population");
    if (spec.kind != AcquisitionKind::PU && objective_surrogate == nullptr)
        throw std::invalid_argument("score_population: ILCB/EI/SEI need the objective surrogate");

    Eigen::VectorXd means, stds;
    double g_min = 0.0;
    if (spec.kind == AcquisitionKind::PU) {
        response_surrogate.predict_batch(population_features, means, stds);
    } else {
        objective_surrogate->gp.predict_batch(population_features, means, stds);
        g_min = objective_surrogate->g_min;
    }
    return scores_from_predictions(spec, means, stds, g_min);
}

} // namespace bosample
