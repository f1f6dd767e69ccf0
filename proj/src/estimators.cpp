#include "bosample/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bosample/errors.hpp"

namespace bosample {

namespace {

void check_positive_pi(const std::vector<double>& pi, const std::vector<int>& indices) {
    for (int k : indices)
        if (!(pi[static_cast<std::size_t>(k)] > 0.0))
            throw std::invalid_argument("estimator: zero inclusion probability on a sampled unit");
}

// Row-partitioned double sum: sum_k sum_j delta(k, j) * w_k * w_j, with each
// row accumulated left to right and rows reduced in index order, so the
// result is identical for any thread count.
template <class DeltaFn>
double delta_quadform(const std::vector<double>& w, DeltaFn&& delta) {
    const int n = static_cast<int>(w.size());
    std::vector<double> row_sums(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static) if (n > 256)
    for (int k = 0; k < n; ++k) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += delta(k, j) * w[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(j)];
        row_sums[static_cast<std::size_t>(k)] = row;
    }
    double total = 0.0;
    for (int k = 0; k < n; ++k) total += row_sums[static_cast<std::size_t>(k)];
    return total;
}

// Weighted values z_k / pi_k over the whole frame, using nominal pi.
std::vector<double> nominal_weighted(const Eigen::VectorXd& z, const SamplingDesign& design) {
    const int n = static_cast<int>(z.size());
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double pi = design.pi[static_cast<std::size_t>(k)];
        if (!(pi > 0.0)) throw std::invalid_argument("variance: zero inclusion probability");
        w[static_cast<std::size_t>(k)] = z[k] / pi;
    }
    return w;
}

DesignVariance variance_of(const Eigen::VectorXd& z, const SamplingDesign& design) {
    const int n = design.size();
    if (static_cast<int>(z.size()) != n)
        throw std::invalid_argument("variance: frame and design sizes disagree");
    DesignVariance out;

    switch (design.scheme) {
        case SamplingScheme::Poisson: {
            // Independence collapses the double sum to sum pi(1-pi)(z/pi)^2.
            double total = 0.0;
            for (int k = 0; k < n; ++k) {
                const double pi = design.pi[static_cast<std::size_t>(k)];
                if (!(pi > 0.0)) throw std::invalid_argument("variance: zero inclusion probability");
                const double w = z[k] / pi;
                total += pi * (1.0 - pi) * w * w;
            }
            out.value = total;
            return out;
        }
        case SamplingScheme::Srs: {
            const std::vector<double> w = nominal_weighted(z, design);
            const double pi_true = realized_inclusion(design, 0);
            const double pi_joint = joint_inclusion(design, 0, 1);
            out.value = delta_quadform(w, [&](int k, int j) {
                return k == j ? pi_true * (1.0 - pi_true) : pi_joint - pi_true * pi_true;
            });
            return out;
        }
        case SamplingScheme::FixedSizeWeighted: {
            // No analytic pi_kj; Poisson approximation over nominal pi.
            double total = 0.0;
            for (int k = 0; k < n; ++k) {
                const double pi = design.pi[static_cast<std::size_t>(k)];
                if (!(pi > 0.0)) throw std::invalid_argument("variance: zero inclusion probability");
                const double w = z[k] / pi;
                total += pi * (1.0 - pi) * w * w;
            }
            out.value = total;
            out.approximate = true;
            return out;
        }
    }
    throw UnsupportedSchemeError("variance: unknown scheme");
}

} // namespace

TotalEstimate ht_total(const SampleDraw& sample,
                       const Eigen::Ref<const Eigen::VectorXd>& responses_on_sample) {
    if (static_cast<std::size_t>(responses_on_sample.size()) != sample.indices.size())
        throw std::invalid_argument("ht_total: responses must align with sampled indices");
    check_positive_pi(sample.pi_used, sample.indices);
    double total = 0.0;
    for (std::size_t i = 0; i < sample.indices.size(); ++i)
        total += responses_on_sample[static_cast<Eigen::Index>(i)] /
                 sample.pi_used[static_cast<std::size_t>(sample.indices[i])];
    TotalEstimate e;
    e.estimator = EstimatorKind::HorvitzThompson;
    e.value = total;
    return e;
}

TotalEstimate difference_total(const SampleDraw& sample, const PopulationFrame& frame,
                               bool normalize_pi) {
    const Eigen::Index n = frame.size();
    if (frame.predictions.size() != n || frame.responses.size() != n)
        throw std::invalid_argument("difference_total: frame fields must cover every unit");
    if (static_cast<Eigen::Index>(sample.pi_used.size()) != n)
        throw std::invalid_argument("difference_total: design pi must cover the frame");
    check_positive_pi(sample.pi_used, sample.indices);

    double pi_sum = 1.0;
    if (normalize_pi) {
        pi_sum = 0.0;
        for (double p : sample.pi_used) pi_sum += p;
        if (!(pi_sum > 0.0)) throw std::invalid_argument("difference_total: pi sum not positive");
    }

    double total = frame.predictions.sum();
    for (int k : sample.indices) {
        const double pi = sample.pi_used[static_cast<std::size_t>(k)] / (normalize_pi ? pi_sum : 1.0);
        total += frame.residual(k) / pi;
    }
    TotalEstimate e;
    e.estimator = EstimatorKind::Difference;
    e.value = total;
    e.pi_normalized = normalize_pi;
    return e;
}

DesignVariance de_variance(const PopulationFrame& frame, const SamplingDesign& design) {
    return variance_of(frame.responses - frame.predictions, design);
}

DesignVariance ht_variance(const PopulationFrame& frame, const SamplingDesign& design) {
    return variance_of(frame.responses, design);
}

DesignVariance de_variance_estimate(const SampleDraw& sample, const PopulationFrame& frame,
                                    const SamplingDesign& design) {
    const Eigen::Index n = frame.size();
    if (static_cast<Eigen::Index>(design.pi.size()) != n)
        throw std::invalid_argument("de_variance_estimate: design and frame sizes disagree");
    check_positive_pi(design.pi, sample.indices);

    DesignVariance out;
    switch (design.scheme) {
        case SamplingScheme::Poisson: {
            // Off-diagonal covariances vanish: sum_s (1-pi)(D/pi)^2.
            double total = 0.0;
            for (int k : sample.indices) {
                const double pi = design.pi[static_cast<std::size_t>(k)];
                const double w = frame.residual(k) / pi;
                total += (1.0 - pi) * w * w;
            }
            out.value = total;
            return out;
        }
        case SamplingScheme::Srs: {
            const double pi_true = realized_inclusion(design, 0);
            const double pi_joint = joint_inclusion(design, 0, 1);
            if (!(pi_joint > 0.0))
                throw std::invalid_argument("de_variance_estimate: zero joint inclusion probability");
            double total = 0.0;
            for (int k : sample.indices) {
                const double wk = frame.residual(k) / design.pi[static_cast<std::size_t>(k)];
                for (int j : sample.indices) {
                    const double wj = frame.residual(j) / design.pi[static_cast<std::size_t>(j)];
                    const double delta_hat = k == j
                                                 ? (1.0 - pi_true)
                                                 : (pi_joint - pi_true * pi_true) / pi_joint;
                    total += delta_hat * wk * wj;
                }
            }
            out.value = total;
            return out;
        }
        case SamplingScheme::FixedSizeWeighted: {
            double total = 0.0;
            for (int k : sample.indices) {
                const double pi = design.pi[static_cast<std::size_t>(k)];
                const double w = frame.residual(k) / pi;
                total += (1.0 - pi) * w * w;
            }
            out.value = total;
            out.approximate = true;
            return out;
        }
    }
    throw UnsupportedSchemeError("de_variance_estimate: unknown scheme");
}

} // namespace bosample
