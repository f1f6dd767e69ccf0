#include "bosample/reference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bosample/errors.hpp"

namespace bosample::ref {

Eigen::MatrixXd gram_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X, const KernelConfig& cfg) {
    cfg.validate();
    if (X.rows() < 1) throw std::invalid_argument("ref::gram_matrix: need at least one row");
    if (!X.allFinite()) throw std::invalid_argument("ref::gram_matrix: non-finite input");
    const Eigen::Index n = X.rows();
    const double inv_two_l2 = 1.0 / (2.0 * cfg.length_scale * cfg.length_scale);
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::exp(-(X.row(i) - X.row(j)).squaredNorm() * inv_two_l2);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

void predict_batch(const GpPosterior& post, const Eigen::Ref<const Eigen::MatrixXd>& queries,
                   Eigen::VectorXd& means, Eigen::VectorXd& std_devs) {
    if (queries.cols() != post.dim())
        throw std::invalid_argument("ref::predict_batch: query dimension mismatch");
    const Eigen::Index q = queries.rows();
    means.resize(q);
    std_devs.resize(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        const Prediction p = post.predict(queries.row(i));
        means[i] = p.mean;
        std_devs[i] = p.std_dev;
    }
}

namespace {

DesignVariance variance_of(const Eigen::VectorXd& z, const SamplingDesign& design) {
    const int n = design.size();
    if (static_cast<int>(z.size()) != n)
        throw std::invalid_argument("ref::variance: frame and design sizes disagree");
    DesignVariance out;

    switch (design.scheme) {
        case SamplingScheme::Poisson:
        case SamplingScheme::FixedSizeWeighted: {
            double total = 0.0;
            for (int k = 0; k < n; ++k) {
                const double pi = design.pi[static_cast<std::size_t>(k)];
                if (!(pi > 0.0)) throw std::invalid_argument("ref::variance: zero inclusion probability");
                const double w = z[k] / pi;
                total += pi * (1.0 - pi) * w * w;
            }
            out.value = total;
            out.approximate = design.scheme == SamplingScheme::FixedSizeWeighted;
            return out;
        }
        case SamplingScheme::Srs: {
            std::vector<double> w(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) {
                const double pi = design.pi[static_cast<std::size_t>(k)];
                if (!(pi > 0.0)) throw std::invalid_argument("ref::variance: zero inclusion probability");
                w[static_cast<std::size_t>(k)] = z[k] / pi;
            }
            const double pi_true = realized_inclusion(design, 0);
            const double pi_joint = joint_inclusion(design, 0, 1);
            // Same row-partial structure as the parallel quadform.
            double total = 0.0;
            for (int k = 0; k < n; ++k) {
                double row = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double delta =
                        k == j ? pi_true * (1.0 - pi_true) : pi_joint - pi_true * pi_true;
                    row += delta * w[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(j)];
                }
                total += row;
            }
            out.value = total;
            return out;
        }
    }
    throw UnsupportedSchemeError("ref::variance: unknown scheme");
}

} // namespace

DesignVariance de_variance(const PopulationFrame& frame, const SamplingDesign& design) {
    return variance_of(frame.responses - frame.predictions, design);
}

DesignVariance ht_variance(const PopulationFrame& frame, const SamplingDesign& design) {
    return variance_of(frame.responses, design);
}

} // namespace bosample::ref
