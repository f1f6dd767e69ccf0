#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>

#include "bosample/dataset.hpp"

namespace bosample {

// Squared-exponential kernel parameters plus factorization jitter.
struct KernelConfig {
    double length_scale = 1.0;   // l > 0
    double noise_variance = 1.0; // sigma_eps^2 > 0
    double jitter = 0.0;         // >= 0, added to the Gram diagonal up front

    void validate() const;
};

// Optional user overrides; unset fields resolve to data-driven defaults.
struct KernelOverrides {
    std::optional<double> length_scale;
    std::optional<double> noise_variance;
    std::optional<double> jitter;
};

// Defaults when not overridden: length scale = median pairwise Euclidean
// distance between standardized inputs, noise variance = 0.1 * var(y).
KernelConfig resolve_kernel_config(const Dataset& data, const KernelOverrides& overrides = {});

// k(a, b) = exp(-|a-b|^2 / (2 l^2)). Symmetric, in (0, 1].
double kernel_eval(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd>& b,
                   const KernelConfig& cfg);

// Full Gram matrix K_ij = k(x_i, x_j); symmetric with unit diagonal.
Eigen::MatrixXd gram_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X, const KernelConfig& cfg);

struct Prediction {
    double mean = 0.0;
    double std_dev = 0.0;
};

// Per-feature z-score transform frozen at fit time so queries are mapped
// exactly like the training data. Constant features get scale 1.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Eigen::Ref<const Eigen::MatrixXd>& X);
    Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
    Eigen::RowVectorXd apply_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

// Fitted GP in kernel form: stores the Cholesky factor of K + sigma_eps^2 I
// and the solve vector alpha. Immutable after fit; predictions are pure and
// safe to call from many threads at once.
class GpPosterior {
public:
    static GpPosterior fit(const Dataset& data, const KernelConfig& cfg);

    Prediction predict(const Eigen::Ref<const Eigen::RowVectorXd>& query) const;

    // mean = k_*^T alpha only; skips the triangular solve. Much cheaper when
    // predictive uncertainty is not needed.
    double predict_mean(const Eigen::Ref<const Eigen::RowVectorXd>& query) const;

    // Batch forms, parallel across queries, output order fixed by row index.
    void predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries,
                       Eigen::VectorXd& means, Eigen::VectorXd& std_devs) const;
    Eigen::VectorXd predict_mean_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries) const;

    Eigen::Index train_size() const { return train_features_.rows(); }
    Eigen::Index dim() const { return train_features_.cols(); }
    const KernelConfig& kernel() const { return kernel_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    const Eigen::MatrixXd& cholesky_factor() const { return chol_lower_; }
    const Standardizer& standardizer() const { return standardizer_; }
    double used_jitter() const { return used_jitter_; }

private:
    GpPosterior() = default;

    Eigen::MatrixXd train_features_; // standardized
    Eigen::VectorXd alpha_;
    Eigen::MatrixXd chol_lower_;
    KernelConfig kernel_;
    Standardizer standardizer_;
    double used_jitter_ = 0.0;

    Eigen::VectorXd kernel_column(const Eigen::RowVectorXd& standardized_query) const;
};

} // namespace bosample
