#include "bosample/gp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bosample/errors.hpp"

namespace bosample {

void KernelConfig::validate() const {
    if (!(length_scale > 0.0) || !std::isfinite(length_scale))
        throw std::invalid_argument("KernelConfig: length_scale must be positive and finite");
    if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
        throw std::invalid_argument("KernelConfig: noise_variance must be positive and finite");
    if (!(jitter >= 0.0) || !std::isfinite(jitter))
        throw std::invalid_argument("KernelConfig: jitter must be non-negative and finite");
}

void validate_dataset(const Dataset& data) {
    if (data.features.rows() == 0)
        throw std::invalid_argument("Dataset: empty");
    if (data.features.rows() != data.responses.size())
        throw std::invalid_argument("Dataset: feature rows and response length disagree");
    if (!data.features.allFinite() || !data.responses.allFinite())
        throw std::invalid_argument("Dataset: non-finite entries");
}

Standardizer Standardizer::fit(const Eigen::Ref<const Eigen::MatrixXd>& X) {
    Standardizer s;
    const auto n = static_cast<double>(X.rows());
    s.mean = X.colwise().mean();
    Eigen::RowVectorXd var = (X.rowwise() - s.mean).array().square().colwise().sum() / n;
    s.scale = var.array().sqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j)
        if (s.scale[j] < 1e-300) s.scale[j] = 1.0;
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    return (X.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::RowVectorXd Standardizer::apply_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    return (x - mean).array() / scale.array();
}

namespace {

// Median pairwise Euclidean distance between standardized rows; 1.0 when all
// rows coincide (gridded data with every coordinate duplicated).
double median_pairwise_distance(const Eigen::MatrixXd& Z) {
    const Eigen::Index n = Z.rows();
    if (n < 2) return 1.0;
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            d.push_back((Z.row(i) - Z.row(j)).norm());
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double med = *mid;
    if (d.size() % 2 == 0) {
        auto lo = std::max_element(d.begin(), mid);
        med = 0.5 * (med + *lo);
    }
    return med > 0.0 ? med : 1.0;
}

} // namespace

KernelConfig resolve_kernel_config(const Dataset& data, const KernelOverrides& overrides) {
    validate_dataset(data);
    KernelConfig cfg;
    if (overrides.length_scale) {
        cfg.length_scale = *overrides.length_scale;
    } else {
        const Standardizer std = Standardizer::fit(data.features);
        cfg.length_scale = median_pairwise_distance(std.apply(data.features));
    }
    if (overrides.noise_variance) {
        cfg.noise_variance = *overrides.noise_variance;
    } else {
        const double mean = data.responses.mean();
        const double var =
            (data.responses.array() - mean).square().sum() / static_cast<double>(data.responses.size());
        cfg.noise_variance = var > 0.0 ? 0.1 * var : 1e-8;
    }
    cfg.jitter = overrides.jitter.value_or(0.0);
    cfg.validate();
    return cfg;
}

double kernel_eval(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd>& b,
                   const KernelConfig& cfg) {
    cfg.validate();
    if (a.size() != b.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    const double sq = (a - b).squaredNorm();
    return std::exp(-sq / (2.0 * cfg.length_scale * cfg.length_scale));
}

Eigen::MatrixXd gram_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X, const KernelConfig& cfg) {
    cfg.validate();
    if (X.rows() < 1) throw std::invalid_argument("gram_matrix: need at least one row");
    if (!X.allFinite()) throw std::invalid_argument("gram_matrix: non-finite input");
    const Eigen::Index n = X.rows();
    const double inv_two_l2 = 1.0 / (2.0 * cfg.length_scale * cfg.length_scale);
    Eigen::MatrixXd K(n, n);
#pragma omp parallel for schedule(static) if (n > 96)
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

GpPosterior GpPosterior::fit(const Dataset& data, const KernelConfig& cfg) {
    cfg.validate();
    validate_dataset(data);

    GpPosterior post;
    post.kernel_ = cfg;
    post.standardizer_ = Standardizer::fit(data.features);
    post.train_features_ = post.standardizer_.apply(data.features);

    const Eigen::Index n = data.size();
    const Eigen::MatrixXd K = gram_matrix(post.train_features_, cfg);
    // Gram diagonal is identically 1 for this kernel; the escalation ladder
    // starts at 1e-9 x mean diagonal and multiplies by 10 up to 1e-3.
    const double mean_diag = K.diagonal().mean();
    std::vector<double> attempted;
    double jitter = cfg.jitter;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (;;) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += cfg.noise_variance + jitter;
        llt.compute(A);
        attempted.push_back(jitter);
        if (llt.info() == Eigen::Success) break;
        const double floor = 1e-9 * mean_diag;
        double next = (jitter <= cfg.jitter) ? std::max(floor, cfg.jitter * 10.0)
                                             : jitter * 10.0;
        if (next <= jitter) next = jitter > 0.0 ? jitter * 10.0 : floor;
        if (next > 1e-3 * mean_diag) {
            std::ostringstream msg;
            msg << "GpPosterior::fit: Cholesky failed for n=" << n
                << " after jitter escalation up to " << jitter;
            throw SingularKernelError(msg.str(), attempted);
        }
        jitter = next;
    }
    post.used_jitter_ = jitter;
    post.chol_lower_ = llt.matrixL();
    post.alpha_ = llt.solve(data.responses);
    return post;
}

Eigen::VectorXd GpPosterior::kernel_column(const Eigen::RowVectorXd& q) const {
    const Eigen::Index n = train_features_.rows();
    const double inv_two_l2 = 1.0 / (2.0 * kernel_.length_scale * kernel_.length_scale);
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i)
        k[i] = std::exp(-(train_features_.row(i) - q).squaredNorm() * inv_two_l2);
    return k;
}

Prediction GpPosterior::predict(const Eigen::Ref<const Eigen::RowVectorXd>& query) const {
    if (query.size() != dim())
        throw std::invalid_argument("GpPosterior::predict: query dimension mismatch");
    const Eigen::RowVectorXd q = standardizer_.apply_row(query);
    const Eigen::VectorXd k = kernel_column(q);
    Prediction p;
    p.mean = k.dot(alpha_);
    const Eigen::VectorXd v = chol_lower_.triangularView<Eigen::Lower>().solve(k);
    // k(x, x) = 1; the PSD Schur complement keeps 1 - |v|^2 >= 0, clamp the
    // round-off so variance never dips below the noise floor.
    const double explained = std::max(0.0, 1.0 - v.squaredNorm());
    p.std_dev = std::sqrt(kernel_.noise_variance + explained);
    return p;
}

double GpPosterior::predict_mean(const Eigen::Ref<const Eigen::RowVectorXd>& query) const {
    if (query.size() != dim())
        throw std::invalid_argument("GpPosterior::predict_mean: query dimension mismatch");
    const Eigen::RowVectorXd q = standardizer_.apply_row(query);
    return kernel_column(q).dot(alpha_);
}

void GpPosterior::predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries,
                                Eigen::VectorXd& means, Eigen::VectorXd& std_devs) const {
    if (queries.cols() != dim())
        throw std::invalid_argument("GpPosterior::predict_batch: query dimension mismatch");
    const Eigen::Index q = queries.rows();
    means.resize(q);
    std_devs.resize(q);
#pragma omp parallel for schedule(static) if (q > 32)
    for (Eigen::Index i = 0; i < q; ++i) {
        const Prediction p = predict(queries.row(i));
        means[i] = p.mean;
        std_devs[i] = p.std_dev;
    }
}

Eigen::VectorXd GpPosterior::predict_mean_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries) const {
    if (queries.cols() != dim())
        throw std::invalid_argument("GpPosterior::predict_mean_batch: query dimension mismatch");
    const Eigen::Index q = queries.rows();
    Eigen::VectorXd means(q);
#pragma omp parallel for schedule(static) if (q > 64)
    for (Eigen::Index i = 0; i < q; ++i)
        means[i] = predict_mean(queries.row(i));
    return means;
}

} // namespace bosample
