#pragma once

#include "bosample/estimators.hpp"
#include "bosample/gp.hpp"

// Serial reference implementations of the OpenMP kernels. Kept for testing:
// each mirrors its parallel counterpart's per-element arithmetic and
// reduction order exactly, so results must match bit for bit at any thread
// count. tools/bench_kernels times the pairs against each other.
namespace bosample::ref {

Eigen::MatrixXd gram_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X, const KernelConfig& cfg);

void predict_batch(const GpPosterior& post, const Eigen::Ref<const Eigen::MatrixXd>& queries,
                   Eigen::VectorXd& means, Eigen::VectorXd& std_devs);

DesignVariance de_variance(const PopulationFrame& frame, const SamplingDesign& design);
DesignVariance ht_variance(const PopulationFrame& frame, const SamplingDesign& design);

} // namespace bosample::ref
