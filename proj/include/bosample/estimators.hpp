#pragma once

#include <optional>

#include "bosample/dataset.hpp"
#include "bosample/design.hpp"

namespace bosample {

enum class EstimatorKind { HorvitzThompson, Difference };

struct TotalEstimate {
    EstimatorKind estimator = EstimatorKind::HorvitzThompson;
    double value = 0.0;
    std::optional<double> variance;          // design variance, when computed
    std::optional<double> variance_estimate; // sample-based estimate, when computed
    bool variance_approximate = false;       // Poisson approximation was used
    bool pi_normalized = false;              // difference estimator with pi* weights
};

// Design variance with a flag marking the Poisson approximation used for
// schemes without analytic joint inclusion probabilities.
struct DesignVariance {
    double value = 0.0;
    bool approximate = false;
};

// Horvitz-Thompson total: sum over the sample of y_k / pi_k. The responses
// are aligned with sample.indices.
TotalEstimate ht_total(const SampleDraw& sample,
                       const Eigen::Ref<const Eigen::VectorXd>& responses_on_sample);

// Difference estimator: sum of frame predictions plus pi-weighted residual
// correction on the sample. With normalize_pi the weights use
// pi*_k = pi_k / sum(pi), so the weights sum handles fixed-size designs on a
// comparable footing.
TotalEstimate difference_total(const SampleDraw& sample, const PopulationFrame& frame,
                               bool normalize_pi);

// Double-sum design variances over residuals (difference estimator) or raw
// responses (Horvitz-Thompson). The covariance terms use the scheme's true
// inclusion probabilities; the weights keep the design's nominal pi.
DesignVariance de_variance(const PopulationFrame& frame, const SamplingDesign& design);
DesignVariance ht_variance(const PopulationFrame& frame, const SamplingDesign& design);

// Unbiased sample-based estimator of the DE variance; may come out negative
// for some design/sample pairs, which callers must flag rather than clamp.
DesignVariance de_variance_estimate(const SampleDraw& sample, const PopulationFrame& frame,
                                    const SamplingDesign& design);

} // namespace bosample
