#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bosample/gp.hpp"

namespace bosample {

enum class AcquisitionKind { PU, ILCB, EI, SEI };

struct AcquisitionSpec {
    AcquisitionKind kind = AcquisitionKind::PU;
    double lambda = 0.2; // ILCB exploration weight, >= 0

    void validate() const;
};

const char* acquisition_name(AcquisitionKind kind);

// One observed (x, delta-MAE) pair: the change in out-of-sample MAE caused
// by adding the point at x to the training set.
struct ObjectiveRecord {
    Eigen::RowVectorXd features;
    double delta_mae = 0.0;
};

// GP fitted on objective records plus the incumbent minimum, which EI/SEI
// measure improvement against.
struct ObjectiveSurrogate {
    GpPosterior gp;
    double g_min = 0.0;
};

// Monte Carlo estimation of the objective: each round splits `prior` into a
// base set (80%) and holdout (20%), fits on the base, and measures how the
// holdout MAE moves when each holdout point is added to the fit. Records are
// pooled across rounds; round r of any run reproduces round r of a longer
// run with the same seed.
std::vector<ObjectiveRecord> estimate_objective_records(const Dataset& prior,
                                                        const KernelConfig& cfg,
                                                        int rounds,
                                                        std::uint64_t rng_seed);

ObjectiveSurrogate fit_objective_surrogate(const std::vector<ObjectiveRecord>& records,
                                           const KernelConfig& cfg);

// Records repackaged as a Dataset (x -> delta_mae), e.g. for resolving the
// objective surrogate's kernel defaults on its own response scale.
Dataset objective_dataset(const std::vector<ObjectiveRecord>& records);

// Table of acquisition functions. PU reads the response surrogate; the other
// three read the objective surrogate built for delta-MAE minimization.
double acq_pu(const Prediction& pred);
double acq_ilcb(const Prediction& pred, double lambda);
double acq_ei(const Prediction& pred, double g_min);
double improvement_variance(const Prediction& pred, double g_min);
double acq_sei(const Prediction& pred, double g_min);

// Acquisition values for every population unit, strictly positive (scores
// are shifted up by |min| + 1e-6 if any come out non-positive; min-max
// inclusion probabilities are invariant to the shift). ILCB/EI/SEI require
// the objective surrogate.
Eigen::VectorXd score_population(const AcquisitionSpec& spec,
                                 const Eigen::Ref<const Eigen::MatrixXd>& population_features,
                                 const GpPosterior& response_surrogate,
                                 const ObjectiveSurrogate* objective_surrogate);

// Same scoring given precomputed surrogate predictions per unit. PU reads
// response-surrogate predictions; the others read objective-surrogate ones.
Eigen::VectorXd scores_from_predictions(const AcquisitionSpec& spec,
                                        const Eigen::Ref<const Eigen::VectorXd>& means,
                                        const Eigen::Ref<const Eigen::VectorXd>& std_devs,
                                        double g_min);

} // namespace bosample
