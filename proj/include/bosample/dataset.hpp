#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bosample {

// Observed data: one row of `features` per unit, paired response.
struct Dataset {
    Eigen::MatrixXd features;                // n x m, row k is x_k
    Eigen::VectorXd responses;               // length n, y_k
    std::vector<std::string> feature_names;  // optional, may be empty

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
};

// Throws std::invalid_argument if shapes disagree or any entry is non-finite.
void validate_dataset(const Dataset& data);

// A full population with per-unit model predictions attached; residuals
// D_k = responses[k] - predictions[k] drive the difference estimator.
struct PopulationFrame {
    Eigen::MatrixXd features;    // N x m
    Eigen::VectorXd responses;   // length N (ground truth, known in simulation)
    Eigen::VectorXd predictions; // length N (surrogate estimates)

    Eigen::Index size() const { return features.rows(); }
    double residual(Eigen::Index k) const { return responses[k] - predictions[k]; }
};

} // namespace bosample
