#pragma once

// Independent test oracles: exhaustive design enumeration, explicit-inverse
// GP prediction, and Monte Carlo improvement moments. None of these reuse
// the implementation paths they are checked against.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "bosample/gp.hpp"
#include "bosample/rng.hpp"

namespace oracle {

// (sample, probability) pairs covering an entire design.
using EnumeratedDesign = std::vector<std::pair<std::vector<int>, double>>;

inline void subsets_rec(int N, int n, int start, std::vector<int>& cur,
                        std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == n) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < N; ++i) {
        cur.push_back(i);
        subsets_rec(N, n, i + 1, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<int>> all_subsets(int N, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    subsets_rec(N, n, 0, cur, out);
    return out;
}

inline EnumeratedDesign enumerate_srs(int N, int n) {
    const auto subs = all_subsets(N, n);
    EnumeratedDesign d;
    const double p = 1.0 / static_cast<double>(subs.size());
    for (const auto& s : subs) d.emplace_back(s, p);
    return d;
}

inline EnumeratedDesign enumerate_poisson(const std::vector<double>& pi) {
    const int N = static_cast<int>(pi.size());
    EnumeratedDesign d;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << N); ++mask) {
        std::vector<int> s;
        double p = 1.0;
        for (int k = 0; k < N; ++k) {
            if (mask & (std::uint64_t{1} << k)) {
                s.push_back(k);
                p *= pi[static_cast<std::size_t>(k)];
            } else {
                p *= 1.0 - pi[static_cast<std::size_t>(k)];
            }
        }
        d.emplace_back(std::move(s), p);
    }
    return d;
}

template <class F>
double design_expectation(const EnumeratedDesign& d, F&& statistic) {
    double e = 0.0;
    for (const auto& [s, p] : d) e += p * statistic(s);
    return e;
}

template <class F>
double design_variance(const EnumeratedDesign& d, F&& statistic) {
    const double mean = design_expectation(d, statistic);
    double v = 0.0;
    for (const auto& [s, p] : d) {
        const double t = statistic(s) - mean;
        v += p * t * t;
    }
    return v;
}

// Explicit-inverse GP prediction: builds the regularized Gram matrix, takes
// a dense inverse, and evaluates the predictive mean/variance directly.
inline bosample::Prediction dense_gp_predict(const bosample::Dataset& data,
                                             const bosample::KernelConfig& cfg,
                                             const Eigen::RowVectorXd& query) {
    const bosample::Standardizer std = bosample::Standardizer::fit(data.features);
    const Eigen::MatrixXd Z = std.apply(data.features);
    const Eigen::RowVectorXd q = std.apply_row(query);
    const Eigen::Index n = Z.rows();
    Eigen::MatrixXd A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            A(i, j) = bosample::kernel_eval(Z.row(i), Z.row(j), cfg);
    A.diagonal().array() += cfg.noise_variance;
    const Eigen::MatrixXd Ainv = A.inverse();
    Eigen::VectorXd kstar(n);
    for (Eigen::Index i = 0; i < n; ++i) kstar[i] = bosample::kernel_eval(Z.row(i), q, cfg);
    bosample::Prediction p;
    p.mean = kstar.dot(Ainv * data.responses);
    p.std_dev = std::sqrt(cfg.noise_variance + 1.0 - kstar.dot(Ainv * kstar));
    return p;
}

// Monte Carlo moments of the improvement I = max(g_min - G, 0),
// G ~ N(mu, sigma^2), with standard errors for 3-sigma band checks.
struct ImprovementMoments {
    double mean = 0.0;
    double variance = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
};

inline ImprovementMoments improvement_mc(double mu, double sigma, double g_min, int draws,
                                         std::uint64_t seed) {
    bosample::Rng rng(seed);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double g = rng.normal(mu, sigma);
        const double imp = std::max(g_min - g, 0.0);
        const double i2 = imp * imp;
        s1 += imp;
        s2 += i2;
        s3 += i2 * imp;
        s4 += i2 * i2;
    }
    const double n = static_cast<double>(draws);
    const double m1 = s1 / n;
    const double m2 = s2 / n - m1 * m1;
    const double raw3 = s3 / n;
    const double raw4 = s4 / n;
    // central fourth moment from raw moments
    const double mu4 =
        raw4 - 4.0 * m1 * raw3 + 6.0 * m1 * m1 * (s2 / n) - 3.0 * m1 * m1 * m1 * m1;
    ImprovementMoments out;
    out.mean = m1;
    out.variance = m2;
    out.se_mean = std::sqrt(m2 / n);
    out.se_variance = std::sqrt(std::max(mu4 - m2 * m2, 0.0) / n);
    return out;
}

// Exact joint selection probability of units k and j under sequential
// weighted draws without replacement (n picks, weights w), by full tree
// enumeration. Only viable for small populations.
inline double fsw_joint_rec(std::vector<double>& w, int picks_left, bool has_k, bool has_j, int k,
                            int j) {
    if (has_k && has_j) return 1.0;
    if (picks_left == 0) return 0.0;
    double total = 0.0;
    for (double v : w) total += v;
    double prob = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) continue;
        const double p = w[i] / total;
        const double saved = w[i];
        w[i] = 0.0;
        prob += p * fsw_joint_rec(w, picks_left - 1, has_k || static_cast<int>(i) == k,
                                  has_j || static_cast<int>(i) == j, k, j);
        w[i] = saved;
    }
    return prob;
}

inline double exact_fsw_joint(std::vector<double> weights, int n, int k, int j) {
    return fsw_joint_rec(weights, n, false, false, k, j);
}

} // namespace oracle
