#include "bosample/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bosample/errors.hpp"
#include "bosample/rng.hpp"

namespace bosample {

const char* scheme_name(SamplingScheme s) {
    switch (s) {
        case SamplingScheme::Poisson: return "poisson";
        case SamplingScheme::FixedSizeWeighted: return "fixed-size-weighted";
        case SamplingScheme::Srs: return "srs";
    }
    return "?";
}

SamplingDesign minmax_design(const Eigen::Ref<const Eigen::VectorXd>& scores, double epsilon,
                             SamplingScheme scheme, std::optional<int> nominal_sample_size) {
    const Eigen::Index n = scores.size();
    if (n < 2) throw std::invalid_argument("minmax_design: need at least 2 units");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("minmax_design: epsilon must lie in (0, 0.5)");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(scores[i]) || scores[i] <= 0.0)
            throw std::invalid_argument("minmax_design: scores must be finite and positive");
    if (nominal_sample_size && (*nominal_sample_size < 1 || *nominal_sample_size > n))
        throw std::invalid_argument("minmax_design: nominal sample size out of range");

    SamplingDesign d;
    d.scheme = scheme;
    d.nominal_sample_size = nominal_sample_size;
    d.epsilon = epsilon;
    d.pi.resize(static_cast<std::size_t>(n));

    const double lo = scores.minCoeff();
    const double hi = scores.maxCoeff();
    if (hi == lo) {
        std::fill(d.pi.begin(), d.pi.end(), 0.5);
        return d;
    }
    const double span = hi - lo;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = (scores[i] - lo) / span;
        d.pi[static_cast<std::size_t>(i)] = std::clamp(p, epsilon, 1.0 - epsilon);
    }
    return d;
}

SamplingDesign srs_design(int population_size, int sample_size, PiConvention convention) {
    if (population_size < 2 || sample_size < 1 || sample_size >= population_size)
        throw std::invalid_argument("srs_design: need 1 <= n < N");
    SamplingDesign d;
    d.scheme = SamplingScheme::Srs;
    d.nominal_sample_size = sample_size;
    d.epsilon = 0.0;
    const double p = convention == PiConvention::Paper1OverN
                         ? 1.0 / population_size
                         : static_cast<double>(sample_size) / population_size;
    d.pi.assign(static_cast<std::size_t>(population_size), p);
    return d;
}

namespace {

std::vector<int> draw_srs_indices(int population_size, int sample_size, Rng& rng) {
    // Selection sampling (one uniform per unit), order-stable in k.
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(sample_size));
    int needed = sample_size;
    for (int k = 0; k < population_size && needed > 0; ++k) {
        const int left = population_size - k;
        if (rng.uniform() * left < needed) {
            out.push_back(k);
            --needed;
        }
    }
    return out;
}

std::vector<int> draw_weighted_without_replacement(const std::vector<double>& weights, int n,
                                                   Rng& rng) {
    const int population_size = static_cast<int>(weights.size());
    std::vector<double> w = weights;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        double total = 0.0;
        for (double v : w) total += v;
        const double u = rng.uniform() * total;
        double cum = 0.0;
        int pick = -1;
        for (int k = 0; k < population_size; ++k) {
            if (w[k] <= 0.0) continue;
            cum += w[k];
            pick = k;
            if (u < cum) break;
        }
        out.push_back(pick);
        w[static_cast<std::size_t>(pick)] = 0.0;
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

SampleDraw draw(const SamplingDesign& design, std::uint64_t rng_seed) {
    const int population_size = design.size();
    if (population_size < 1) throw std::invalid_argument("draw: empty design");
    Rng rng(rng_seed);
    SampleDraw s;
    s.pi_used = design.pi;

    switch (design.scheme) {
        case SamplingScheme::Poisson:
            for (int k = 0; k < population_size; ++k)
                if (rng.uniform() < design.pi[static_cast<std::size_t>(k)]) s.indices.push_back(k);
            break;
        case SamplingScheme::FixedSizeWeighted: {
            if (!design.nominal_sample_size)
                throw std::invalid_argument("draw: fixed-size-weighted scheme needs a nominal sample size");
            s.indices = draw_weighted_without_replacement(design.pi, *design.nominal_sample_size, rng);
            break;
        }
        case SamplingScheme::Srs: {
            if (!design.nominal_sample_size)
                throw std::invalid_argument("draw: SRS scheme needs a nominal sample size");
            s.indices = draw_srs_indices(population_size, *design.nominal_sample_size, rng);
            break;
        }
    }
    s.realized_size = static_cast<int>(s.indices.size());
    return s;
}

double realized_inclusion(const SamplingDesign& design, int k) {
    if (k < 0 || k >= design.size()) throw std::invalid_argument("realized_inclusion: index out of range");
    switch (design.scheme) {
        case SamplingScheme::Poisson:
        case SamplingScheme::FixedSizeWeighted:
            // Weighted fixed-size has no tractable form; nominal pi is the
            // documented approximation.
            return design.pi[static_cast<std::size_t>(k)];
        case SamplingScheme::Srs:
            if (!design.nominal_sample_size)
                throw std::invalid_argument("realized_inclusion: SRS design lacks a nominal sample size");
            return static_cast<double>(*design.nominal_sample_size) / design.size();
    }
    return 0.0;
}

double joint_inclusion(const SamplingDesign& design, int k, int j,
                       std::optional<JointInclusionBudget> mc) {
    const int population_size = design.size();
    if (k < 0 || j < 0 || k >= population_size || j >= population_size)
        throw std::invalid_argument("joint_inclusion: index out of range");
    if (k == j) throw std::invalid_argument("joint_inclusion: k and j must differ");

    switch (design.scheme) {
        case SamplingScheme::Poisson:
            return design.pi[static_cast<std::size_t>(k)] * design.pi[static_cast<std::size_t>(j)];
        case SamplingScheme::Srs: {
            if (!design.nominal_sample_size)
                throw std::invalid_argument("joint_inclusion: SRS design lacks a nominal sample size");
            const double n = static_cast<double>(*design.nominal_sample_size);
            const double N = static_cast<double>(population_size);
            return n * (n - 1.0) / (N * (N - 1.0));
        }
        case SamplingScheme::FixedSizeWeighted: {
            if (!mc)
                throw UnsupportedSchemeError(
                    "joint_inclusion: no analytic form for fixed-size-weighted; supply a Monte Carlo budget");
            if (mc->draws < 1) throw std::invalid_argument("joint_inclusion: draws must be >= 1");
            int hits = 0;
            for (int r = 0; r < mc->draws; ++r) {
                const SampleDraw s = draw(design, derive_seed(mc->seed, static_cast<std::uint64_t>(r)));
                const bool has_k = std::binary_search(s.indices.begin(), s.indices.end(), k);
                const bool has_j = std::binary_search(s.indices.begin(), s.indices.end(), j);
                if (has_k && has_j) ++hits;
            }
            return static_cast<double>(hits) / mc->draws;
        }
    }
    return 0.0;
}

} // namespace bosample
