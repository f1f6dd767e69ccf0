#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "bosample/design.hpp"
#include "bosample/errors.hpp"
#include "bosample/rng.hpp"
#include "oracles.hpp"

using namespace bosample;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

} // namespace

TEST_SUITE("design") {

TEST_CASE("min-max normalization with clamped extremes") {
    const SamplingDesign d =
        minmax_design(vec({1.0, 2.0, 3.0}), 0.01, SamplingScheme::Poisson, std::nullopt);
    CHECK(d.pi[0] == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(d.pi[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.pi[2] == doctest::Approx(0.99).epsilon(1e-15));
}

TEST_CASE("equal scores degenerate to one half") {
    const SamplingDesign d =
        minmax_design(vec({3.0, 3.0, 3.0}), 0.01, SamplingScheme::Poisson, std::nullopt);
    for (double p : d.pi) CHECK(p == 0.5);
}

TEST_CASE("tied minima clamp together") {
    const SamplingDesign d =
        minmax_design(vec({1.0, 1.0, 5.0}), 0.1, SamplingScheme::Poisson, std::nullopt);
    CHECK(d.pi[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(d.pi[1] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(d.pi[2] == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("min-max rejects bad input") {
    CHECK_THROWS_AS(minmax_design(vec({1.0}), 0.01, SamplingScheme::Poisson, std::nullopt),
                    std::invalid_argument);
    CHECK_THROWS_AS(minmax_design(vec({1.0, -2.0}), 0.01, SamplingScheme::Poisson, std::nullopt),
                    std::invalid_argument);
    CHECK_THROWS_AS(minmax_design(vec({1.0, 2.0}), 0.6, SamplingScheme::Poisson, std::nullopt),
                    std::invalid_argument);
    CHECK_THROWS_AS(minmax_design(vec({1.0, 2.0}), 0.0, SamplingScheme::Poisson, std::nullopt),
                    std::invalid_argument);
}

TEST_CASE("pi is nondecreasing in score and affine invariant") {
    Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform_int(30));
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) s[i] = rng.uniform(0.5, 10.0);
        const SamplingDesign d = minmax_design(s, 0.01, SamplingScheme::Poisson, std::nullopt);
        for (int i = 0; i < n; ++i) {
            CHECK(d.pi[static_cast<std::size_t>(i)] > 0.0);
            CHECK(d.pi[static_cast<std::size_t>(i)] < 1.0);
            for (int j = 0; j < n; ++j)
                if (s[i] < s[j])
                    CHECK(d.pi[static_cast<std::size_t>(i)] <=
                          d.pi[static_cast<std::size_t>(j)]);
        }
        Eigen::Index argmax = 0;
        s.maxCoeff(&argmax);
        CHECK(d.pi[static_cast<std::size_t>(argmax)] ==
              *std::max_element(d.pi.begin(), d.pi.end()));

        const double a = rng.uniform(0.5, 3.0);
        const double b = rng.uniform(0.0, 5.0);
        const SamplingDesign shifted =
            minmax_design((a * s.array() + b).matrix(), 0.01, SamplingScheme::Poisson, std::nullopt);
        for (int i = 0; i < n; ++i)
            CHECK(shifted.pi[static_cast<std::size_t>(i)] ==
                  doctest::Approx(d.pi[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
}

TEST_CASE("srs designs under both pi conventions") {
    const SamplingDesign classical = srs_design(4, 2, PiConvention::ClassicalNOverN);
    for (double p : classical.pi) CHECK(p == 0.5);

    const SamplingDesign paper = srs_design(1920, 50, PiConvention::Paper1OverN);
    CHECK(paper.pi.size() == 1920);
    for (double p : paper.pi) CHECK(p == doctest::Approx(1.0 / 1920.0).epsilon(1e-15));

    CHECK(joint_inclusion(classical, 0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK_THROWS_AS(srs_design(4, 4, PiConvention::ClassicalNOverN), std::invalid_argument);
    CHECK_THROWS_AS(srs_design(4, 0, PiConvention::ClassicalNOverN), std::invalid_argument);
}

TEST_CASE("srs joint inclusion matches exhaustive enumeration") {
    // all 6 two-subsets of 4 units: each pair co-occurs in exactly one subset
    const auto design = oracle::enumerate_srs(4, 2);
    double co = 0.0;
    for (const auto& [s, p] : design)
        if (std::count(s.begin(), s.end(), 0) && std::count(s.begin(), s.end(), 1)) co += p;
    CHECK(co == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    const SamplingDesign d = srs_design(4, 2, PiConvention::ClassicalNOverN);
    CHECK(joint_inclusion(d, 0, 1) == doctest::Approx(co).epsilon(1e-12));
}

TEST_CASE("poisson draw honors extreme inclusion probabilities") {
    SamplingDesign d;
    d.scheme = SamplingScheme::Poisson;
    const double eps = 1e-6;
    d.pi = {1.0 - eps, eps, eps};
    int hits0 = 0;
    const int draws = 10000;
    for (int r = 0; r < draws; ++r) {
        const SampleDraw s = draw(d, derive_seed(500, static_cast<std::uint64_t>(r)));
        if (std::binary_search(s.indices.begin(), s.indices.end(), 0)) ++hits0;
    }
    const double freq = static_cast<double>(hits0) / draws;
    const double band = 3.0 * std::sqrt((1.0 - eps) * eps / draws);
    CHECK(std::abs(freq - (1.0 - eps)) <= band + 1e-12);
}

TEST_CASE("poisson realized size concentrates on the pi sum") {
    SamplingDesign d;
    d.scheme = SamplingScheme::Poisson;
    d.pi.assign(10, 0.5);
    double total = 0.0;
    const int draws = 10000;
    for (int r = 0; r < draws; ++r)
        total += draw(d, derive_seed(600, static_cast<std::uint64_t>(r))).realized_size;
    const double mean_size = total / draws;
    // sum of 10 Bernoulli(1/2): sd = sqrt(2.5), se of the mean over draws
    const double band = 3.0 * std::sqrt(2.5 / draws);
    CHECK(std::abs(mean_size - 5.0) <= band);
}

TEST_CASE("srs draw visits all subsets uniformly") {
    const SamplingDesign d = srs_design(4, 2, PiConvention::ClassicalNOverN);
    std::map<std::vector<int>, int> counts;
    const int draws = 100000;
    for (int r = 0; r < draws; ++r)
        counts[draw(d, derive_seed(700, static_cast<std::uint64_t>(r))).indices]++;
    CHECK(counts.size() == 6);
    const double band = 3.0 * std::sqrt((1.0 / 6.0) * (5.0 / 6.0) / draws);
    for (const auto& [subset, count] : counts) {
        CHECK(subset.size() == 2);
        CHECK(std::abs(static_cast<double>(count) / draws - 1.0 / 6.0) <= band);
    }
}

TEST_CASE("weighted fixed-size draw selects exactly n distinct units") {
    SamplingDesign d;
    d.scheme = SamplingScheme::FixedSizeWeighted;
    d.pi = {0.9, 0.1, 0.5, 0.2, 0.7};
    d.nominal_sample_size = 3;
    for (int r = 0; r < 50; ++r) {
        const SampleDraw s = draw(d, derive_seed(800, static_cast<std::uint64_t>(r)));
        CHECK(s.realized_size == 3);
        CHECK(std::adjacent_find(s.indices.begin(), s.indices.end()) == s.indices.end());
        CHECK(std::is_sorted(s.indices.begin(), s.indices.end()));
    }
    SamplingDesign missing_n = d;
    missing_n.nominal_sample_size.reset();
    CHECK_THROWS_AS(draw(missing_n, 1), std::invalid_argument);
}

TEST_CASE("weighted fixed-size joint inclusion matches the exact draw tree") {
    SamplingDesign d;
    d.scheme = SamplingScheme::FixedSizeWeighted;
    d.pi = {0.25, 0.25, 0.5}; // proportional to 1, 1, 2
    d.nominal_sample_size = 2;

    const double exact01 = oracle::exact_fsw_joint({1.0, 1.0, 2.0}, 2, 0, 1);
    const double exact02 = oracle::exact_fsw_joint({1.0, 1.0, 2.0}, 2, 0, 2);
    CHECK(exact01 == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(exact02 == doctest::Approx(5.0 / 12.0).epsilon(1e-12));

    const int budget = 20000;
    const double mc01 = joint_inclusion(d, 0, 1, JointInclusionBudget{budget, 4321});
    const double mc02 = joint_inclusion(d, 0, 2, JointInclusionBudget{budget, 4321});
    CHECK(std::abs(mc01 - exact01) <= 3.0 * std::sqrt(exact01 * (1 - exact01) / budget));
    CHECK(std::abs(mc02 - exact02) <= 3.0 * std::sqrt(exact02 * (1 - exact02) / budget));

    CHECK_THROWS_AS(joint_inclusion(d, 0, 1), UnsupportedSchemeError);
}

TEST_CASE("poisson joint inclusion is the product") {
    SamplingDesign d;
    d.scheme = SamplingScheme::Poisson;
    d.pi = {0.2, 0.5};
    CHECK(joint_inclusion(d, 0, 1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(joint_inclusion(d, 0, 0), std::invalid_argument);
}

TEST_CASE("draws are deterministic in the seed") {
    const SamplingDesign d = srs_design(100, 10, PiConvention::ClassicalNOverN);
    const SampleDraw a = draw(d, 37);
    const SampleDraw b = draw(d, 37);
    CHECK(a.indices == b.indices);
    CHECK(a.pi_used == b.pi_used);
    const SampleDraw c = draw(d, 38);
    CHECK(a.indices != c.indices);
}

} // TEST_SUITE
