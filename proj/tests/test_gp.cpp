#include <doctest.h>

#include <cmath>
#include <cstring>

#include "bosample/errors.hpp"
#include "bosample/gp.hpp"
#include "bosample/rng.hpp"
#include "oracles.hpp"

using namespace bosample;

namespace {

Dataset random_dataset(int n, int m, Rng& rng, double y_scale = 1.0) {
    Dataset d;
    d.features.resize(n, m);
    d.responses.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) d.features(i, j) = rng.uniform(-2.0, 2.0);
        d.responses[i] = y_scale * rng.normal();
    }
    return d;
}

Eigen::RowVectorXd row1(double x) {
    Eigen::RowVectorXd r(1);
    r << x;
    return r;
}

} // namespace

TEST_SUITE("gp") {

TEST_CASE("kernel_eval basics") {
    KernelConfig cfg;
    cfg.length_scale = 1.0;

    Eigen::RowVectorXd a(3), b(3);
    a << 0.3, -1.2, 4.0;
    CHECK(kernel_eval(a, a, cfg) == 1.0);

    CHECK(kernel_eval(row1(0.0), row1(std::sqrt(2.0)), cfg) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-14));

    cfg.length_scale = 2.0;
    Eigen::RowVectorXd c(2), d(2);
    c << 1.0, 1.0;
    d << 0.0, 0.0;
    CHECK(kernel_eval(c, d, cfg) == doctest::Approx(0.7788007830714049).epsilon(1e-14));
    CHECK(kernel_eval(c, d, cfg) == kernel_eval(d, c, cfg));

    b << 1.0, 2.0, 3.0;
    Eigen::RowVectorXd short_vec(2);
    short_vec << 1.0, 2.0;
    CHECK_THROWS_AS(kernel_eval(a, short_vec, cfg), std::invalid_argument);
}

TEST_CASE("kernel_eval stays in (0, 1]") {
    Rng rng(7);
    KernelConfig cfg;
    for (int t = 0; t < 200; ++t) {
        cfg.length_scale = rng.uniform(0.5, 5.0);
        Eigen::RowVectorXd a(4), b(4);
        for (int j = 0; j < 4; ++j) {
            a[j] = rng.uniform(-3.0, 3.0);
            b[j] = rng.uniform(-3.0, 3.0);
        }
        const double v = kernel_eval(a, b, cfg);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("gram_matrix small cases") {
    KernelConfig cfg;
    cfg.length_scale = 1.0;

    Eigen::MatrixXd one(1, 1);
    one << 5.0;
    const Eigen::MatrixXd K1 = gram_matrix(one, cfg);
    CHECK(K1.rows() == 1);
    CHECK(K1(0, 0) == 1.0);

    Eigen::MatrixXd dup(2, 2);
    dup << 1.0, 2.0, 1.0, 2.0;
    const Eigen::MatrixXd K2 = gram_matrix(dup, cfg);
    CHECK(K2(0, 1) == 1.0);
    CHECK(K2(1, 0) == 1.0);

    Eigen::MatrixXd X(2, 1);
    X << 0.0, std::sqrt(2.0);
    const Eigen::MatrixXd K3 = gram_matrix(X, cfg);
    CHECK(K3(0, 1) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
    CHECK(K3(0, 0) == 1.0);
    CHECK(K3(1, 1) == 1.0);

    Eigen::MatrixXd bad(1, 1);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(gram_matrix(bad, cfg), std::invalid_argument);
}

TEST_CASE("gram_matrix symmetry and PSD on random instances") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform_int(19));
        const int m = 1 + static_cast<int>(rng.uniform_int(5));
        const Dataset d = random_dataset(n, m, rng);
        KernelConfig cfg;
        cfg.length_scale = rng.uniform(0.3, 3.0);
        const Eigen::MatrixXd K = gram_matrix(d.features, cfg);
        CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
        CHECK((K.diagonal().array() == 1.0).all());
    }
}

TEST_CASE("fit on a single point") {
    Dataset d;
    d.features = Eigen::MatrixXd::Constant(1, 1, 3.0);
    d.responses = Eigen::VectorXd::Constant(1, 2.0);
    KernelConfig cfg;
    cfg.length_scale = 1.0;
    cfg.noise_variance = 1.0;
    const GpPosterior post = GpPosterior::fit(d, cfg);
    CHECK(post.alpha()[0] == doctest::Approx(1.0).epsilon(1e-15)); // (1+1) a = 2

    const Prediction p = post.predict(row1(3.0));
    CHECK(p.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.std_dev * p.std_dev == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("fit rejects bad input") {
    KernelConfig cfg;
    Dataset empty;
    empty.features.resize(0, 2);
    empty.responses.resize(0);
    CHECK_THROWS_AS(GpPosterior::fit(empty, cfg), std::invalid_argument);

    Dataset mismatched;
    mismatched.features = Eigen::MatrixXd::Zero(3, 2);
    mismatched.responses = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(GpPosterior::fit(mismatched, cfg), std::invalid_argument);

    KernelConfig bad;
    bad.length_scale = -1.0;
    Dataset ok;
    ok.features = Eigen::MatrixXd::Zero(2, 1);
    ok.responses = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(GpPosterior::fit(ok, bad), std::invalid_argument);
}

TEST_CASE("huge noise shrinks predictions toward zero") {
    Rng rng(23);
    const Dataset d = random_dataset(12, 2, rng, 5.0);
    KernelConfig cfg;
    cfg.length_scale = 1.0;
    cfg.noise_variance = 1e6;
    const GpPosterior post = GpPosterior::fit(d, cfg);
    for (int i = 0; i < 12; ++i)
        CHECK(std::abs(post.predict_mean(d.features.row(i))) < 1e-3);
}

TEST_CASE("duplicate training points succeed via jitter") {
    Dataset d;
    d.features.resize(4, 2);
    d.features << 1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 3.0, 4.0;
    d.responses.resize(4);
    d.responses << 5.0, 5.0, 5.0, 1.0;
    KernelConfig cfg;
    cfg.length_scale = 1.0;
    cfg.noise_variance = 1e-300; // rounds away against the unit diagonal
    const GpPosterior post = GpPosterior::fit(d, cfg);
    CHECK(post.used_jitter() > 0.0);
    CHECK(post.used_jitter() <= 1e-3);
    // consistent responses on the duplicates keep the fit sensible
    CHECK(post.predict_mean(d.features.row(0)) == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("far query recovers the prior") {
    Rng rng(31);
    const Dataset d = random_dataset(8, 2, rng);
    KernelConfig cfg;
    cfg.length_scale = 0.5;
    cfg.noise_variance = 0.3;
    const GpPosterior post = GpPosterior::fit(d, cfg);
    Eigen::RowVectorXd far(2);
    far << 1e6, -1e6;
    const Prediction p = post.predict(far);
    CHECK(p.mean == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(p.std_dev * p.std_dev == doctest::Approx(cfg.noise_variance + 1.0).epsilon(1e-12));
}

TEST_CASE("predict matches the explicit-inverse oracle") {
    Rng rng(101);
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform_int(9));
        const int m = 1 + static_cast<int>(rng.uniform_int(5));
        const Dataset d = random_dataset(n, m, rng);
        KernelConfig cfg;
        cfg.length_scale = rng.uniform(0.5, 2.5);
        cfg.noise_variance = rng.uniform(0.05, 1.0);
        const GpPosterior post = GpPosterior::fit(d, cfg);
        for (int q = 0; q < 4; ++q) {
            Eigen::RowVectorXd query(m);
            for (int j = 0; j < m; ++j) query[j] = rng.uniform(-2.5, 2.5);
            const Prediction got = post.predict(query);
            const Prediction want = oracle::dense_gp_predict(d, cfg, query);
            CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-8));
            CHECK(got.std_dev == doctest::Approx(want.std_dev).epsilon(1e-8));
            CHECK(got.std_dev * got.std_dev >= cfg.noise_variance - 1e-8);
        }
    }
}

TEST_CASE("batch prediction at training inputs reproduces the dense solve") {
    Rng rng(55);
    const int n = 9;
    const Dataset d = random_dataset(n, 3, rng);
    KernelConfig cfg;
    cfg.length_scale = 1.2;
    cfg.noise_variance = 0.2;
    const GpPosterior post = GpPosterior::fit(d, cfg);
    const Eigen::VectorXd means = post.predict_mean_batch(d.features);

    const Standardizer std = Standardizer::fit(d.features);
    const Eigen::MatrixXd Z = std.apply(d.features);
    Eigen::MatrixXd A = gram_matrix(Z, cfg);
    A.diagonal().array() += cfg.noise_variance;
    const Eigen::VectorXd want = gram_matrix(Z, cfg) * A.inverse() * d.responses;
    for (int i = 0; i < n; ++i) CHECK(means[i] == doctest::Approx(want[i]).epsilon(1e-8));
}

TEST_CASE("predictive variance never drops below the noise floor") {
    Rng rng(77);
    for (int t = 0; t < 10; ++t) {
        const Dataset d = random_dataset(15, 2, rng);
        KernelConfig cfg;
        cfg.length_scale = rng.uniform(0.2, 4.0);
        cfg.noise_variance = rng.uniform(0.01, 0.5);
        const GpPosterior post = GpPosterior::fit(d, cfg);
        for (int q = 0; q < 20; ++q) {
            Eigen::RowVectorXd query(2);
            query << rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0);
            const Prediction p = post.predict(query);
            CHECK(p.std_dev * p.std_dev >= cfg.noise_variance - 1e-8);
        }
    }
}

TEST_CASE("longer length scales flatten predictions") {
    Rng rng(99);
    const Dataset d = random_dataset(10, 2, rng);
    Eigen::RowVectorXd q1(2), q2(2);
    q1 << -1.0, 0.5;
    q2 << 1.5, -0.5;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double l : {1.0, 10.0, 100.0}) {
        KernelConfig cfg;
        cfg.length_scale = l;
        cfg.noise_variance = 0.1;
        const GpPosterior post = GpPosterior::fit(d, cfg);
        const double gap = std::abs(post.predict_mean(q1) - post.predict_mean(q2));
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("fit and predict are deterministic") {
    Rng rng(123);
    const Dataset d = random_dataset(20, 4, rng);
    const KernelConfig cfg = resolve_kernel_config(d);
    const GpPosterior a = GpPosterior::fit(d, cfg);
    const GpPosterior b = GpPosterior::fit(d, cfg);
    CHECK(std::memcmp(a.alpha().data(), b.alpha().data(),
                      sizeof(double) * static_cast<std::size_t>(a.alpha().size())) == 0);
    Eigen::RowVectorXd q(4);
    q << 0.1, -0.2, 0.3, -0.4;
    const Prediction pa = a.predict(q);
    const Prediction pb = b.predict(q);
    CHECK(pa.mean == pb.mean);
    CHECK(pa.std_dev == pb.std_dev);
}

TEST_CASE("kernel defaults: median heuristic and response variance") {
    Dataset d;
    d.features.resize(3, 1);
    d.features << 0.0, 1.0, 10.0;
    d.responses.resize(3);
    d.responses << 0.0, 2.0, 4.0;

    const KernelConfig cfg = resolve_kernel_config(d);
    // standardized pairwise distances have a well-defined median
    const Standardizer std = Standardizer::fit(d.features);
    const Eigen::MatrixXd Z = std.apply(d.features);
    std::vector<double> dist = {(Z.row(0) - Z.row(1)).norm(), (Z.row(0) - Z.row(2)).norm(),
                                (Z.row(1) - Z.row(2)).norm()};
    std::sort(dist.begin(), dist.end());
    CHECK(cfg.length_scale == doctest::Approx(dist[1]).epsilon(1e-12));

    const double var = (d.responses.array() - d.responses.mean()).square().sum() / 3.0;
    CHECK(cfg.noise_variance == doctest::Approx(0.1 * var).epsilon(1e-12));

    KernelOverrides o;
    o.length_scale = 9.0;
    o.noise_variance = 0.5;
    const KernelConfig over = resolve_kernel_config(d, o);
    CHECK(over.length_scale == 9.0);
    CHECK(over.noise_variance == 0.5);

    Dataset flat = d;
    flat.responses.setZero();
    CHECK(resolve_kernel_config(flat).noise_variance == doctest::Approx(1e-8));
}

TEST_CASE("prediction dimension mismatch throws") {
    Rng rng(5);
    const Dataset d = random_dataset(5, 3, rng);
    const GpPosterior post = GpPosterior::fit(d, resolve_kernel_config(d));
    Eigen::RowVectorXd wrong(2);
    wrong << 0.0, 0.0;
    CHECK_THROWS_AS(post.predict(wrong), std::invalid_argument);
}

} // TEST_SUITE
