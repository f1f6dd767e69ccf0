// Times the OpenMP kernels against their serial reference implementations
// and checks the results agree bit for bit.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>

#include "bosample/estimators.hpp"
#include "bosample/gp.hpp"
#include "bosample/reference.hpp"
#include "bosample/rng.hpp"

using namespace bosample;

namespace {

double seconds(const std::chrono::steady_clock::time_point& a,
               const std::chrono::steady_clock::time_point& b) {
    return std::chrono::duration<double>(b - a).count();
}

template <class F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, seconds(t0, t1));
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-28s serial %8.4fs  parallel %8.4fs  speedup %5.2fx  bitwise %s\n", name,
                serial, parallel, serial / parallel, identical ? "OK" : "MISMATCH");
}

} // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    Rng rng(20240);

    // Gram matrix, n x n kernel evaluations.
    {
        const int n = 1400, m = 16;
        Eigen::MatrixXd X(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) X(i, j) = rng.uniform();
        KernelConfig cfg;
        cfg.length_scale = 1.5;
        Eigen::MatrixXd Ks, Kp;
        const double ts = time_best_of(3, [&] { Ks = ref::gram_matrix(X, cfg); });
        const double tp = time_best_of(3, [&] { Kp = gram_matrix(X, cfg); });
        report("gram_matrix (n=1400)", ts, tp,
               std::memcmp(Ks.data(), Kp.data(), sizeof(double) * static_cast<std::size_t>(n) * n) == 0);
    }

    // Batch prediction: mean + std at many query points.
    {
        const int n = 300, m = 16, q = 20000;
        Dataset data;
        data.features.resize(n, m);
        data.responses.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) data.features(i, j) = rng.uniform();
            data.responses[i] = rng.normal();
        }
        const GpPosterior post = GpPosterior::fit(data, resolve_kernel_config(data));
        Eigen::MatrixXd Q(q, m);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < m; ++j) Q(i, j) = rng.uniform();
        Eigen::VectorXd ms, ss, mp, sp;
        const double ts = time_best_of(3, [&] { ref::predict_batch(post, Q, ms, ss); });
        const double tp = time_best_of(3, [&] { post.predict_batch(Q, mp, sp); });
        const bool same =
            std::memcmp(ms.data(), mp.data(), sizeof(double) * static_cast<std::size_t>(q)) == 0 &&
            std::memcmp(ss.data(), sp.data(), sizeof(double) * static_cast<std::size_t>(q)) == 0;
        report("predict_batch (q=20000)", ts, tp, same);
    }

    // SRS variance double sum over the full frame.
    {
        const int n = 4000;
        PopulationFrame frame;
        frame.features.resize(n, 1);
        frame.responses.resize(n);
        frame.predictions.resize(n);
        for (int i = 0; i < n; ++i) {
            frame.features(i, 0) = rng.uniform();
            frame.responses[i] = rng.normal(10.0, 2.0);
            frame.predictions[i] = frame.responses[i] - rng.normal(0.0, 0.5);
        }
        const SamplingDesign design = srs_design(n, n / 10, PiConvention::ClassicalNOverN);
        DesignVariance vs{}, vp{};
        const double ts = time_best_of(3, [&] { vs = ref::de_variance(frame, design); });
        const double tp = time_best_of(3, [&] { vp = de_variance(frame, design); });
        report("de_variance SRS (N=4000)", ts, tp, vs.value == vp.value);
    }

    return 0;
}
