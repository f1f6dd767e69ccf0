#include "bosample/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bosample/normal.hpp"

namespace bosample {

double mean_abs_diff(const Eigen::Ref<const Eigen::VectorXd>& true_y,
                     const Eigen::Ref<const Eigen::VectorXd>& est_y) {
    if (true_y.size() == 0 || est_y.size() == 0)
        throw std::invalid_argument("mean_abs_diff: empty input");
    if (true_y.size() != est_y.size())
        throw std::invalid_argument("mean_abs_diff: length mismatch");
    return std::abs(true_y.mean() - est_y.mean());
}

std::vector<double> equal_width_edges(double lo, double hi, int bins) {
    if (bins < 1) throw std::invalid_argument("equal_width_edges: need at least one bin");
    if (!(hi > lo)) hi = lo + 1.0; // constant data still gets a usable bin
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * static_cast<double>(b) / bins;
    return edges;
}

Histogram build_histogram(const Eigen::Ref<const Eigen::VectorXd>& values,
                          const std::vector<double>& edges, double smoothing) {
    if (edges.size() < 2) throw std::invalid_argument("build_histogram: need at least 2 edges");
    if (!std::is_sorted(edges.begin(), edges.end()))
        throw std::invalid_argument("build_histogram: edges must ascend");
    if (smoothing < 0.0) throw std::invalid_argument("build_histogram: smoothing must be >= 0");

    const int bins = static_cast<int>(edges.size()) - 1;
    std::vector<double> mass(static_cast<std::size_t>(bins), smoothing);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        auto it = std::upper_bound(edges.begin(), edges.end(), values[i]);
        int b = static_cast<int>(it - edges.begin()) - 1;
        b = std::clamp(b, 0, bins - 1); // clip out-of-range values into end bins
        mass[static_cast<std::size_t>(b)] += 1.0;
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (!(total > 0.0))
        throw std::invalid_argument("build_histogram: no mass (empty values and zero smoothing)");

    Histogram h;
    h.bin_edges = edges;
    h.probabilities.resize(mass.size());
    for (std::size_t b = 0; b < mass.size(); ++b) h.probabilities[b] = mass[b] / total;
    return h;
}

double kl_divergence(const Histogram& P, const Histogram& Q) {
    if (P.bin_edges != Q.bin_edges)
        throw std::invalid_argument("kl_divergence: histograms must share bin edges");
    double d = 0.0;
    for (std::size_t b = 0; b < P.probabilities.size(); ++b) {
        const double p = P.probabilities[b];
        if (p <= 0.0) continue;
        const double q = Q.probabilities[b];
        if (q <= 0.0)
            throw std::domain_error("kl_divergence: P has mass where Q is zero (smooth Q first)");
        d += p * std::log(p / q);
    }
    return std::max(d, 0.0);
}

namespace {

// Pairs with a > b; ties count one half.
double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0.0;
    for (double x : a)
        for (double y : b) {
            if (x > y)
                u += 1.0;
            else if (x == y)
                u += 0.5;
        }
    return u;
}

double exact_p_impl(const std::vector<double>& a, const std::vector<double>& b, double u_obs) {
    std::vector<double> pool = a;
    pool.insert(pool.end(), b.begin(), b.end());
    const int n = static_cast<int>(pool.size());
    const int na = static_cast<int>(a.size());

    // pairwise comparison table, ties scored one half
    std::vector<double> cmp(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = pool[static_cast<std::size_t>(i)];
            const double y = pool[static_cast<std::size_t>(j)];
            cmp[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(j)] = x > y ? 1.0 : (x == y ? 0.5 : 0.0);
        }

    long long total = 0;
    long long at_most = 0;
    std::vector<int> pick(static_cast<std::size_t>(na));
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<bool> in_a(static_cast<std::size_t>(n), false);
    // Enumerate all C(n, na) label assignments in lexicographic order.
    for (;;) {
        std::fill(in_a.begin(), in_a.end(), false);
        for (int i : pick) in_a[static_cast<std::size_t>(i)] = true;
        double u = 0.0;
        for (int i : pick)
            for (int j = 0; j < n; ++j)
                if (!in_a[static_cast<std::size_t>(j)])
                    u += cmp[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                             static_cast<std::size_t>(j)];
        ++total;
        if (u <= u_obs + 1e-9) ++at_most;

        int i = na - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - na + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < na; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return static_cast<double>(at_most) / static_cast<double>(total);
}

double approx_p_impl(const std::vector<double>& a, const std::vector<double>& b, double u_obs) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;

    std::vector<double> pool = a;
    pool.insert(pool.end(), b.begin(), b.end());
    std::sort(pool.begin(), pool.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < pool.size();) {
        std::size_t j = i;
        while (j < pool.size() && pool[j] == pool[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double var_u = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(var_u > 0.0)) return 1.0; // every value tied; no evidence either way
    const double z = (u_obs + 0.5 - na * nb / 2.0) / std::sqrt(var_u);
    return norm_cdf(z);
}

} // namespace

double mwu_exact_p(const std::vector<double>& a, const std::vector<double>& b, double u_obs) {
    return exact_p_impl(a, b, u_obs);
}

double mwu_normal_p(const std::vector<double>& a, const std::vector<double>& b, double u_obs) {
    return approx_p_impl(a, b, u_obs);
}

MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                         MwuAlternative) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty input");
    MwuResult r;
    r.u_statistic = u_statistic(a, b);
    r.exact = a.size() + b.size() <= 12;
    r.p_value = r.exact ? exact_p_impl(a, b, r.u_statistic) : approx_p_impl(a, b, r.u_statistic);
    r.p_value = std::clamp(r.p_value, 1e-300, 1.0);
    return r;
}

FiveNumber five_number_summary(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("five_number_summary: empty input");
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

} // namespace bosample
