#include "cnca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cnca/error.hpp"

namespace cnca {

namespace {

// Sorts `v` by key with a stable merge sort and returns the number of swaps
// (inversions) performed.
std::uint64_t merge_count(std::vector<std::size_t>& v, const std::vector<double>& key) {
    std::vector<std::size_t> buf(v.size());
    std::uint64_t swaps = 0;
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, v.size());
            const std::size_t hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (key[v[j]] < key[v[i]]) {
                    swaps += mid - i;
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
        }
        v.swap(buf);
    }
    return swaps;
}

// Sum of t(t-1)/2 over runs of equal keys in an already-sorted order.
template <class Eq>
std::uint64_t tied_pairs(const std::vector<std::size_t>& order, Eq equal) {
    std::uint64_t total = 0, run = 1;
    for (std::size_t i = 1; i <= order.size(); ++i) {
        if (i < order.size() && equal(order[i - 1], order[i])) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y, TauMode mode) {
    if (x.size() != y.size())
        throw ParameterError("kendall_tau: length mismatch " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    const std::size_t n = x.size();
    if (n < 2) throw ParameterError("kendall_tau: need at least 2 observations");

    std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return xs[a] < xs[b] || (xs[a] == xs[b] && ys[a] < ys[b]);
    });

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t n1 = tied_pairs(order, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
    const std::uint64_t n3 =
        tied_pairs(order, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b] && ys[a] == ys[b]; });
    const std::uint64_t swaps = merge_count(order, ys);
    const std::uint64_t n2 = tied_pairs(order, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

    // concordant - discordant = n0 - n1 - n2 + n3 - 2 * swaps
    const double s = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                     static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
    if (mode == TauMode::a) return s / static_cast<double>(n0);
    const double denom = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
    return denom == 0.0 ? 0.0 : s / denom;
}

std::vector<double> as_scores(std::span<const std::size_t> ranking) {
    return {ranking.begin(), ranking.end()};
}

namespace {

constexpr double kPowerTolerance = 1e-9;
constexpr int kMaxPowerIterations = 200000;

// Dominant eigenpair of the symmetric PSD matrix m (d x d, row-major).
// Iterates are kept orthogonal to `found`, the eigenvectors already deflated
// out, so rounding in the deflation cannot leak those directions back in.
std::pair<double, std::vector<double>> power_iterate(const std::vector<double>& m, std::size_t d,
                                                     const std::vector<std::vector<double>>& found) {
    std::vector<double> v(d), next(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + static_cast<double>(i) / static_cast<double>(d);
    auto normalize = [](std::vector<double>& u) {
        double s = 0;
        for (double a : u) s += a * a;
        s = std::sqrt(s);
        if (s > 0)
            for (double& a : u) a /= s;
        return s;
    };
    auto orthogonalize = [&](std::vector<double>& u) {
        for (const auto& f : found) {
            double dot = 0;
            for (std::size_t i = 0; i < d; ++i) dot += u[i] * f[i];
            for (std::size_t i = 0; i < d; ++i) u[i] -= dot * f[i];
        }
    };
    orthogonalize(v);
    normalize(v);
    double lambda = 0.0;
    for (int it = 0; it < kMaxPowerIterations; ++it) {
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < d; ++j) s += m[i * d + j] * v[j];
            next[i] = s;
        }
        orthogonalize(next);
        lambda = normalize(next);
        if (lambda == 0.0) return {0.0, v};
        double diff = 0;
        for (std::size_t i = 0; i < d; ++i) diff += (next[i] - v[i]) * (next[i] - v[i]);
        v.swap(next);
        if (std::sqrt(diff) < kPowerTolerance) break;
    }
    return {lambda, v};
}

}  // namespace

DenseMatrix pca_project_2d(const DenseMatrix& h) {
    const std::size_t n = h.rows, f = h.cols;
    if (n < 2 || f < 2) throw ParameterError("pca_project_2d needs at least 2 rows and 2 columns");
    if (h.data.size() != n * f) throw ParameterError("pca_project_2d: data length does not match shape");

    std::vector<double> centred(h.data);
    for (std::size_t c = 0; c < f; ++c) {
        double mean = 0;
        for (std::size_t r = 0; r < n; ++r) mean += centred[r * f + c];
        mean /= static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r) centred[r * f + c] -= mean;
    }

    // Work in the smaller space: Gram (n x n) or scatter (f x f).
    const bool gram = n <= f;
    const std::size_t d = gram ? n : f;
    std::vector<double> m(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double s = 0;
            if (gram)
                for (std::size_t c = 0; c < f; ++c) s += centred[i * f + c] * centred[j * f + c];
            else
                for (std::size_t r = 0; r < n; ++r) s += centred[r * f + i] * centred[r * f + j];
            m[i * d + j] = m[j * d + i] = s;
        }

    double scale = 0;
    for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, m[i * d + i]);

    DenseMatrix out{n, 2, std::vector<double>(n * 2, 0.0)};
    std::vector<std::vector<double>> found;
    for (int comp = 0; comp < 2; ++comp) {
        auto [lambda, v] = power_iterate(m, d, found);
        if (scale == 0.0 || lambda <= 1e-12 * scale) break;
        // Loadings in feature space.
        std::vector<double> loading(f, 0.0);
        if (gram) {
            for (std::size_t c = 0; c < f; ++c) {
                double s = 0;
                for (std::size_t r = 0; r < n; ++r) s += centred[r * f + c] * v[r];
                loading[c] = s / std::sqrt(lambda);
            }
        } else {
            loading = v;
        }
        auto first = std::find_if(loading.begin(), loading.end(), [](double a) { return std::abs(a) > 1e-12; });
        const double sign = (first != loading.end() && *first < 0) ? -1.0 : 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0;
            for (std::size_t c = 0; c < f; ++c) s += centred[r * f + c] * loading[c];
            out.data[r * 2 + static_cast<std::size_t>(comp)] = sign * s;
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m[i * d + j] -= lambda * v[i] * v[j];
        found.push_back(std::move(v));
    }
    return out;
}

}  // namespace cnca
