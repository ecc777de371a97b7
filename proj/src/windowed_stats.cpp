#include "awgif/windowed_stats.hpp"

#include "awgif/error.hpp"
#include "awgif/parallel.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace awgif::stats {

namespace {

// Running-sum box filter: row prefix sums, then prefix sums of the row
// results down each column. Every output is two prefix differences.
void box_sum_into(std::span<const double> in, int width, int height, int r, std::span<double> out) {
    const std::size_t W = static_cast<std::size_t>(width);
    std::vector<double> horiz(in.size());

    parallel_for(static_cast<std::size_t>(height), [&](std::size_t v0, std::size_t v1) {
        std::vector<double> prefix(W + 1);
        for (std::size_t v = v0; v < v1; ++v) {
            const double* src = in.data() + v * W;
            prefix[0] = 0.0;
            for (std::size_t u = 0; u < W; ++u) prefix[u + 1] = prefix[u] + src[u];
            double* dst = horiz.data() + v * W;
            for (int u = 0; u < width; ++u) {
                const int lo = std::max(0, u - r);
                const int hi = std::min(width - 1, u + r);
                dst[u] = prefix[hi + 1] - prefix[lo];
            }
        }
    });

    // column_prefix row j holds the sum of horiz rows [0, j).
    std::vector<double> column_prefix((static_cast<std::size_t>(height) + 1) * W);
    parallel_for(W, [&](std::size_t u0, std::size_t u1) {
        for (std::size_t u = u0; u < u1; ++u) column_prefix[u] = 0.0;
        for (int v = 0; v < height; ++v) {
            double* prev = column_prefix.data() + static_cast<std::size_t>(v) * W;
            double* next = prev + W;
            const double* src = horiz.data() + static_cast<std::size_t>(v) * W;
            for (std::size_t u = u0; u < u1; ++u) next[u] = prev[u] + src[u];
        }
    });

    parallel_for(static_cast<std::size_t>(height), [&](std::size_t v0, std::size_t v1) {
        for (std::size_t v = v0; v < v1; ++v) {
            const int lo = std::max(0, static_cast<int>(v) - r);
            const int hi = std::min(height - 1, static_cast<int>(v) + r);
            const double* top = column_prefix.data() + static_cast<std::size_t>(lo) * W;
            const double* bottom = column_prefix.data() + static_cast<std::size_t>(hi + 1) * W;
            double* dst = out.data() + v * W;
            for (std::size_t u = 0; u < W; ++u) dst[u] = bottom[u] - top[u];
        }
    });
}

std::vector<double> shifted(const ImageGrid& img, double shift) {
    std::vector<double> out(img.size());
    const auto src = img.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = src[i] - shift;
    return out;
}

} // namespace

WindowSpec::WindowSpec(int r) : radius(r) {
    if (r < 1) throw InvalidArgument("window radius must be >= 1, got " + std::to_string(r));
}

ImageGrid box_sum(const ImageGrid& img, WindowSpec w) {
    ImageGrid out(img.width(), img.height());
    box_sum_into(img.values(), img.width(), img.height(), w.radius, out.values());
    return out;
}

ImageGrid window_count(int width, int height, WindowSpec w) {
    ImageGrid out(width, height);
    for (int v = 0; v < height; ++v) {
        const int rows = std::min(height - 1, v + w.radius) - std::max(0, v - w.radius) + 1;
        for (int u = 0; u < width; ++u) {
            const int cols = std::min(width - 1, u + w.radius) - std::max(0, u - w.radius) + 1;
            out(u, v) = static_cast<double>(rows) * cols;
        }
    }
    return out;
}

ImageGrid box_mean(const ImageGrid& img, WindowSpec w) {
    const double shift = img[0];
    const auto centred = shifted(img, shift);
    ImageGrid out(img.width(), img.height());
    box_sum_into(centred, img.width(), img.height(), w.radius, out.values());
    const ImageGrid counts = window_count(img.width(), img.height(), w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = shift + out[i] / counts[i];
    return out;
}

ImageGrid local_covariance(const ImageGrid& a, const ImageGrid& b, WindowSpec w) {
    require_same_shape(a, b, "local_covariance");
    const int width = a.width();
    const int height = a.height();
    const auto ca = shifted(a, a[0]);
    const auto cb = shifted(b, b[0]);
    std::vector<double> product(ca.size());
    for (std::size_t i = 0; i < product.size(); ++i) product[i] = ca[i] * cb[i];

    std::vector<double> sum_a(ca.size()), sum_b(ca.size()), sum_ab(ca.size());
    box_sum_into(ca, width, height, w.radius, sum_a);
    box_sum_into(cb, width, height, w.radius, sum_b);
    box_sum_into(product, width, height, w.radius, sum_ab);

    const ImageGrid counts = window_count(width, height, w);
    ImageGrid out(width, height);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double n = counts[i];
        const double mean_a = sum_a[i] / n;
        const double mean_b = sum_b[i] / n;
        out[i] = sum_ab[i] / n - mean_a * mean_b;
    }
    return out;
}

ImageGrid local_variance(const ImageGrid& img, WindowSpec w) {
    ImageGrid out = local_covariance(img, img, w);
    for (double& x : out.values()) x = std::max(0.0, x);
    return out;
}

} // namespace awgif::stats
