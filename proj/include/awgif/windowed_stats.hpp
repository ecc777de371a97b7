#pragma once

#include "awgif/image.hpp"

namespace awgif::stats {

/// Square (2r+1)x(2r+1) window centred on each pixel, clipped at the borders.
struct WindowSpec {
    int radius = 1;

    explicit WindowSpec(int r);
    int side() const noexcept { return 2 * radius + 1; }
};

// Plain window sums over the clipped window, O(U*V) regardless of radius.
ImageGrid box_sum(const ImageGrid& img, WindowSpec w);

// Number of in-bounds pixels of each clipped window.
ImageGrid window_count(int width, int height, WindowSpec w);

/**
 * Mean over each clipped window, normalised by the clipped pixel count.
 *
 * Sums are taken over values shifted by the first pixel, so a constant
 * image maps to itself exactly and large offsets do not eat precision.
 */
ImageGrid box_mean(const ImageGrid& img, WindowSpec w);

// Population variance E[x^2] - E[x]^2 per window, clamped at zero.
ImageGrid local_variance(const ImageGrid& img, WindowSpec w);

// E[ab] - E[a]E[b] per window. Symmetric in (a, b) bit for bit.
ImageGrid local_covariance(const ImageGrid& a, const ImageGrid& b, WindowSpec w);

} // namespace awgif::stats
