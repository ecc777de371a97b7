#pragma once

#include "awgif/image.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace awgif::synth {

enum class SceneShape { cone, coswave, sinewave, flat, step };

SceneShape parse_shape(std::string_view name);
std::string_view to_string(SceneShape shape);

// Random engine behind textures and noise; recorded in generated metadata.
inline constexpr std::string_view kRngName = "mt19937_64";

struct SceneSpec {
    SceneShape shape = SceneShape::cone;
    int width = 64;
    int height = 64;
    int frames = 32;
    std::uint64_t seed = 1;
    double blur_gain = 0.8;        ///< blur sigma in pixels per frame of defocus
    double noise_variance = 0.0;   ///< additive Gaussian noise variance on [0, 1] intensities

    void validate() const;
};

// key=value text, one per line, keys matching the CLI flag names.
std::string to_config(const SceneSpec& spec);
SceneSpec scene_from_config(std::string_view text);

/**
 * Ground-truth depth in frame units:
 *   cone      (K-1) * (1 - r / r_max), apex at pixel (U/2, V/2), r_max the farthest corner
 *   coswave   (K-1) * (1 + cos(4 pi u / U)) / 2
 *   sinewave  (K-1) * (1 + sin(4 pi v / V)) / 2
 *   flat      (K-1) / 2
 *   step      0.25 (K-1) left of U/2, 0.75 (K-1) from there on
 */
DepthMap make_depth_surface(const SceneSpec& spec);

// I.i.d. uniform granular texture in [0.15, 0.85], seeded from spec.seed.
ImageGrid make_texture(const SceneSpec& spec);

// Separable Gaussian truncated at 3 sigma and renormalised over the clipped support.
ImageGrid gaussian_blur(const ImageGrid& img, double sigma);

/**
 * Renders the multi-focus stack. Frame k at pixel p shows the texture blurred
 * with sigma = blur_gain * |k - depth(p)| (no blur below 0.3), then Gaussian
 * noise of spec.noise_variance, clamped to [0, 1]. Blur is evaluated on a
 * 0.25-pixel grid of sigmas and interpolated linearly in between.
 */
ImageStack render_stack(const DepthMap& truth, const SceneSpec& spec);

} // namespace awgif::synth
