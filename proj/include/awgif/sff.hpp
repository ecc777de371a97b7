#pragma once

#include "awgif/detail_enhancement.hpp"
#include "awgif/guided_filter.hpp"
#include "awgif/image.hpp"

namespace awgif::sff {

struct SffParams {
    int fm_radius = 2;    ///< gray-level-variance window radius (5x5)
    int agg_radius = 2;   ///< focus-volume box aggregation radius, 0 disables it
    FilterParams filter;
    FilterKind filter_kind = FilterKind::awgif;
    double beta = 1.0;

    void validate() const;
};

// Gray-level variance focus measure.
ImageGrid glv_focus(const ImageGrid& frame, int fm_radius);

FocusVolume build_focus_volume(const ImageStack& stack, const SffParams& params);

FocusVolume aggregate_volume(const FocusVolume& volume, int agg_radius);

// Index of the best-focused slice per pixel; ties resolve to the lowest index.
DepthMap initial_depth(const FocusVolume& volume);

// Mean intensity along the focus axis.
ImageGrid guidance_image(const ImageStack& stack);

struct DepthEnhancement {
    DepthMap initial;
    DepthMap final_depth;
    ImageGrid guidance;
    Decomposition layers;   // over depth normalised to [0, 1]

    // Recombines the stored layers with another beta, in frame units.
    DepthMap with_beta(double beta) const;
};

/**
 * Full pipeline: focus volume, aggregation, argmax depth, mean-intensity
 * guidance, guided decomposition of the [0, 1]-normalised depth and
 * Z_f = Z_b + beta * a_bar * Z_d, rescaled back to frame indices.
 */
DepthEnhancement enhance_depth(const ImageStack& stack, const SffParams& params);

} // namespace awgif::sff
