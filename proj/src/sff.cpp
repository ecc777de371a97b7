#include "awgif/sff.hpp"

#include "awgif/error.hpp"
#include "awgif/windowed_stats.hpp"

#include <string>
#include <vector>

namespace awgif::sff {

void SffParams::validate() const {
    if (fm_radius < 1) throw InvalidArgument("fm_radius must be >= 1");
    if (agg_radius < 0) throw InvalidArgument("agg_radius must be >= 0");
    if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
    filter.validate();
}

ImageGrid glv_focus(const ImageGrid& frame, int fm_radius) {
    return stats::local_variance(frame, stats::WindowSpec(fm_radius));
}

FocusVolume build_focus_volume(const ImageStack& stack, const SffParams& params) {
    params.validate();
    std::vector<ImageGrid> slices;
    slices.reserve(stack.frame_count());
    for (const auto& frame : stack) slices.push_back(glv_focus(frame, params.fm_radius));
    return FocusVolume(std::move(slices));
}

FocusVolume aggregate_volume(const FocusVolume& volume, int agg_radius) {
    if (agg_radius < 0) throw InvalidArgument("agg_radius must be >= 0");
    if (agg_radius == 0) return volume;
    const stats::WindowSpec w(agg_radius);
    std::vector<ImageGrid> slices;
    slices.reserve(volume.slice_count());
    for (const auto& s : volume.slices()) {
        ImageGrid smoothed = stats::box_mean(s, w);
        // Rounding in the shifted mean can dip a hair below zero next to zero-variance pixels.
        for (double& x : smoothed.values()) x = x < 0.0 ? 0.0 : x;
        slices.push_back(std::move(smoothed));
    }
    return FocusVolume(std::move(slices));
}

DepthMap initial_depth(const FocusVolume& volume) {
    ImageGrid depth(volume.width(), volume.height());
    const int slices = volume.slice_count();
    for (std::size_t i = 0; i < depth.size(); ++i) {
        int best = 0;
        double best_score = volume[0][i];
        for (int k = 1; k < slices; ++k) {
            if (volume[k][i] > best_score) {
                best_score = volume[k][i];
                best = k;
            }
        }
        depth[i] = best;
    }
    return DepthMap(std::move(depth), slices);
}

ImageGrid guidance_image(const ImageStack& stack) {
    ImageGrid out(stack.width(), stack.height());
    const double frames = stack.frame_count();
    for (std::size_t i = 0; i < out.size(); ++i) {
        double sum = 0.0;
        for (const auto& frame : stack) sum += frame[i];
        out[i] = sum / frames;
    }
    return out;
}

DepthMap DepthEnhancement::with_beta(double beta) const {
    const ImageGrid unit = enhance(layers, EnhancementParams{0.0, beta});
    return DepthMap::from_normalized(unit, initial.frame_count());
}

DepthEnhancement enhance_depth(const ImageStack& stack, const SffParams& params) {
    params.validate();
    const FocusVolume volume = aggregate_volume(build_focus_volume(stack, params), params.agg_radius);
    DepthMap initial = initial_depth(volume);
    ImageGrid guidance = guidance_image(stack);
    Decomposition layers = decompose(initial.normalized(), guidance, params.filter, params.filter_kind);
    DepthEnhancement result{std::move(initial), DepthMap(ImageGrid(1, 1), 2), std::move(guidance),
                            std::move(layers)};
    result.final_depth = result.with_beta(params.beta);
    return result;
}

} // namespace awgif::sff
