#include "awgif/detail_enhancement.hpp"

#include "awgif/error.hpp"

#include <cmath>
#include <string>

namespace awgif {

void EnhancementParams::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be >= 0");
}

Decomposition decompose(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params,
                        FilterKind kind) {
    FilterOutput filtered = apply_filter(kind, input, guide, params);
    ImageGrid detail(input.width(), input.height());
    for (std::size_t i = 0; i < input.size(); ++i) detail[i] = input[i] - filtered.base[i];
    return {std::move(filtered.base), std::move(detail), std::move(filtered.a_bar)};
}

ImageGrid enhance(const Decomposition& layers, const EnhancementParams& gains) {
    gains.validate();
    require_same_shape(layers.base, layers.detail, "enhance");
    require_same_shape(layers.base, layers.a_bar, "enhance");
    ImageGrid out(layers.base.width(), layers.base.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = layers.base[i] + (gains.alpha + gains.beta * layers.a_bar[i]) * layers.detail[i];
    }
    return out;
}

EnhancementCase parse_enhancement_case(std::string_view name) {
    if (name == "smooth") return EnhancementCase::smooth;
    if (name == "enhance") return EnhancementCase::enhance;
    if (name == "selective") return EnhancementCase::selective;
    if (name == "hybrid") return EnhancementCase::hybrid;
    throw InvalidArgument("unknown enhancement case: " + std::string(name));
}

EnhancementParams case_preset(EnhancementCase which, double selective_beta, double hybrid_beta) {
    switch (which) {
    case EnhancementCase::smooth: return {0.0, 0.0};
    case EnhancementCase::enhance: return {3.0, 0.0};
    case EnhancementCase::selective: return {1.0, selective_beta};
    case EnhancementCase::hybrid: return {0.0, hybrid_beta};
    }
    throw InvalidArgument("unknown enhancement case");
}

EnhancementParams case_preset(std::string_view name, double selective_beta, double hybrid_beta) {
    return case_preset(parse_enhancement_case(name), selective_beta, hybrid_beta);
}

} // namespace awgif
