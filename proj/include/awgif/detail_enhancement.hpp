#pragma once

#include "awgif/guided_filter.hpp"
#include "awgif/image.hpp"

#include <string_view>

namespace awgif {

/// Detail gain (alpha + beta * a_bar).
struct EnhancementParams {
    double alpha = 0.0;
    double beta = 1.0;

    void validate() const;
};

struct Decomposition {
    ImageGrid base;
    ImageGrid detail;   // input - base
    ImageGrid a_bar;
};

/// Splits `input` into the guided filter's base layer and the residual detail layer.
Decomposition decompose(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params,
                        FilterKind kind = FilterKind::awgif);

/// base + (alpha + beta * a_bar) * detail, unclamped.
ImageGrid enhance(const Decomposition& layers, const EnhancementParams& gains);

enum class EnhancementCase {
    smooth,     // (0, 0): edge-preserving smoothing
    enhance,    // (3, 0): uniform detail boost
    selective,  // (1, beta): boost where the local fit is steep
    hybrid,     // (0, beta): smooth flat areas, keep structure
};

EnhancementCase parse_enhancement_case(std::string_view name);

EnhancementParams case_preset(EnhancementCase which, double selective_beta = 1.0, double hybrid_beta = 1.0);
EnhancementParams case_preset(std::string_view name, double selective_beta = 1.0, double hybrid_beta = 1.0);

} // namespace awgif
