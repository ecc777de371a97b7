#pragma once

#include "awgif/image.hpp"
#include "awgif/windowed_stats.hpp"

#include <string>
#include <string_view>

namespace awgif {

/**
 * Parameters shared by the guided filters. All intensities live on the
 * [0, 1] scale, so epsilon and eta are in [0, 1]^2 units.
 */
struct FilterParams {
    int zeta = 2;                                  ///< window radius
    double lambda0 = 100.0;                        ///< regularisation base
    double epsilon = 1.0 / (255.0 * 255.0);        ///< edge-aware constant (1 in 8-bit units)
    double eta = 1.0 / (200.0 * 200.0);            ///< aggregation constant

    // lambda0 may be 0 (unregularised fit); epsilon and eta must be positive.
    void validate() const;
    stats::WindowSpec window() const { return stats::WindowSpec(zeta); }
};

/// Per-window linear model Z ~ a*G + b.
struct CoefficientField {
    ImageGrid a;
    ImageGrid b;
};

struct FilterOutput {
    ImageGrid base;   ///< a_bar * G + b_bar
    ImageGrid a_bar;
};

enum class FilterKind { awgif, gif, wgif };

FilterKind parse_filter_kind(std::string_view name);
std::string_view to_string(FilterKind kind);

// Denominators below this fall back to a = 0, b = window mean of Z.
inline constexpr double kDegenerateDenominator = 1e-12;

/// Per-pixel edge-aware weighting from 3x3 local variances of the guide:
/// (var(p') + eps) * mean_p 1 / (var(p) + eps).
ImageGrid edge_aware_weight(const ImageGrid& guide, double epsilon);

/// lambda0 * sqrt(mean of the guide's local variances over radius zeta).
double adaptive_lambda(const ImageGrid& guide, int zeta, double lambda0);

/**
 * Weighted ridge fit of Z against G in every window:
 *   a = gamma * cov(Z, G) / (gamma * var(G) + lambda),  b = mean(Z) - a * mean(G).
 */
CoefficientField solve_coefficients(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params,
                                    const ImageGrid& gamma, double lambda);

// The G == Z special case with the image's own edge weighting and adaptive lambda.
CoefficientField self_guided_coefficients(const ImageGrid& input, const FilterParams& params);

/// exp(-mean squared residual of the window's fit / eta) + 0.001.
ImageGrid aggregation_weights(const CoefficientField& coeff, const ImageGrid& input, const ImageGrid& guide,
                              const FilterParams& params);

/// W-weighted clipped-window averages of a and b.
CoefficientField aggregate_coefficients(const CoefficientField& coeff, const ImageGrid& weights,
                                        stats::WindowSpec window);

/// Adaptive weighted guided filter: edge-aware weighting, adaptive lambda,
/// residual-weighted aggregation of the local coefficients.
FilterOutput awgif_filter(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params);

/// Classic guided filter: gamma = 1, lambda = lambda0, box-averaged coefficients.
FilterOutput gif_filter(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params);

/// Weighted guided filter: edge-aware gamma, lambda = lambda0, box-averaged coefficients.
FilterOutput wgif_filter(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params);

FilterOutput apply_filter(FilterKind kind, const ImageGrid& input, const ImageGrid& guide,
                          const FilterParams& params);

} // namespace awgif
