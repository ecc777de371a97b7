#include "awgif/guided_filter.hpp"

#include "awgif/error.hpp"

#include <cmath>

namespace awgif {

namespace {

struct LocalMoments {
    ImageGrid mean_input;
    ImageGrid mean_guide;
    ImageGrid var_guide;
    ImageGrid cov;
};

LocalMoments local_moments(const ImageGrid& input, const ImageGrid& guide, stats::WindowSpec w) {
    return {stats::box_mean(input, w), stats::box_mean(guide, w), stats::local_variance(guide, w),
            stats::local_covariance(input, guide, w)};
}

CoefficientField solve_from_moments(const LocalMoments& m, const ImageGrid* gamma, double lambda) {
    CoefficientField out{ImageGrid(m.mean_input.width(), m.mean_input.height()),
                         ImageGrid(m.mean_input.width(), m.mean_input.height())};
    for (std::size_t i = 0; i < out.a.size(); ++i) {
        const double g = gamma ? (*gamma)[i] : 1.0;
        const double den = g * m.var_guide[i] + lambda;
        if (den < kDegenerateDenominator) {
            out.a[i] = 0.0;
            out.b[i] = m.mean_input[i];
        } else {
            out.a[i] = g * m.cov[i] / den;
            out.b[i] = m.mean_input[i] - out.a[i] * m.mean_guide[i];
        }
    }
    return out;
}

ImageGrid weights_from_moments(const CoefficientField& coeff, const LocalMoments& m, const ImageGrid& var_input,
                               double eta) {
    ImageGrid out(coeff.a.width(), coeff.a.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double a = coeff.a[i];
        const double offset = a * m.mean_guide[i] + coeff.b[i] - m.mean_input[i];
        double msr = a * a * m.var_guide[i] - 2.0 * a * m.cov[i] + var_input[i] + offset * offset;
        if (msr < 0.0) msr = 0.0;
        out[i] = std::exp(-msr / eta) + 0.001;
    }
    return out;
}

ImageGrid compose_base(const CoefficientField& mean_coeff, const ImageGrid& guide) {
    ImageGrid base(guide.width(), guide.height());
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = mean_coeff.a[i] * guide[i] + mean_coeff.b[i];
    return base;
}

// Box-averaged coefficients shared by the GIF and WGIF baselines.
FilterOutput box_averaged_filter(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params,
                                 const ImageGrid* gamma) {
    const auto w = params.window();
    const auto coeff = solve_from_moments(local_moments(input, guide, w), gamma, params.lambda0);
    CoefficientField mean_coeff{stats::box_mean(coeff.a, w), stats::box_mean(coeff.b, w)};
    ImageGrid base = compose_base(mean_coeff, guide);
    return {std::move(base), std::move(mean_coeff.a)};
}

void check_inputs(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params, const char* what) {
    require_same_shape(input, guide, what);
    params.validate();
}

} // namespace

void FilterParams::validate() const {
    if (zeta < 1) throw InvalidArgument("zeta must be >= 1");
    if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) throw InvalidArgument("lambda0 must be >= 0");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
    if (!(eta > 0.0)) throw InvalidArgument("eta must be > 0");
}

FilterKind parse_filter_kind(std::string_view name) {
    if (name == "awgif") return FilterKind::awgif;
    if (name == "gif") return FilterKind::gif;
    if (name == "wgif") return FilterKind::wgif;
    throw InvalidArgument("unsupported filter: " + std::string(name));
}

std::string_view to_string(FilterKind kind) {
    switch (kind) {
    case FilterKind::awgif: return "awgif";
    case FilterKind::gif: return "gif";
    case FilterKind::wgif: return "wgif";
    }
    return "unknown";
}

ImageGrid edge_aware_weight(const ImageGrid& guide, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
    ImageGrid var = stats::local_variance(guide, stats::WindowSpec(1));
    double inverse_sum = 0.0;
    for (double x : var.values()) inverse_sum += 1.0 / (x + epsilon);
    const double mean_inverse = inverse_sum / static_cast<double>(var.size());
    for (double& x : var.values()) x = (x + epsilon) * mean_inverse;
    return var;
}

double adaptive_lambda(const ImageGrid& guide, int zeta, double lambda0) {
    const ImageGrid var = stats::local_variance(guide, stats::WindowSpec(zeta));
    double sum = 0.0;
    for (double x : var.values()) sum += x;
    return lambda0 * std::sqrt(sum / static_cast<double>(var.size()));
}

CoefficientField solve_coefficients(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params,
                                    const ImageGrid& gamma, double lambda) {
    check_inputs(input, guide, params, "solve_coefficients");
    require_same_shape(input, gamma, "solve_coefficients (gamma)");
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    return solve_from_moments(local_moments(input, guide, params.window()), &gamma, lambda);
}

CoefficientField self_guided_coefficients(const ImageGrid& input, const FilterParams& params) {
    params.validate();
    const auto w = params.window();
    const ImageGrid gamma = edge_aware_weight(input, params.epsilon);
    const double lambda = adaptive_lambda(input, params.zeta, params.lambda0);
    const ImageGrid var = stats::local_variance(input, w);
    const ImageGrid mean = stats::box_mean(input, w);

    CoefficientField out{ImageGrid(input.width(), input.height()), ImageGrid(input.width(), input.height())};
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double fit = gamma[i] * var[i];
        const double den = fit + lambda;
        if (den < kDegenerateDenominator) {
            out.a[i] = 0.0;
            out.b[i] = mean[i];
        } else {
            out.a[i] = fit / den;
            out.b[i] = mean[i] - out.a[i] * mean[i]; // (1 - a) * mean
        }
    }
    return out;
}

ImageGrid aggregation_weights(const CoefficientField& coeff, const ImageGrid& input, const ImageGrid& guide,
                              const FilterParams& params) {
    check_inputs(input, guide, params, "aggregation_weights");
    require_same_shape(coeff.a, input, "aggregation_weights (a)");
    require_same_shape(coeff.b, input, "aggregation_weights (b)");
    const auto w = params.window();
    return weights_from_moments(coeff, local_moments(input, guide, w), stats::local_variance(input, w), params.eta);
}

CoefficientField aggregate_coefficients(const CoefficientField& coeff, const ImageGrid& weights,
                                        stats::WindowSpec window) {
    require_same_shape(coeff.a, coeff.b, "aggregate_coefficients");
    require_same_shape(coeff.a, weights, "aggregate_coefficients (weights)");
    if (weights.min() <= 0.0) throw InvalidArgument("aggregation weights must be strictly positive");

    // Offsets keep a constant field exactly constant after averaging.
    const double shift_a = coeff.a[0];
    const double shift_b = coeff.b[0];
    const int width = weights.width();
    const int height = weights.height();
    ImageGrid weighted_a(width, height), weighted_b(width, height);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weighted_a[i] = weights[i] * (coeff.a[i] - shift_a);
        weighted_b[i] = weights[i] * (coeff.b[i] - shift_b);
    }
    const ImageGrid sum_w = stats::box_sum(weights, window);
    const ImageGrid sum_a = stats::box_sum(weighted_a, window);
    const ImageGrid sum_b = stats::box_sum(weighted_b, window);

    CoefficientField out{ImageGrid(width, height), ImageGrid(width, height)};
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out.a[i] = shift_a + sum_a[i] / sum_w[i];
        out.b[i] = shift_b + sum_b[i] / sum_w[i];
    }
    return out;
}

FilterOutput awgif_filter(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params) {
    check_inputs(input, guide, params, "awgif");
    const auto w = params.window();
    const ImageGrid gamma = edge_aware_weight(guide, params.epsilon);
    const double lambda = adaptive_lambda(guide, params.zeta, params.lambda0);
    const LocalMoments moments = local_moments(input, guide, w);
    const CoefficientField coeff = solve_from_moments(moments, &gamma, lambda);
    const ImageGrid weights = weights_from_moments(coeff, moments, stats::local_variance(input, w), params.eta);
    CoefficientField mean_coeff = aggregate_coefficients(coeff, weights, w);
    ImageGrid base = compose_base(mean_coeff, guide);
    return {std::move(base), std::move(mean_coeff.a)};
}

FilterOutput gif_filter(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params) {
    check_inputs(input, guide, params, "gif");
    return box_averaged_filter(input, guide, params, nullptr);
}

FilterOutput wgif_filter(const ImageGrid& input, const ImageGrid& guide, const FilterParams& params) {
    check_inputs(input, guide, params, "wgif");
    const ImageGrid gamma = edge_aware_weight(guide, params.epsilon);
    return box_averaged_filter(input, guide, params, &gamma);
}

FilterOutput apply_filter(FilterKind kind, const ImageGrid& input, const ImageGrid& guide,
                          const FilterParams& params) {
    switch (kind) {
    case FilterKind::awgif: return awgif_filter(input, guide, params);
    case FilterKind::gif: return gif_filter(input, guide, params);
    case FilterKind::wgif: return wgif_filter(input, guide, params);
    }
    throw InvalidArgument("unknown filter kind");
}

} // namespace awgif
