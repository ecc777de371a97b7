#include "awgif/metrics.hpp"

#include "awgif/error.hpp"

#include <algorithm>
#include <cmath>

namespace awgif::metrics {

double rmse(const ImageGrid& estimate, const ImageGrid& truth) {
    require_same_shape(estimate, truth, "rmse");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = estimate[i] - truth[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(truth.size()));
}

double corr(const ImageGrid& estimate, const ImageGrid& truth) {
    require_same_shape(estimate, truth, "corr");
    const double mean_e = estimate.mean();
    const double mean_t = truth.mean();
    double cross = 0.0, sq_e = 0.0, sq_t = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double de = estimate[i] - mean_e;
        const double dt = truth[i] - mean_t;
        cross += de * dt;
        sq_e += de * de;
        sq_t += dt * dt;
    }
    if (!(sq_e > 0.0) || !(sq_t > 0.0)) throw InvalidArgument("corr is undefined for a constant depth map");
    return std::clamp(cross / std::sqrt(sq_e * sq_t), -1.0, 1.0);
}

double rmsd(const ImageGrid& enhanced, const ImageGrid& initial) {
    require_same_shape(enhanced, initial, "rmsd");
    return rmse(enhanced, initial);
}

} // namespace awgif::metrics
