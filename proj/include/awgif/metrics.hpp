#pragma once

#include "awgif/image.hpp"

namespace awgif::metrics {

// Root-mean-square error against ground truth.
double rmse(const ImageGrid& estimate, const ImageGrid& truth);

// Pearson correlation in [-1, 1]. Throws InvalidArgument when either map is constant.
double corr(const ImageGrid& estimate, const ImageGrid& truth);

// Root-mean-square difference between the enhanced and the initial depth map.
double rmsd(const ImageGrid& enhanced, const ImageGrid& initial);

} // namespace awgif::metrics
