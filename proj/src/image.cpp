#include "awgif/image.hpp"

#include "awgif/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace awgif {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
}

} // namespace

ImageGrid::ImageGrid(int width, int height, double fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    if (!std::isfinite(fill)) throw InvalidArgument("image fill value must be finite");
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

ImageGrid::ImageGrid(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidArgument("image value count " + std::to_string(values_.size()) +
                              " does not match " + std::to_string(width) + "x" + std::to_string(height));
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); })) {
        throw InvalidArgument("image values must be finite");
    }
}

double ImageGrid::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ImageGrid::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ImageGrid::mean() const {
    double sum = 0.0;
    for (double x : values_) sum += x;
    return sum / static_cast<double>(values_.size());
}

void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionMismatch(std::string(what) + ": dimension mismatch " + std::to_string(a.width()) +
                                "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                                "x" + std::to_string(b.height()));
    }
}

ImageStack::ImageStack(std::vector<ImageGrid> frames) : frames_(std::move(frames)) {
    if (frames_.size() < 2) throw InvalidArgument("an image stack needs at least 2 frames");
    for (std::size_t k = 1; k < frames_.size(); ++k) {
        if (!frames_[k].same_shape(frames_[0])) {
            throw DimensionMismatch("stack frame " + std::to_string(k + 1) + " is " +
                                    std::to_string(frames_[k].width()) + "x" +
                                    std::to_string(frames_[k].height()) + ", expected " +
                                    std::to_string(frames_[0].width()) + "x" +
                                    std::to_string(frames_[0].height()));
        }
    }
}

FocusVolume::FocusVolume(std::vector<ImageGrid> slices) : slices_(std::move(slices)) {
    if (slices_.size() < 2) throw InvalidArgument("a focus volume needs at least 2 slices");
    for (const auto& s : slices_) {
        require_same_shape(s, slices_.front(), "focus volume");
        if (s.min() < 0.0) throw InvalidArgument("focus scores must be non-negative");
    }
}

DepthMap::DepthMap(ImageGrid depth, int frame_count)
    : depth_(std::move(depth)), frame_count_(frame_count) {
    if (frame_count_ < 2) throw InvalidArgument("depth map needs a frame count of at least 2");
}

ImageGrid DepthMap::normalized() const {
    ImageGrid out = depth_;
    const double scale = max_index();
    for (double& x : out.values()) x /= scale;
    return out;
}

DepthMap DepthMap::from_normalized(const ImageGrid& unit_depth, int frame_count) {
    ImageGrid out = unit_depth;
    const double scale = frame_count - 1;
    for (double& x : out.values()) x *= scale;
    return DepthMap(std::move(out), frame_count);
}

} // namespace awgif
