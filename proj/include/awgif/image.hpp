#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace awgif {

/**
 * Dense row-major scalar field of width U by height V.
 *
 * Pixel (u, v) is column u, row v and lives at values()[v * width + u].
 * Intensities use the canonical range [0, 1]; depth grids carry frame
 * indices. Values are always finite.
 */
class ImageGrid {
public:
    ImageGrid() = default;
    ImageGrid(int width, int height, double fill = 0.0);
    ImageGrid(int width, int height, std::vector<double> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double operator()(int u, int v) const noexcept { return values_[index(u, v)]; }
    double& operator()(int u, int v) noexcept { return values_[index(u, v)]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> row(int v) const noexcept {
        return {values_.data() + static_cast<std::size_t>(v) * width_, static_cast<std::size_t>(width_)};
    }
    std::span<double> row(int v) noexcept {
        return {values_.data() + static_cast<std::size_t>(v) * width_, static_cast<std::size_t>(width_)};
    }

    bool same_shape(const ImageGrid& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    double min() const;
    double max() const;
    double mean() const;

    friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

private:
    std::size_t index(int u, int v) const noexcept {
        return static_cast<std::size_t>(v) * width_ + u;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

// Throws DimensionMismatch naming `what` when the grids differ in shape.
void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what);

/// Ordered sequence of K >= 2 co-registered frames of equal size.
class ImageStack {
public:
    explicit ImageStack(std::vector<ImageGrid> frames);

    int frame_count() const noexcept { return static_cast<int>(frames_.size()); }
    int width() const noexcept { return frames_.front().width(); }
    int height() const noexcept { return frames_.front().height(); }

    const ImageGrid& operator[](std::size_t k) const noexcept { return frames_[k]; }
    const std::vector<ImageGrid>& frames() const noexcept { return frames_; }

    auto begin() const noexcept { return frames_.begin(); }
    auto end() const noexcept { return frames_.end(); }

private:
    std::vector<ImageGrid> frames_;
};

/// Per-frame focus scores, one non-negative slice per stack frame.
class FocusVolume {
public:
    explicit FocusVolume(std::vector<ImageGrid> slices);

    int slice_count() const noexcept { return static_cast<int>(slices_.size()); }
    int width() const noexcept { return slices_.front().width(); }
    int height() const noexcept { return slices_.front().height(); }

    const ImageGrid& operator[](std::size_t k) const noexcept { return slices_[k]; }
    const std::vector<ImageGrid>& slices() const noexcept { return slices_; }

private:
    std::vector<ImageGrid> slices_;
};

/// Depth in frame-index units, nominally within [0, K-1].
class DepthMap {
public:
    DepthMap(ImageGrid depth, int frame_count);

    const ImageGrid& grid() const noexcept { return depth_; }
    int frame_count() const noexcept { return frame_count_; }
    double max_index() const noexcept { return frame_count_ - 1; }

    // Depth scaled to [0, 1] by dividing by K-1.
    ImageGrid normalized() const;
    static DepthMap from_normalized(const ImageGrid& unit_depth, int frame_count);

private:
    ImageGrid depth_;
    int frame_count_ = 0;
};

} // namespace awgif
