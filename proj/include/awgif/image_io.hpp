#pragma once

#include "awgif/image.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace awgif::io {

enum class Encoding { pgm8, pgm16, png8 };

struct ValueRange {
    double lo = 0.0;
    double hi = 1.0;
};

// Picks pgm8/png8 from the extension; `bits16` upgrades .pgm to pgm16.
Encoding encoding_for(const std::filesystem::path& path, bool bits16 = false);

struct RawImage {
    ImageGrid grid;                    // rescaled to [0, 1] by the format max value
    int maxval = 255;
    std::vector<std::string> comments; // PGM header comments, without the leading '#'
};

RawImage read_image(const std::filesystem::path& path);
ImageGrid load_grid(const std::filesystem::path& path);

/**
 * Loads an image stack from a directory (every .pgm/.png file, sorted by
 * file name) or from a manifest file listing one image path per line.
 * Manifest paths are relative to the manifest's directory; blank lines and
 * lines starting with '#' are skipped.
 */
ImageStack load_stack(const std::filesystem::path& path);

std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& manifest);
void write_manifest(const std::filesystem::path& manifest,
                    const std::vector<std::filesystem::path>& entries,
                    const std::vector<std::string>& comments = {});

/**
 * Quantizes and writes a grid. Values map linearly from `range` (or the
 * grid's own min/max when absent) onto [0, maxval], clamped, rounding half
 * up. PGM comments are written into the header; PNG ignores them.
 */
void save_grid(const ImageGrid& grid, const std::filesystem::path& path, Encoding encoding,
               std::optional<ValueRange> range = std::nullopt,
               const std::vector<std::string>& comments = {});

// Depth maps go to 16-bit PGM over [0, K-1] with the frame count in a header
// comment so that load_depth restores frame-index units.
void save_depth(const DepthMap& depth, const std::filesystem::path& path);
void save_depth(const ImageGrid& depth, int frame_count, const std::filesystem::path& path);

// Returns nullopt when the file carries no frame-count comment.
std::optional<DepthMap> load_depth(const std::filesystem::path& path);

} // namespace awgif::io
