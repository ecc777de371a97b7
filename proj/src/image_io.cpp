#include "awgif/image_io.hpp"

#include "awgif/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace awgif::io {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDepthTag = "awgif-depth-frames";

std::string lower_ext(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open image", path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Header tokenizer shared by P2 and P5; collects '#' comments on the way.
class PnmCursor {
public:
    PnmCursor(const std::vector<unsigned char>& bytes, std::vector<std::string>& comments, const fs::path& path)
        : bytes_(bytes), comments_(comments), path_(path) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const unsigned char c = bytes_[pos_];
            if (c == '#') {
                const std::size_t start = ++pos_;
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
                std::string text(bytes_.begin() + start, bytes_.begin() + pos_);
                const auto first = text.find_first_not_of(' ');
                comments_.push_back(first == std::string::npos ? std::string() : text.substr(first));
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long next_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw UnsupportedFormat("malformed PGM header or data", path_.string());
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) throw UnsupportedFormat("PGM value out of range", path_.string());
            ++pos_;
        }
        return value;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) noexcept { pos_ += n; }

private:
    const std::vector<unsigned char>& bytes_;
    std::vector<std::string>& comments_;
    const fs::path& path_;
    std::size_t pos_ = 2;
};

RawImage read_pgm(const fs::path& path, const std::vector<unsigned char>& bytes) {
    RawImage raw;
    const bool ascii = bytes[1] == '2';
    PnmCursor cur(bytes, raw.comments, path);
    const long width = cur.next_int();
    const long height = cur.next_int();
    const long maxval = cur.next_int();
    if (width < 1 || height < 1 || width > 1'000'000 || height > 1'000'000) {
        throw UnsupportedFormat("invalid PGM dimensions", path.string());
    }
    if (maxval < 1 || maxval > 65535) {
        throw UnsupportedBitDepth("unsupported PGM maxval " + std::to_string(maxval), path.string());
    }
    raw.maxval = static_cast<int>(maxval);

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<double> values(count);
    const double scale = 1.0 / static_cast<double>(maxval);
    if (ascii) {
        for (std::size_t i = 0; i < count; ++i) {
            const long x = cur.next_int();
            if (x > maxval) throw UnsupportedFormat("PGM sample exceeds maxval", path.string());
            values[i] = static_cast<double>(x) * scale;
        }
    } else {
        cur.advance(1); // single whitespace after maxval
        const std::size_t bpp = maxval > 255 ? 2 : 1;
        if (bytes.size() < cur.pos() + count * bpp) {
            throw UnsupportedFormat("truncated PGM data", path.string());
        }
        const unsigned char* data = bytes.data() + cur.pos();
        for (std::size_t i = 0; i < count; ++i) {
            const unsigned x = bpp == 2 ? (unsigned(data[2 * i]) << 8) | data[2 * i + 1] : data[i];
            if (x > static_cast<unsigned>(maxval)) {
                throw UnsupportedFormat("PGM sample exceeds maxval", path.string());
            }
            values[i] = static_cast<double>(x) * scale;
        }
    }
    raw.grid = ImageGrid(static_cast<int>(width), static_cast<int>(height), std::move(values));
    return raw;
}

struct PngReadState {
    std::FILE* file = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngReadState() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (file) std::fclose(file);
    }
};

RawImage read_png(const fs::path& path) {
    PngReadState st;
    st.file = std::fopen(path.c_str(), "rb");
    if (!st.file) throw MissingFile("cannot open image", path.string());
    st.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!st.png) throw UnsupportedFormat("libpng initialisation failed", path.string());
    st.info = png_create_info_struct(st.png);
    if (!st.info) throw UnsupportedFormat("libpng initialisation failed", path.string());

    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int color_type = 0;
    std::vector<unsigned char> pixels;
    std::vector<png_bytep> rows;
    bool failed = false;

    // Nothing with a non-trivial destructor is created between setjmp and longjmp.
    if (setjmp(png_jmpbuf(st.png))) {
        failed = true;
    } else {
        png_init_io(st.png, st.file);
        png_read_info(st.png, st.info);
        png_get_IHDR(st.png, st.info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    }
    if (failed) throw UnsupportedFormat("corrupt PNG", path.string());
    if (color_type != PNG_COLOR_TYPE_GRAY) {
        throw UnsupportedFormat("PNG is not single-channel grayscale", path.string());
    }
    if (bit_depth != 8 && bit_depth != 16) {
        throw UnsupportedBitDepth("unsupported PNG bit depth " + std::to_string(bit_depth), path.string());
    }

    const std::size_t row_bytes = static_cast<std::size_t>(width) * (bit_depth / 8);
    pixels.resize(row_bytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;

    if (setjmp(png_jmpbuf(st.png))) {
        failed = true;
    } else {
        png_read_image(st.png, rows.data());
        png_read_end(st.png, nullptr);
    }
    if (failed) throw UnsupportedFormat("corrupt PNG data", path.string());

    RawImage raw;
    raw.maxval = bit_depth == 16 ? 65535 : 255;
    const double scale = 1.0 / raw.maxval;
    std::vector<double> values(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const unsigned x = bit_depth == 16 ? (unsigned(pixels[2 * i]) << 8) | pixels[2 * i + 1] : pixels[i];
        values[i] = x * scale;
    }
    raw.grid = ImageGrid(static_cast<int>(width), static_cast<int>(height), std::move(values));
    return raw;
}

std::vector<unsigned> quantize(const ImageGrid& grid, unsigned maxval, std::optional<ValueRange> range) {
    ValueRange r = range.value_or(ValueRange{grid.min(), grid.max()});
    const double span = r.hi - r.lo;
    std::vector<unsigned> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = span > 0.0 ? (grid[i] - r.lo) / span : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        out[i] = static_cast<unsigned>(std::floor(t * maxval + 0.5));
    }
    return out;
}

void write_pgm(const ImageGrid& grid, const fs::path& path, unsigned maxval, std::optional<ValueRange> range,
               const std::vector<std::string>& comments) {
    const auto q = quantize(grid, maxval, range);
    std::ostringstream header;
    header << "P5\n";
    for (const auto& c : comments) header << "# " << c << '\n';
    header << grid.width() << ' ' << grid.height() << '\n' << maxval << '\n';
    std::string data = header.str();
    data.reserve(data.size() + q.size() * 2);
    for (unsigned x : q) {
        if (maxval > 255) data.push_back(static_cast<char>(x >> 8));
        data.push_back(static_cast<char>(x & 0xFF));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw WriteError("cannot write image", path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw WriteError("failed writing image", path.string());
}

struct PngWriteState {
    std::FILE* file = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngWriteState() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (file) std::fclose(file);
    }
};

void write_png(const ImageGrid& grid, const fs::path& path, std::optional<ValueRange> range) {
    const auto q = quantize(grid, 255, range);
    std::vector<unsigned char> pixels(q.begin(), q.end());
    std::vector<png_bytep> rows(grid.height());
    for (int y = 0; y < grid.height(); ++y) rows[y] = pixels.data() + static_cast<std::size_t>(y) * grid.width();

    PngWriteState st;
    st.file = std::fopen(path.c_str(), "wb");
    if (!st.file) throw WriteError("cannot write image", path.string());
    st.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!st.png) throw WriteError("libpng initialisation failed", path.string());
    st.info = png_create_info_struct(st.png);
    if (!st.info) throw WriteError("libpng initialisation failed", path.string());

    bool failed = false;
    if (setjmp(png_jmpbuf(st.png))) {
        failed = true;
    } else {
        png_init_io(st.png, st.file);
        png_set_IHDR(st.png, st.info, grid.width(), grid.height(), 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(st.png, st.info);
        png_write_image(st.png, rows.data());
        png_write_end(st.png, nullptr);
    }
    if (failed) throw WriteError("failed writing PNG", path.string());
}

bool is_image_file(const fs::path& p) {
    const auto ext = lower_ext(p);
    return ext == ".pgm" || ext == ".png";
}

} // namespace

Encoding encoding_for(const fs::path& path, bool bits16) {
    const auto ext = lower_ext(path);
    if (ext == ".png") {
        if (bits16) throw InvalidArgument("16-bit output is only supported for PGM");
        return Encoding::png8;
    }
    if (ext == ".pgm") return bits16 ? Encoding::pgm16 : Encoding::pgm8;
    throw InvalidArgument("unsupported output extension '" + ext + "' (use .pgm or .png)");
}

RawImage read_image(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw MissingFile("image not found", path.string());
    const auto bytes = read_bytes(path);
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G') {
        return read_png(path);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
        return read_pgm(path, bytes);
    }
    throw UnsupportedFormat("not a grayscale PGM (P2/P5) or PNG image", path.string());
}

ImageGrid load_grid(const fs::path& path) { return read_image(path).grid; }

std::vector<fs::path> read_manifest(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw MissingFile("cannot open manifest", manifest.string());
    const fs::path base = manifest.parent_path();
    std::vector<fs::path> entries;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        fs::path p = line.substr(first, last - first + 1);
        entries.push_back(p.is_absolute() ? p : base / p);
    }
    return entries;
}

void write_manifest(const fs::path& manifest, const std::vector<fs::path>& entries,
                    const std::vector<std::string>& comments) {
    std::ofstream out(manifest, std::ios::trunc);
    if (!out) throw WriteError("cannot write manifest", manifest.string());
    for (const auto& c : comments) out << "# " << c << '\n';
    for (const auto& e : entries) out << e.generic_string() << '\n';
    if (!out) throw WriteError("failed writing manifest", manifest.string());
}

ImageStack load_stack(const fs::path& path) {
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    } else if (fs::is_regular_file(path)) {
        files = read_manifest(path);
    } else {
        throw MissingFile("stack path not found", path.string());
    }
    if (files.size() < 2) {
        throw InvalidArgument("stack " + path.string() + " lists " + std::to_string(files.size()) +
                              " image(s); at least 2 are required");
    }

    std::vector<ImageGrid> frames;
    frames.reserve(files.size());
    for (std::size_t k = 0; k < files.size(); ++k) {
        ImageGrid g = load_grid(files[k]);
        if (!frames.empty() && !g.same_shape(frames.front())) {
            throw DimensionMismatch("frame " + std::to_string(k + 1) + " (" + files[k].string() + ") is " +
                                    std::to_string(g.width()) + "x" + std::to_string(g.height()) +
                                    ", expected " + std::to_string(frames.front().width()) + "x" +
                                    std::to_string(frames.front().height()));
        }
        frames.push_back(std::move(g));
    }
    return ImageStack(std::move(frames));
}

void save_grid(const ImageGrid& grid, const fs::path& path, Encoding encoding, std::optional<ValueRange> range,
               const std::vector<std::string>& comments) {
    if (range && !(range->hi > range->lo)) throw InvalidArgument("output range must satisfy lo < hi");
    switch (encoding) {
    case Encoding::pgm8: write_pgm(grid, path, 255, range, comments); break;
    case Encoding::pgm16: write_pgm(grid, path, 65535, range, comments); break;
    case Encoding::png8: write_png(grid, path, range); break;
    }
}

void save_depth(const DepthMap& depth, const fs::path& path) {
    save_depth(depth.grid(), depth.frame_count(), path);
}

void save_depth(const ImageGrid& depth, int frame_count, const fs::path& path) {
    save_grid(depth, path, Encoding::pgm16, ValueRange{0.0, static_cast<double>(frame_count - 1)},
              {std::string(kDepthTag) + " " + std::to_string(frame_count)});
}

std::optional<DepthMap> load_depth(const fs::path& path) {
    RawImage raw = read_image(path);
    for (const auto& c : raw.comments) {
        std::istringstream line(c);
        std::string tag;
        int frames = 0;
        if (line >> tag >> frames && tag == kDepthTag && frames >= 2) {
            return DepthMap::from_normalized(raw.grid, frames);
        }
    }
    return std::nullopt;
}

} // namespace awgif::io
