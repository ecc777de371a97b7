#include "awgif/synth.hpp"

#include "awgif/error.hpp"
#include "awgif/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace awgif::synth {

namespace {

constexpr double kSigmaStep = 0.25;
constexpr double kMinBlurSigma = 0.3;
constexpr double kTextureLow = 0.15;
constexpr double kTextureHigh = 0.85;

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xFFFFFFFFu), static_cast<std::uint32_t>(seed >> 32),
                      stream};
    return std::mt19937_64(seq);
}

std::vector<double> gaussian_taps(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) taps[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    return taps;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
        std::size_t used = 0;
        try {
            out = static_cast<T>(std::stod(value, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty()) throw InvalidArgument("bad value for " + key + ": " + value);
    } else {
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
            throw InvalidArgument("bad value for " + key + ": " + value);
        }
    }
    return out;
}

} // namespace

SceneShape parse_shape(std::string_view name) {
    if (name == "cone") return SceneShape::cone;
    if (name == "coswave") return SceneShape::coswave;
    if (name == "sinewave") return SceneShape::sinewave;
    if (name == "flat") return SceneShape::flat;
    if (name == "step") return SceneShape::step;
    throw InvalidArgument("unknown shape: " + std::string(name));
}

std::string_view to_string(SceneShape shape) {
    switch (shape) {
    case SceneShape::cone: return "cone";
    case SceneShape::coswave: return "coswave";
    case SceneShape::sinewave: return "sinewave";
    case SceneShape::flat: return "flat";
    case SceneShape::step: return "step";
    }
    return "unknown";
}

void SceneSpec::validate() const {
    if (width < 1 || height < 1) throw InvalidArgument("scene size must be positive");
    if (frames < 2) throw InvalidArgument("a scene needs at least 2 frames");
    if (!(blur_gain >= 0.0) || !std::isfinite(blur_gain)) throw InvalidArgument("blur gain must be >= 0");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
        throw InvalidArgument("noise variance must be >= 0");
    }
}

std::string to_config(const SceneSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << "shape=" << to_string(spec.shape) << '\n'
        << "size=" << spec.width << 'x' << spec.height << '\n'
        << "frames=" << spec.frames << '\n'
        << "seed=" << spec.seed << '\n'
        << "blur-gain=" << spec.blur_gain << '\n'
        << "noise-var=" << spec.noise_variance << '\n';
    return out.str();
}

SceneSpec scene_from_config(std::string_view text) {
    SceneSpec spec;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw InvalidArgument("expected key=value, got: " + body);
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key == "shape") {
            spec.shape = parse_shape(value);
        } else if (key == "size") {
            const auto x = value.find('x');
            if (x == std::string::npos) throw InvalidArgument("size must be UxV, got: " + value);
            spec.width = parse_number<int>(key, value.substr(0, x));
            spec.height = parse_number<int>(key, value.substr(x + 1));
        } else if (key == "frames") {
            spec.frames = parse_number<int>(key, value);
        } else if (key == "seed") {
            spec.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "blur-gain") {
            spec.blur_gain = parse_number<double>(key, value);
        } else if (key == "noise-var") {
            spec.noise_variance = parse_number<double>(key, value);
        } else {
            throw InvalidArgument("unknown scene key: " + key);
        }
    }
    spec.validate();
    return spec;
}

DepthMap make_depth_surface(const SceneSpec& spec) {
    spec.validate();
    const int U = spec.width;
    const int V = spec.height;
    const double top = spec.frames - 1;
    ImageGrid depth(U, V);

    const double cu = U / 2;
    const double cv = V / 2;
    const double r_max = std::max({std::hypot(cu, cv), std::hypot(U - 1 - cu, cv), std::hypot(cu, V - 1 - cv),
                                   std::hypot(U - 1 - cu, V - 1 - cv)});
    for (int v = 0; v < V; ++v) {
        for (int u = 0; u < U; ++u) {
            double z = 0.0;
            switch (spec.shape) {
            case SceneShape::cone:
                z = r_max > 0.0 ? top * (1.0 - std::hypot(u - cu, v - cv) / r_max) : top;
                break;
            case SceneShape::coswave:
                z = top * (1.0 + std::cos(4.0 * std::numbers::pi * u / U)) / 2.0;
                break;
            case SceneShape::sinewave:
                z = top * (1.0 + std::sin(4.0 * std::numbers::pi * v / V)) / 2.0;
                break;
            case SceneShape::flat: z = top / 2.0; break;
            case SceneShape::step: z = (2 * u < U ? 0.25 : 0.75) * top; break;
            }
            depth(u, v) = z;
        }
    }
    return DepthMap(std::move(depth), spec.frames);
}

ImageGrid make_texture(const SceneSpec& spec) {
    spec.validate();
    auto engine = stream_engine(spec.seed, 0);
    std::uniform_real_distribution<double> dist(kTextureLow, kTextureHigh);
    ImageGrid tex(spec.width, spec.height);
    for (double& x : tex.values()) x = dist(engine);
    return tex;
}

ImageGrid gaussian_blur(const ImageGrid& img, double sigma) {
    if (!(sigma > 0.0)) return img;
    const auto taps = gaussian_taps(sigma);
    const int radius = static_cast<int>(taps.size() / 2);
    const int W = img.width();
    const int H = img.height();

    ImageGrid horiz(W, H);
    for (int v = 0; v < H; ++v) {
        for (int u = 0; u < W; ++u) {
            double acc = 0.0, norm = 0.0;
            for (int i = std::max(-radius, -u); i <= std::min(radius, W - 1 - u); ++i) {
                acc += taps[i + radius] * img(u + i, v);
                norm += taps[i + radius];
            }
            horiz(u, v) = acc / norm;
        }
    }
    ImageGrid out(W, H);
    for (int v = 0; v < H; ++v) {
        const int lo = std::max(-radius, -v);
        const int hi = std::min(radius, H - 1 - v);
        double norm = 0.0;
        for (int i = lo; i <= hi; ++i) norm += taps[i + radius];
        for (int u = 0; u < W; ++u) {
            double acc = 0.0;
            for (int i = lo; i <= hi; ++i) acc += taps[i + radius] * horiz(u, v + i);
            out(u, v) = acc / norm;
        }
    }
    return out;
}

ImageStack render_stack(const DepthMap& truth, const SceneSpec& spec) {
    spec.validate();
    const ImageGrid& depth = truth.grid();
    if (depth.width() != spec.width || depth.height() != spec.height || truth.frame_count() != spec.frames) {
        throw DimensionMismatch("ground truth does not match the scene size");
    }
    const ImageGrid texture = make_texture(spec);

    // Blur levels sigma_j = j * kSigmaStep, level 0 being the sharp texture.
    double max_defocus = 0.0;
    for (double z : depth.values()) max_defocus = std::max({max_defocus, z, spec.frames - 1 - z});
    const std::size_t levels = static_cast<std::size_t>(std::ceil(spec.blur_gain * max_defocus / kSigmaStep)) + 2;
    std::vector<ImageGrid> blurred(levels);
    parallel_for(levels, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t j = j0; j < j1; ++j) {
            const double sigma = static_cast<double>(j) * kSigmaStep;
            blurred[j] = sigma < kMinBlurSigma ? texture : gaussian_blur(texture, sigma);
        }
    }, 1);

    std::vector<ImageGrid> frames(static_cast<std::size_t>(spec.frames));
    parallel_for(frames.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            ImageGrid frame(spec.width, spec.height);
            for (std::size_t i = 0; i < frame.size(); ++i) {
                const double sigma = spec.blur_gain * std::abs(static_cast<double>(k) - depth[i]);
                if (sigma < kMinBlurSigma) {
                    frame[i] = texture[i];
                    continue;
                }
                const double pos = sigma / kSigmaStep;
                const auto j = std::min(static_cast<std::size_t>(pos), levels - 2);
                const double t = pos - static_cast<double>(j);
                frame[i] = (1.0 - t) * blurred[j][i] + t * blurred[j + 1][i];
            }
            if (spec.noise_variance > 0.0) {
                auto engine = stream_engine(spec.seed, static_cast<std::uint32_t>(k + 1));
                std::normal_distribution<double> noise(0.0, std::sqrt(spec.noise_variance));
                for (double& x : frame.values()) x = std::clamp(x + noise(engine), 0.0, 1.0);
            }
            frames[k] = std::move(frame);
        }
    }, 1);
    return ImageStack(std::move(frames));
}

} // namespace awgif::synth
