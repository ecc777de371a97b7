#include "awgif/cli_app.hpp"

#include "awgif/detail_enhancement.hpp"
#include "awgif/error.hpp"
#include "awgif/guided_filter.hpp"
#include "awgif/image_io.hpp"
#include "awgif/metrics.hpp"
#include "awgif/parallel.hpp"
#include "awgif/sff.hpp"
#include "awgif/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace awgif::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::array kCommands{"synth", "sff", "eval", "filter", "sweep"};

std::string num(double x) {
    std::ostringstream s;
    s << std::setprecision(10) << x;
    return s.str();
}

// Runs a parameter check, reporting failures as usage errors.
template <typename F>
void usage_check(F&& check) {
    try {
        check();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
}

// Splices key=value lines from --config FILE in right after the subcommand,
// so explicit flags that follow take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<fs::path> config;
    for (auto it = args.begin(); it != args.end();) {
        if (*it == "--config") {
            if (std::next(it) == args.end()) throw UsageError("--config needs a file argument");
            config = *std::next(it);
            it = args.erase(it, std::next(it, 2));
        } else if (it->rfind("--config=", 0) == 0) {
            config = it->substr(9);
            it = args.erase(it);
        } else {
            ++it;
        }
    }
    if (!config) return args;

    std::ifstream in(*config);
    if (!in) throw UsageError("cannot read config file: " + config->string());
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line is not key=value: " + line);
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        injected.push_back("--" + strip(line.substr(0, eq)) + "=" + strip(line.substr(eq + 1)));
    }
    const auto pos = std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
    });
    args.insert(pos == args.end() ? pos : std::next(pos), injected.begin(), injected.end());
    return args;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw WriteError("cannot create output directory", dir.string());
}

void append_csv(const fs::path& path, const std::vector<std::string>& rows) {
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw WriteError("cannot open CSV for appending", path.string());
    if (fresh) out << kCsvHeader << '\n';
    for (const auto& r : rows) out << r << '\n';
    if (!out) throw WriteError("failed writing CSV", path.string());
}

std::string csv_row(const std::string& scene, const std::string& filter, const std::string& zeta,
                    const std::string& lambda0, const std::string& beta, const std::optional<double>& rmse,
                    const std::optional<double>& corr, const std::optional<double>& rmsd) {
    auto cell = [](const std::optional<double>& x) { return x ? num(*x) : std::string(); };
    return scene + "," + filter + "," + zeta + "," + lambda0 + "," + beta + "," + cell(rmse) + "," + cell(corr) +
           "," + cell(rmsd);
}

// Loads a depth map in frame units when it carries a frame count, else the raw [0, 1] grid.
struct LoadedDepth {
    ImageGrid grid;
    std::optional<int> frames;
};

LoadedDepth load_depth_any(const fs::path& path) {
    if (auto depth = io::load_depth(path)) return {depth->grid(), depth->frame_count()};
    return {io::load_grid(path), std::nullopt};
}

// Puts every map on a common scale: frame units if all agree on K, else [0, 1].
void harmonise(std::vector<LoadedDepth*> maps) {
    bool frame_units = true;
    std::optional<int> k;
    for (auto* m : maps) {
        if (!m->frames || (k && *k != *m->frames)) frame_units = false;
        if (m->frames) k = m->frames;
    }
    if (frame_units) return;
    for (auto* m : maps) {
        if (!m->frames) continue;
        m->grid = DepthMap(m->grid, *m->frames).normalized();
        m->frames.reset();
    }
}

std::optional<double> try_corr(const ImageGrid& a, const ImageGrid& b) {
    try {
        return metrics::corr(a, b);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

struct FilterFlags {
    int zeta = 2;
    double lambda0 = 100.0;
    double epsilon = 1.0 / (255.0 * 255.0);
    double eta = 1.0 / (200.0 * 200.0);
    std::string filter = "awgif";

    void add_to(CLI::App& app) {
        app.add_option("--zeta", zeta, "Guided filter window radius")->capture_default_str();
        app.add_option("--lambda0", lambda0, "Regularisation base")->capture_default_str();
        app.add_option("--epsilon", epsilon, "Edge-aware constant on the [0,1]^2 scale")->capture_default_str();
        app.add_option("--eta", eta, "Aggregation constant on the [0,1]^2 scale")->capture_default_str();
        app.add_option("--filter", filter, "awgif, gif or wgif")->capture_default_str();
    }

    FilterParams params() const {
        FilterParams p{zeta, lambda0, epsilon, eta};
        usage_check([&] { p.validate(); });
        return p;
    }

    FilterKind kind() const {
        FilterKind k{};
        usage_check([&] { k = parse_filter_kind(filter); });
        return k;
    }
};

struct SffFlags {
    std::string stack;
    int fm_radius = 2;
    int agg_radius = 2;
    double beta = 1.0;
    FilterFlags filter;

    void add_to(CLI::App& app) {
        app.add_option("--stack", stack, "Image directory or manifest file")->required();
        app.add_option("--fm-radius", fm_radius, "Gray-level-variance window radius")->capture_default_str();
        app.add_option("--agg-radius", agg_radius, "Focus-volume aggregation radius")->capture_default_str();
        filter.add_to(app);
    }

    sff::SffParams params() const {
        sff::SffParams p;
        p.fm_radius = fm_radius;
        p.agg_radius = agg_radius;
        p.filter = filter.params();
        p.filter_kind = filter.kind();
        p.beta = beta;
        usage_check([&] { p.validate(); });
        return p;
    }
};

// ---------------------------------------------------------------- synth

struct SynthFlags {
    std::string shape = "cone";
    std::string size = "64x64";
    int frames = 32;
    std::uint64_t seed = 1;
    double blur_gain = 0.8;
    double noise_var = 0.0;
    std::string out;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
    synth::SceneSpec spec;
    usage_check([&] {
        spec.shape = synth::parse_shape(f.shape);
        const auto x = f.size.find('x');
        std::size_t used_w = 0, used_h = 0;
        try {
            if (x == std::string::npos) throw std::invalid_argument("size");
            spec.width = std::stoi(f.size.substr(0, x), &used_w);
            spec.height = std::stoi(f.size.substr(x + 1), &used_h);
        } catch (const std::logic_error&) {
            throw InvalidArgument("--size must look like 64x64, got: " + f.size);
        }
        if (used_w != x || used_h != f.size.size() - x - 1) {
            throw InvalidArgument("--size must look like 64x64, got: " + f.size);
        }
        spec.frames = f.frames;
        spec.seed = f.seed;
        spec.blur_gain = f.blur_gain;
        spec.noise_variance = f.noise_var;
        spec.validate();
    });

    const fs::path dir = f.out;
    ensure_directory(dir);
    const DepthMap truth = synth::make_depth_surface(spec);
    const ImageStack stack = synth::render_stack(truth, spec);

    const int digits = std::max(3, static_cast<int>(std::to_string(spec.frames - 1).size()));
    std::vector<fs::path> names;
    for (int k = 0; k < stack.frame_count(); ++k) {
        std::ostringstream name;
        name << "frame_" << std::setw(digits) << std::setfill('0') << k << ".pgm";
        names.emplace_back(name.str());
        io::save_grid(stack[k], dir / names.back(), io::Encoding::pgm8, io::ValueRange{0.0, 1.0});
    }
    io::save_depth(truth, dir / "truth.pgm");

    const std::string meta = "scene " + std::string(synth::to_string(spec.shape)) + " " +
                             std::to_string(spec.width) + "x" + std::to_string(spec.height) + " frames " +
                             std::to_string(spec.frames) + " seed " + std::to_string(spec.seed) + " rng " +
                             std::string(synth::kRngName);
    io::write_manifest(dir / "manifest.txt", names, {meta});
    {
        std::ofstream cfg(dir / "scene.cfg", std::ios::trunc);
        if (!cfg) throw WriteError("cannot write scene config", (dir / "scene.cfg").string());
        cfg << "# rng=" << synth::kRngName << '\n' << synth::to_config(spec);
    }
    out << "synth: wrote " << spec.frames << " frames, truth.pgm and manifest.txt to " << dir.string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- sff

int cmd_sff(const SffFlags& f, const std::string& out_dir, std::ostream& out) {
    const auto params = f.params();
    const fs::path dir = out_dir;
    const ImageStack stack = io::load_stack(f.stack);
    const auto result = sff::enhance_depth(stack, params);

    ensure_directory(dir);
    io::save_depth(result.initial, dir / "initial.pgm");
    io::save_depth(result.final_depth, dir / "final.pgm");
    io::save_grid(result.guidance, dir / "guidance.pgm", io::Encoding::pgm8, io::ValueRange{0.0, 1.0});

    out << "sff: " << stack.width() << "x" << stack.height() << "x" << stack.frame_count()
        << " filter=" << to_string(params.filter_kind) << " zeta=" << params.filter.zeta
        << " lambda0=" << num(params.filter.lambda0) << " beta=" << num(params.beta)
        << " rmsd=" << num(metrics::rmsd(result.final_depth.grid(), result.initial.grid()))
        << " -> " << dir.string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
    std::string pred, truth, initial, csv;
    std::string scene, filter, zeta, lambda0, beta;
};

int cmd_eval(const EvalFlags& f, std::ostream& out) {
    if (f.truth.empty() && f.initial.empty()) throw UsageError("eval needs --truth and/or --initial");
    LoadedDepth pred = load_depth_any(f.pred);
    std::optional<LoadedDepth> truth, initial;
    if (!f.truth.empty()) truth = load_depth_any(f.truth);
    if (!f.initial.empty()) initial = load_depth_any(f.initial);
    std::vector<LoadedDepth*> maps{&pred};
    if (truth) maps.push_back(&*truth);
    if (initial) maps.push_back(&*initial);
    harmonise(maps);

    std::optional<double> rmse, corr, rmsd;
    if (truth) {
        rmse = metrics::rmse(pred.grid, truth->grid);
        corr = try_corr(pred.grid, truth->grid);
    }
    if (initial) rmsd = metrics::rmsd(pred.grid, initial->grid);

    if (rmse) out << "rmse=" << num(*rmse) << ' ';
    if (truth) out << "corr=" << (corr ? num(*corr) : std::string("undefined")) << ' ';
    if (rmsd) out << "rmsd=" << num(*rmsd) << ' ';
    out << "units=" << (pred.frames ? "frames" : "normalized") << '\n';

    if (!f.csv.empty()) append_csv(f.csv, {csv_row(f.scene, f.filter, f.zeta, f.lambda0, f.beta, rmse, corr, rmsd)});
    return kExitOk;
}

// ---------------------------------------------------------------- filter

struct ImageFilterFlags {
    std::string input, guide, out, enhancement_case;
    std::optional<double> alpha, beta;
    double selective_beta = 1.0;
    double hybrid_beta = 1.0;
    bool bits16 = false;
    FilterFlags filter{15, 1000.0};
};

int cmd_filter(const ImageFilterFlags& f, std::ostream& out) {
    const auto params = f.filter.params();
    const auto kind = f.filter.kind();
    EnhancementParams gains;
    std::string label;
    usage_check([&] {
        if (f.alpha || f.beta) {
            gains = {f.alpha.value_or(0.0), f.beta.value_or(0.0)};
            label = "custom";
        } else {
            label = f.enhancement_case.empty() ? "hybrid" : f.enhancement_case;
            gains = case_preset(label, f.selective_beta, f.hybrid_beta);
        }
        gains.validate();
    });
    io::Encoding encoding{};
    usage_check([&] { encoding = io::encoding_for(f.out, f.bits16); });

    const ImageGrid input = io::load_grid(f.input);
    const ImageGrid guide = f.guide.empty() ? input : io::load_grid(f.guide);
    const ImageGrid result = enhance(decompose(input, guide, params, kind), gains);
    io::save_grid(result, f.out, encoding, io::ValueRange{0.0, 1.0});

    out << "filter: case=" << label << " alpha=" << num(gains.alpha) << " beta=" << num(gains.beta)
        << " filter=" << to_string(kind) << " zeta=" << params.zeta << " lambda0=" << num(params.lambda0) << " -> "
        << f.out << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
    SffFlags sff;
    std::string truth, csv, scene;
    std::vector<double> betas{0.25, 0.5, 0.75, 1.0};
};

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
    auto params = f.sff.params();
    usage_check([&] {
        if (f.betas.empty()) throw InvalidArgument("--betas must list at least one value");
        for (double b : f.betas) {
            if (!(b >= 0.0)) throw InvalidArgument("betas must be >= 0");
        }
    });
    const ImageStack stack = io::load_stack(f.sff.stack);
    const auto result = sff::enhance_depth(stack, params);

    LoadedDepth truth = load_depth_any(f.truth);
    if (!truth.frames) truth.grid = DepthMap::from_normalized(truth.grid, stack.frame_count()).grid();
    require_same_shape(truth.grid, result.initial.grid(), "sweep truth");

    const std::string scene = f.scene.empty() ? fs::path(f.sff.stack).parent_path().filename().string() : f.scene;
    std::vector<std::string> rows;
    for (double beta : f.betas) {
        const ImageGrid final_depth = result.with_beta(beta).grid();
        rows.push_back(csv_row(scene, std::string(to_string(params.filter_kind)), std::to_string(params.filter.zeta),
                               num(params.filter.lambda0), num(beta), metrics::rmse(final_depth, truth.grid),
                               try_corr(final_depth, truth.grid),
                               metrics::rmsd(final_depth, result.initial.grid())));
        out << rows.back() << '\n';
    }
    if (!f.csv.empty()) append_csv(f.csv, rows);
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Depth-from-focus with adaptive weighted guided filtering", "awgif"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::optional<int> threads;
    app.add_option("--threads", threads, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

    SynthFlags synth_flags;
    auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic multi-focus stack with ground truth");
    synth_cmd->add_option("--shape", synth_flags.shape, "cone, coswave, sinewave, flat or step")->capture_default_str();
    synth_cmd->add_option("--size", synth_flags.size, "Frame size UxV")->capture_default_str();
    synth_cmd->add_option("--frames", synth_flags.frames, "Frame count K")->capture_default_str();
    synth_cmd->add_option("--seed", synth_flags.seed, "Texture and noise seed")->capture_default_str();
    synth_cmd->add_option("--blur-gain", synth_flags.blur_gain, "Blur sigma per frame of defocus")->capture_default_str();
    synth_cmd->add_option("--noise-var", synth_flags.noise_var, "Gaussian noise variance")->capture_default_str();
    synth_cmd->add_option("--out", synth_flags.out, "Output directory")->required();

    SffFlags sff_flags;
    std::string sff_out;
    auto* sff_cmd = app.add_subcommand("sff", "Estimate and enhance depth from a focus stack");
    sff_flags.add_to(*sff_cmd);
    sff_cmd->add_option("--beta", sff_flags.beta, "Adaptive detail gain")->capture_default_str();
    sff_cmd->add_option("--out", sff_out, "Output directory")->required();

    EvalFlags eval_flags;
    auto* eval_cmd = app.add_subcommand("eval", "Score a depth map (RMSE, CORR, RMSD)");
    eval_cmd->add_option("--pred", eval_flags.pred, "Depth map to score")->required();
    eval_cmd->add_option("--truth", eval_flags.truth, "Ground-truth depth");
    eval_cmd->add_option("--initial", eval_flags.initial, "Initial depth, for RMSD");
    eval_cmd->add_option("--csv", eval_flags.csv, "Append a result row to this CSV");
    eval_cmd->add_option("--scene", eval_flags.scene, "CSV scene label");
    eval_cmd->add_option("--filter", eval_flags.filter, "CSV filter label");
    eval_cmd->add_option("--zeta", eval_flags.zeta, "CSV zeta label");
    eval_cmd->add_option("--lambda0", eval_flags.lambda0, "CSV lambda0 label");
    eval_cmd->add_option("--beta", eval_flags.beta, "CSV beta label");

    ImageFilterFlags filter_flags;
    auto* filter_cmd = app.add_subcommand("filter", "Smooth or enhance a single image");
    filter_cmd->add_option("--input", filter_flags.input, "Image to filter")->required();
    filter_cmd->add_option("--guide", filter_flags.guide, "Guidance image (defaults to the input)");
    filter_cmd->add_option("--out", filter_flags.out, "Output image (.pgm or .png)")->required();
    auto* case_opt =
        filter_cmd->add_option("--case", filter_flags.enhancement_case, "smooth, enhance, selective or hybrid");
    auto* alpha_opt = filter_cmd->add_option("--alpha", filter_flags.alpha, "Constant detail gain");
    auto* beta_opt = filter_cmd->add_option("--beta", filter_flags.beta, "Adaptive detail gain");
    case_opt->excludes(alpha_opt)->excludes(beta_opt);
    filter_cmd->add_option("--selective-beta", filter_flags.selective_beta, "beta for the selective case")
        ->capture_default_str();
    filter_cmd->add_option("--hybrid-beta", filter_flags.hybrid_beta, "beta for the hybrid case")
        ->capture_default_str();
    filter_cmd->add_flag("--bits16", filter_flags.bits16, "Write 16-bit PGM");
    filter_flags.filter.add_to(*filter_cmd);

    SweepFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "Score the enhanced depth over several beta values");
    sweep_flags.sff.add_to(*sweep_cmd);
    sweep_cmd->add_option("--truth", sweep_flags.truth, "Ground-truth depth")->required();
    sweep_cmd->add_option("--betas", sweep_flags.betas, "Comma-separated beta values")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->capture_default_str();
    sweep_cmd->add_option("--csv", sweep_flags.csv, "Append rows to this CSV");
    sweep_cmd->add_option("--scene", sweep_flags.scene, "CSV scene label (defaults to the stack directory name)");

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const int previous_threads = thread_count();
    if (threads) set_thread_count(*threads);
    int status = kExitOk;
    try {
        if (synth_cmd->parsed()) status = cmd_synth(synth_flags, out);
        else if (sff_cmd->parsed()) status = cmd_sff(sff_flags, sff_out, out);
        else if (eval_cmd->parsed()) status = cmd_eval(eval_flags, out);
        else if (filter_cmd->parsed()) status = cmd_filter(filter_flags, out);
        else if (sweep_cmd->parsed()) status = cmd_sweep(sweep_flags, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        status = kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        status = kExitFailure;
    }
    set_thread_count(previous_threads);
    return status;
}

} // namespace awgif::cli
