// flowsal command-line front end: salient-region detection in crowd flow
// fields via finite-time stability analysis.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowsal/io.hpp"
#include "flowsal/parallel.hpp"
#include "flowsal/pipeline.hpp"

namespace fs = std::filesystem;
using namespace flowsal;

namespace {

struct CliOptions {
    PipelineConfig pipeline;
    std::string frames_dir, flows_dir, scene;
    std::string out_dir = "out";
    std::string outputs = "phi,mask,regions";
    std::string alpha_mode = "percentile";
    std::string combine = "union";
    std::string boundary = "clamp";
    int n_frames = 12;
    std::uint64_t texture_seed = 1;
    bool write_field = false;
    int bench_width = 256, bench_height = 256, bench_windows = 3;
};

OutputSelect parse_outputs(const std::string& csv) {
    OutputSelect sel;
    sel.phi_map = sel.phi_hat_map = sel.mask = sel.regions_json = sel.heatmap = sel.timing =
        false;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "phi") sel.phi_map = true;
        else if (item == "phihat") sel.phi_hat_map = true;
        else if (item == "mask") sel.mask = true;
        else if (item == "regions") sel.regions_json = true;
        else if (item == "heatmap") sel.heatmap = true;
        else if (item == "timing") sel.timing = true;
        else if (!item.empty()) throw ConfigError("unknown output kind '" + item + "'");
    }
    return sel;
}

void apply_enum_options(CliOptions& o) {
    if (o.alpha_mode == "fixed") o.pipeline.saliency.alpha_mode = AlphaMode::fixed;
    else if (o.alpha_mode == "percentile") o.pipeline.saliency.alpha_mode = AlphaMode::percentile;
    else if (o.alpha_mode == "otsu") o.pipeline.saliency.alpha_mode = AlphaMode::otsu;
    else throw ConfigError("alpha-mode must be fixed|percentile|otsu");

    if (o.combine == "union") o.pipeline.saliency.combine_mode = CombineMode::set_union;
    else if (o.combine == "intersection") {
        o.pipeline.saliency.combine_mode = CombineMode::set_intersection;
    } else throw ConfigError("combine must be union|intersection");

    if (o.boundary == "clamp") o.pipeline.boundary = BoundaryMode::clamp;
    else if (o.boundary == "zero") o.pipeline.boundary = BoundaryMode::zero;
    else if (o.boundary == "reflect") o.pipeline.boundary = BoundaryMode::reflect;
    else throw ConfigError("boundary must be clamp|zero|reflect");

    o.pipeline.outputs = parse_outputs(o.outputs);
    o.pipeline.output_dir = o.out_dir;
}

void add_flow_options(CLI::App* cmd, FlowParams& p) {
    cmd->add_option("--flow-smoothness", p.smoothness_weight, "smoothness weight");
    cmd->add_option("--flow-levels", p.pyramid_levels, "pyramid levels");
    cmd->add_option("--flow-scale", p.pyramid_scale, "pyramid scale in (0,1)");
    cmd->add_option("--flow-iters", p.iterations_per_level, "solver iterations per level");
    cmd->add_option("--flow-eps", p.convergence_eps, "solver convergence epsilon");
}

void add_advection_options(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--horizon", o.pipeline.horizon_tau,
                    "integration horizon in frames (default: tau)");
    cmd->add_option("--step", o.pipeline.step_h, "RK4 step in frames");
    cmd->add_option("--stride", o.pipeline.seed_stride, "seed one particle per stride pixels");
    cmd->add_option("--boundary", o.boundary, "sampling boundary: clamp|zero|reflect");
}

void add_saliency_options(CLI::App* cmd, CliOptions& o) {
    SaliencyConfig& s = o.pipeline.saliency;
    cmd->add_option("--beta", s.beta, "magnification factor in (0.5,1]");
    cmd->add_option("--alpha-mode", o.alpha_mode, "threshold mode: fixed|percentile|otsu");
    cmd->add_option("--alpha", s.alpha_value, "threshold value or percentile");
    cmd->add_option("--local-window", s.local_window, "local stage window (odd)");
    cmd->add_option("--local-k", s.local_k, "local threshold = mean + k*stddev");
    cmd->add_option("--min-area", s.min_region_area, "minimum region area, pixels");
    cmd->add_option("--combine", o.combine, "stage combination: union|intersection");
}

SceneSpec load_scene(const std::string& name_or_path) {
    if (fs::exists(name_or_path)) {
        std::ifstream in(name_or_path, std::ios::binary);
        if (!in) throw InputUnreadable("cannot open scene " + name_or_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return parse_scene(text, name_or_path);
    }
    if (is_builtin_scene(name_or_path)) return builtin_scene(name_or_path);
    throw InputUnreadable("scene not found (file or builtin): " + name_or_path);
}

int run_analyze(CliOptions& o) {
    apply_enum_options(o);
    int sources = 0;
    if (!o.frames_dir.empty()) ++sources;
    if (!o.flows_dir.empty()) ++sources;
    if (!o.scene.empty()) ++sources;
    if (sources != 1) {
        throw ConfigError("analyze needs exactly one of --frames, --flows, --scene");
    }
    if (!o.frames_dir.empty()) {
        o.pipeline.input_kind = InputKind::frames;
        o.pipeline.input = o.frames_dir;
    } else if (!o.flows_dir.empty()) {
        o.pipeline.input_kind = InputKind::flows;
        o.pipeline.input = o.flows_dir;
    } else {
        o.pipeline.input_kind = InputKind::scene;
        o.pipeline.input = o.scene;
    }
    RunSummary s = run_pipeline(o.pipeline);
    std::cout << "windows processed: " << s.windows_processed << "\n";
    for (std::size_t i = 0; i < s.regions_per_window.size(); ++i) {
        std::cout << "  window " << i << ": " << s.regions_per_window[i] << " region(s)\n";
    }
    for (const auto& [stage, sec] : s.stage_seconds) {
        std::printf("  %-10s %8.3f s\n", stage.c_str(), sec);
    }
    std::printf("  throughput %.0f px/s\n", s.pixels_per_second);
    for (const std::string& w : s.warnings) std::cout << "  warning: " << w << "\n";
    return 0;
}

int run_flow(CliOptions& o) {
    if (o.frames_dir.empty()) throw ConfigError("flow needs --frames");
    fs::create_directories(o.out_dir);
    const auto files = list_files_sorted(o.frames_dir, {".pgm", ".ppm", ".pnm"});
    if (files.size() < 2) throw InputUnreadable("flow needs at least 2 frames");
    Frame prev = read_frame(files[0]);
    for (std::size_t i = 1; i < files.size(); ++i) {
        Frame next = read_frame(files[i]);
        VectorField2 flow = estimate_flow(prev, next, o.pipeline.flow);
        char name[32];
        std::snprintf(name, sizeof(name), "flow_%04zu.flo", i - 1);
        write_flo(flow, fs::path(o.out_dir) / name);
        prev = std::move(next);
    }
    std::cout << "wrote " << files.size() - 1 << " flow file(s) to " << o.out_dir << "\n";
    return 0;
}

int run_stability(CliOptions& o) {
    if (o.flows_dir.empty()) throw ConfigError("stability needs --flows");
    apply_enum_options(o);
    fs::create_directories(o.out_dir);
    const auto files = list_files_sorted(o.flows_dir, {".flo"});
    if (files.empty()) throw InputUnreadable("no .flo files in " + o.flows_dir);
    const int tau = std::min<int>(o.pipeline.tau, static_cast<int>(files.size()));
    VectorField2 first = read_flo(files[0]);
    MeanFlowAccumulator acc(first.shape(), tau);
    acc.accumulate(first);
    for (int i = 1; i < tau; ++i) acc.accumulate(read_flo(files[static_cast<std::size_t>(i)]));
    VectorField2 mean = acc.finalize_mean();
    StabilityField phi = compute_stability(mean, o.pipeline.advection_config());
    write_pfm(ScalarField(phi.shape, phi.phi), fs::path(o.out_dir) / "phi.pfm");
    write_heatmap(ScalarField(phi.shape, phi.phi), fs::path(o.out_dir) / "phi_heatmap.pgm");
    std::cout << "phi map over " << tau << " flow file(s) written to " << o.out_dir << "\n";
    return 0;
}

int run_synth(CliOptions& o) {
    if (o.scene.empty()) throw ConfigError("synth needs --scene");
    SceneSpec spec = load_scene(o.scene);
    fs::create_directories(o.out_dir);
    auto [field, gt] = render_field(spec);

    std::ofstream scene_out(fs::path(o.out_dir) / "scene.txt", std::ios::binary);
    scene_out << format_scene(spec);

    if (o.write_field) write_flo(field, fs::path(o.out_dir) / "field.flo");

    std::ofstream gt_out(fs::path(o.out_dir) / "ground_truth.json", std::ios::binary);
    gt_out << "{\n  \"salient_boxes\": [";
    for (std::size_t i = 0; i < gt.salient_boxes.size(); ++i) {
        const BBox& b = gt.salient_boxes[i];
        gt_out << (i ? ", " : "") << "[" << b.x << ", " << b.y << ", " << b.w << ", " << b.h
               << "]";
    }
    gt_out << "]\n}\n";

    std::vector<Frame> frames = render_frames(spec, o.n_frames, o.texture_seed);
    for (std::size_t k = 0; k < frames.size(); ++k) {
        std::vector<std::uint8_t> bytes(frames[k].intensity.size());
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            bytes[i] = static_cast<std::uint8_t>(std::lround(frames[k].intensity[i] * 255.0));
        }
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu.pgm", k);
        write_pgm(fs::path(o.out_dir) / name, bytes, spec.shape);
    }
    std::cout << "scene '" << o.scene << "': " << frames.size() << " frame(s), "
              << gt.salient_boxes.size() << " ground-truth box(es) in " << o.out_dir << "\n";
    return 0;
}

int run_bench(CliOptions& o) {
    SceneSpec spec;
    spec.shape = {o.bench_width, o.bench_height};
    SceneElement lane;
    lane.kind = ElementKind::uniform_lane;
    lane.magnitude = 0.4;
    SceneElement noise;
    noise.kind = ElementKind::noise_patch;
    noise.bbox = BBox{o.bench_width / 4, o.bench_height / 4, o.bench_width / 4,
                      o.bench_height / 4};
    noise.magnitude = 0.5;
    noise.rng_seed = 11;
    spec.elements = {lane, noise};

    fs::path dir = fs::temp_directory_path() / "flowsal_bench";
    fs::create_directories(dir);
    std::ofstream scene_file(dir / "bench.scene", std::ios::binary);
    scene_file << format_scene(spec);
    scene_file.close();

    o.pipeline.input_kind = InputKind::scene;
    o.pipeline.input = (dir / "bench.scene").string();
    o.pipeline.output_dir = dir / "out";
    o.pipeline.scene_windows = o.bench_windows;
    o.pipeline.outputs = OutputSelect{};
    o.pipeline.outputs.timing = true;
    RunSummary s = run_pipeline(o.pipeline);
    std::printf("bench %dx%d, %d window(s), stride %d, workers %d\n", o.bench_width,
                o.bench_height, s.windows_processed, o.pipeline.seed_stride,
                worker_count());
    for (const auto& [stage, sec] : s.stage_seconds) {
        std::printf("  %-10s %8.3f s\n", stage.c_str(), sec);
    }
    std::printf("  throughput %.0f px/s\n", s.pixels_per_second);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CliOptions o;
    CLI::App app{"salient-region detection in crowd flow via finite-time stability analysis"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI config file (sections per subcommand)");

    CLI::App* analyze = app.add_subcommand("analyze", "full pipeline on frames/flows/scene");
    analyze->add_option("--frames", o.frames_dir, "directory of PGM/PPM frames");
    analyze->add_option("--flows", o.flows_dir, "directory of precomputed .flo files");
    analyze->add_option("--scene", o.scene, "scene file or builtin fixture name");
    analyze->add_option("--out", o.out_dir, "output directory");
    analyze->add_option("--tau", o.pipeline.tau, "window length in frames");
    analyze->add_flag("--sliding", o.pipeline.sliding,
                      "slide the window per frame instead of tumbling");
    analyze->add_option("--windows", o.pipeline.scene_windows, "windows to emit (scene input)");
    analyze->add_option("--outputs", o.outputs,
                        "comma list: phi,phihat,mask,regions,heatmap,timing");
    analyze->add_option("--workers", o.pipeline.workers, "worker threads (0 = auto)");
    add_flow_options(analyze, o.pipeline.flow);
    add_advection_options(analyze, o);
    add_saliency_options(analyze, o);

    CLI::App* flow = app.add_subcommand("flow", "estimate .flo files from a frame directory");
    flow->add_option("--frames", o.frames_dir, "directory of PGM/PPM frames")->required();
    flow->add_option("--out", o.out_dir, "output directory");
    flow->add_option("--workers", o.pipeline.workers, "worker threads (0 = auto)");
    add_flow_options(flow, o.pipeline.flow);

    CLI::App* stability = app.add_subcommand("stability", "phi map from a .flo window");
    stability->add_option("--flows", o.flows_dir, "directory of .flo files")->required();
    stability->add_option("--out", o.out_dir, "output directory");
    stability->add_option("--tau", o.pipeline.tau, "window length in files");
    stability->add_option("--workers", o.pipeline.workers, "worker threads (0 = auto)");
    add_advection_options(stability, o);

    CLI::App* synth = app.add_subcommand("synth", "render a scene to frames and fields");
    synth->add_option("--scene", o.scene, "scene file or builtin fixture name")->required();
    synth->add_option("--out", o.out_dir, "output directory");
    synth->add_option("--frames", o.n_frames, "number of frames to render");
    synth->add_option("--texture-seed", o.texture_seed, "texture RNG seed");
    synth->add_flag("--write-field", o.write_field, "also write the scene field as field.flo");

    CLI::App* bench = app.add_subcommand("bench", "timing fixture for the full pipeline");
    bench->add_option("--width", o.bench_width, "fixture width");
    bench->add_option("--height", o.bench_height, "fixture height");
    bench->add_option("--windows", o.bench_windows, "windows to process");
    bench->add_option("--stride", o.pipeline.seed_stride, "advection seed stride");
    bench->add_option("--workers", o.pipeline.workers, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        set_worker_count(o.pipeline.workers);
        if (app.got_subcommand(analyze)) return run_analyze(o);
        if (app.got_subcommand(flow)) return run_flow(o);
        if (app.got_subcommand(stability)) return run_stability(o);
        if (app.got_subcommand(synth)) return run_synth(o);
        if (app.got_subcommand(bench)) return run_bench(o);
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const InputUnreadable& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
