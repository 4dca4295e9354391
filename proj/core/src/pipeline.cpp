#include "flowsal/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "flowsal/io.hpp"
#include "flowsal/parallel.hpp"

namespace flowsal {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string window_name(const char* stem, int index, const char* ext) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, index, ext);
    return buf;
}

}  // namespace

AdvectionConfig PipelineConfig::advection_config() const {
    const double horizon = horizon_tau > 0.0 ? horizon_tau : static_cast<double>(tau);
    return AdvectionConfig(horizon, step_h, seed_stride, BoundaryPolicy{boundary});
}

void PipelineConfig::validate() const {
    if (tau < 1) throw ConfigError("tau must be >= 1");
    if (scene_windows < 1) throw ConfigError("scene_windows must be >= 1");
    flow.validate();
    saliency.validate();
    advection_config();  // throws on bad step/horizon/stride
}

WindowAnalysis analyze_window(const VectorField2& mean_field, const AdvectionConfig& advection,
                              const SaliencyConfig& saliency) {
    WindowAnalysis out;
    out.mean_flow = mean_field;

    auto t0 = Clock::now();
    FlowMap map = advect_grid(mean_field, advection);
    out.advection_seconds = seconds_since(t0);

    t0 = Clock::now();
    out.phi = stability_exponent(max_eigenvalue_ctc(jacobian_of_flow_map(map)),
                                 advection.horizon_tau());
    out.stability_seconds = seconds_since(t0);

    t0 = Clock::now();
    try {
        out.alpha = select_alpha(out.phi, saliency);
    } catch (const DegenerateField&) {
        // constant phi has no data-driven threshold; fall back to the fixed
        // interpretation of alpha_value, which leaves the global stage empty
        out.alpha = saliency.alpha_value;
        out.alpha_fallback = true;
    }
    out.phi_hat = magnify(out.phi, saliency, out.alpha);
    out.mask = segment(out.phi_hat, saliency, out.alpha);
    out.regions = extract_regions(out.mask, out.phi, saliency);
    out.saliency_seconds = seconds_since(t0);
    return out;
}

std::string regions_json(int frame_window, double alpha_used, const SalientRegionSet& set) {
    nlohmann::ordered_json doc;
    doc["frame_window"] = frame_window;
    doc["alpha_used"] = alpha_used;
    doc["regions"] = nlohmann::ordered_json::array();
    for (const Region& r : set.regions) {
        nlohmann::ordered_json jr;
        jr["id"] = r.id;
        jr["area"] = r.area;
        jr["bbox"] = {r.bbox[0], r.bbox[1], r.bbox[2], r.bbox[3]};
        jr["centroid"] = {r.centroid[0], r.centroid[1]};
        jr["mean_phi"] = r.mean_phi;
        jr["max_phi"] = r.max_phi;
        doc["regions"].push_back(jr);
    }
    return doc.dump(2) + "\n";
}

namespace {

void write_window_outputs(const PipelineConfig& cfg, int window, const WindowAnalysis& win,
                          std::map<std::string, double>& stage_seconds) {
    const auto t0 = Clock::now();
    const std::filesystem::path& dir = cfg.output_dir;
    if (cfg.outputs.phi_map) {
        write_pfm(ScalarField(win.phi.shape, win.phi.phi), dir / window_name("phi", window, "pfm"));
    }
    if (cfg.outputs.phi_hat_map) {
        write_pfm(win.phi_hat, dir / window_name("phi_hat", window, "pfm"));
    }
    if (cfg.outputs.mask) {
        write_mask(win.mask, dir / window_name("mask", window, "pgm"));
    }
    if (cfg.outputs.regions_json) {
        std::ofstream out(dir / window_name("regions", window, "json"),
                          std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write regions json");
        out << regions_json(window, win.alpha, win.regions);
    }
    if (cfg.outputs.heatmap) {
        write_heatmap(ScalarField(win.phi.shape, win.phi.phi),
                      dir / window_name("heatmap", window, "pgm"));
    }
    stage_seconds["io"] += seconds_since(t0);
}

void write_timing_report(const PipelineConfig& cfg, const RunSummary& summary) {
    nlohmann::ordered_json doc;
    doc["windows_processed"] = summary.windows_processed;
    doc["regions_per_window"] = summary.regions_per_window;
    doc["stage_seconds"] = summary.stage_seconds;
    doc["pixels_per_second"] = summary.pixels_per_second;
    doc["warnings"] = summary.warnings;
    std::ofstream out(cfg.output_dir / "timing.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write timing report");
    out << doc.dump(2) << "\n";
}

// Streams per-frame velocity fields window by window; only the current
// window's flows stay resident, so memory is O(tau * frame size).
class WindowedAnalyzer {
public:
    WindowedAnalyzer(const PipelineConfig& cfg, RunSummary& summary)
        : cfg_(cfg), summary_(summary) {}

    void push_flow(VectorField2 flow) {
        if (cfg_.sliding) {
            ring_.push_back(std::move(flow));
            if (static_cast<int>(ring_.size()) > cfg_.tau) ring_.pop_front();
            if (static_cast<int>(ring_.size()) == cfg_.tau) {
                MeanFlowAccumulator acc(ring_.front().shape(), cfg_.tau);
                for (const VectorField2& f : ring_) acc.accumulate(f);
                emit(acc.finalize_mean());
            }
        } else {
            if (!acc_) acc_.emplace(flow.shape(), cfg_.tau);
            acc_->accumulate(flow);
            if (acc_->count() == cfg_.tau) {
                emit(acc_->finalize_mean());
                acc_.reset();
            }
        }
    }

    void finish() {
        if (!cfg_.sliding && acc_ && acc_->count() > 0) {
            summary_.warnings.push_back("trailing partial window of " +
                                        std::to_string(acc_->count()) + " flows skipped");
        }
    }

    std::int64_t pixels_analyzed() const { return pixels_; }

private:
    void emit(const VectorField2& mean) {
        WindowAnalysis win = analyze_window(mean, cfg_.advection_config(), cfg_.saliency);
        summary_.stage_seconds["advection"] += win.advection_seconds;
        summary_.stage_seconds["stability"] += win.stability_seconds;
        summary_.stage_seconds["saliency"] += win.saliency_seconds;
        if (!std::all_of(win.phi.phi.begin(), win.phi.phi.end(),
                         [](double v) { return std::isfinite(v); })) {
            throw NumericError("non-finite phi in window " +
                               std::to_string(summary_.windows_processed));
        }
        write_window_outputs(cfg_, summary_.windows_processed, win, summary_.stage_seconds);
        summary_.regions_per_window.push_back(static_cast<int>(win.regions.regions.size()));
        ++summary_.windows_processed;
        pixels_ += win.phi.shape.count();
    }

    const PipelineConfig& cfg_;
    RunSummary& summary_;
    std::deque<VectorField2> ring_;
    std::optional<MeanFlowAccumulator> acc_;
    std::int64_t pixels_ = 0;
};

}  // namespace

RunSummary run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    set_worker_count(cfg.workers);
    std::filesystem::create_directories(cfg.output_dir);

    RunSummary summary;
    WindowedAnalyzer analyzer(cfg, summary);
    const auto run_start = Clock::now();

    switch (cfg.input_kind) {
        case InputKind::frames: {
            const auto files = list_files_sorted(cfg.input, {".pgm", ".ppm", ".pnm"});
            if (files.size() < 2) {
                throw InputUnreadable("frame input needs at least 2 frames in " + cfg.input);
            }
            Frame prev = read_frame(files[0]);
            for (std::size_t i = 1; i < files.size(); ++i) {
                Frame next = read_frame(files[i]);
                if (!(next.shape == prev.shape)) {
                    throw FormatError(files[i].string(), 0,
                                      "frame shape differs from the sequence shape");
                }
                const auto t0 = Clock::now();
                VectorField2 flow = estimate_flow(prev, next, cfg.flow);
                summary.stage_seconds["flow"] += seconds_since(t0);
                analyzer.push_flow(std::move(flow));
                prev = std::move(next);
            }
            break;
        }
        case InputKind::flows: {
            const auto files = list_files_sorted(cfg.input, {".flo"});
            if (files.empty()) {
                throw InputUnreadable("no .flo files in " + cfg.input);
            }
            GridShape sequence_shape{};
            for (const auto& f : files) {
                VectorField2 flow = read_flo(f);
                if (sequence_shape.count() == 0) {
                    sequence_shape = flow.shape();
                } else if (!(flow.shape() == sequence_shape)) {
                    throw FormatError(f.string(), 4,
                                      "flow shape differs from the sequence shape");
                }
                analyzer.push_flow(std::move(flow));
            }
            break;
        }
        case InputKind::scene: {
            SceneSpec spec;
            if (std::filesystem::exists(cfg.input)) {
                std::ifstream in(cfg.input, std::ios::binary);
                if (!in) throw InputUnreadable("cannot open scene " + cfg.input);
                std::string text((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
                spec = parse_scene(text, cfg.input);
            } else if (is_builtin_scene(cfg.input)) {
                spec = builtin_scene(cfg.input);
            } else {
                throw InputUnreadable("scene not found (file or builtin): " + cfg.input);
            }
            auto [field, gt] = render_field(spec);
            (void)gt;
            // the scene field stands in for every per-frame flow estimate
            for (int w = 0; w < cfg.scene_windows; ++w) {
                for (int k = 0; k < cfg.tau; ++k) analyzer.push_flow(field);
            }
            break;
        }
    }

    analyzer.finish();
    const double total = seconds_since(run_start);
    summary.pixels_per_second =
        total > 0.0 ? static_cast<double>(analyzer.pixels_analyzed()) / total : 0.0;
    if (cfg.outputs.timing) {
        write_timing_report(cfg, summary);
    }
    return summary;
}

}  // namespace flowsal
