/// @file pipeline.hpp
/// @brief Window-by-window orchestration: ingest frames, flow files, or a
/// scene spec; run mean flow -> advection -> stability -> saliency; emit
/// phi maps, masks, region JSON, heatmaps, and a timing report.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flowsal/advection.hpp"
#include "flowsal/optical_flow.hpp"
#include "flowsal/saliency.hpp"
#include "flowsal/stability.hpp"
#include "flowsal/synth.hpp"

namespace flowsal {

enum class InputKind { frames, flows, scene };

struct OutputSelect {
    bool phi_map = true;
    bool phi_hat_map = false;
    bool mask = true;
    bool regions_json = true;
    bool heatmap = false;
    bool timing = false;
};

struct PipelineConfig {
    InputKind input_kind = InputKind::frames;
    std::string input;                    // directory, scene file, or builtin scene name
    std::filesystem::path output_dir = ".";
    int tau = 10;                         // accumulation window, frames
    bool sliding = false;                 // tumbling windows by default
    int scene_windows = 1;                // windows to emit for scene input
    FlowParams flow;
    double horizon_tau = 0.0;             // <= 0 keeps the accumulation tau
    double step_h = 0.25;
    int seed_stride = 1;
    BoundaryMode boundary = BoundaryMode::clamp;
    SaliencyConfig saliency;
    OutputSelect outputs;
    int workers = 0;                      // 0 = hardware concurrency

    AdvectionConfig advection_config() const;
    void validate() const;
};

/// Stage results for one window; also the unit the composition tests check.
struct WindowAnalysis {
    VectorField2 mean_flow;
    StabilityField phi;
    double alpha = 0.0;
    bool alpha_fallback = false;  // percentile/otsu degenerated to fixed
    ScalarField phi_hat;
    ScalarField mask;
    SalientRegionSet regions;
    double advection_seconds = 0.0;
    double stability_seconds = 0.0;
    double saliency_seconds = 0.0;
};

/// Runs stability + saliency on a finished mean field. Pure composition of
/// the module operations; run_pipeline adds only ingestion and output.
WindowAnalysis analyze_window(const VectorField2& mean_field, const AdvectionConfig& advection,
                              const SaliencyConfig& saliency);

/// Region-set JSON document for one window (the serialized interchange
/// format: frame_window, alpha_used, regions[]).
std::string regions_json(int frame_window, double alpha_used, const SalientRegionSet& regions);

struct RunSummary {
    int windows_processed = 0;
    std::vector<int> regions_per_window;
    std::map<std::string, double> stage_seconds;  // flow, advection, stability, saliency, io
    double pixels_per_second = 0.0;
    std::vector<std::string> warnings;
};

/// Full pipeline. Writes the requested artifacts under output_dir using
/// window-indexed names (phi_0000.pfm, mask_0000.pgm, regions_0000.json, ...).
RunSummary run_pipeline(const PipelineConfig& cfg);

}  // namespace flowsal
