/// @file optical_flow.hpp
/// @brief Dense optical flow (pyramidal Horn-Schunck) and temporal mean flow.
///
/// The estimator minimizes a quadratic brightness-constancy data term plus a
/// quadratic smoothness term, coarse-to-fine over an image pyramid with
/// incremental warping, solved by red-black Gauss-Seidel sweeps with
/// over-relaxation. The front-end is pluggable: anything producing a dense
/// VectorField2 (including precomputed .flo files) can replace it.

#pragma once

#include <vector>

#include "flowsal/field.hpp"

namespace flowsal {

struct Frame {
    GridShape shape;
    std::vector<double> intensity;  // values in [0, 1]

    Frame() = default;
    Frame(GridShape shape, std::vector<double> intensity);

    double at(int x, int y) const { return intensity[shape.index(x, y)]; }
};

struct FlowParams {
    // Smoothness-vs-data balance. Calibrated as the classical Horn-Schunck
    // alpha against 8-bit intensity gradients; [0,1] inputs are rescaled
    // internally so this default lands at the standard operating point.
    double smoothness_weight = 40.0;
    int pyramid_levels = 3;
    double pyramid_scale = 0.5;     // in (0, 1)
    int iterations_per_level = 100;
    double convergence_eps = 1e-4;

    void validate() const;
};

/// Dense (u, v) with prev(x, y) ~ next(x + u, y + v). Deterministic for
/// fixed inputs and params, independent of the worker count.
/// Throws ShapeMismatch when the frames disagree.
VectorField2 estimate_flow(const Frame& prev, const Frame& next, const FlowParams& params);

/// Accumulates per-frame flow into the temporal mean over a tau-frame window.
class MeanFlowAccumulator {
public:
    MeanFlowAccumulator(GridShape shape, int tau);

    /// Throws WindowFull once tau flows have been added.
    void accumulate(const VectorField2& flow);

    /// (sum_u / tau, sum_v / tau). Throws WindowIncomplete before the
    /// window is full.
    VectorField2 finalize_mean() const;

    int tau() const { return tau_; }
    int count() const { return count_; }
    const GridShape& shape() const { return shape_; }

private:
    GridShape shape_;
    int tau_;
    int count_ = 0;
    std::vector<double> sum_u_, sum_v_;
};

}  // namespace flowsal
