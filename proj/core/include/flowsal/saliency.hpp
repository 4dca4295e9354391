/// @file saliency.hpp
/// @brief Instability magnification, two-stage segmentation, region extraction.
///
/// The magnification map is piecewise linear and intentionally discontinuous
/// at the threshold:
///
///     phi_hat = beta * phi        if phi >= alpha
///     phi_hat = (1 - beta) * phi  otherwise
///
/// with beta in (0.5, 1] so above-threshold responses are amplified relative
/// to suppressed ones. Segmentation combines a global (coarse) threshold at
/// beta * alpha with a local (fine) mean + k * stddev window test. Only
/// strictly positive phi_hat can be salient: instability requires
/// log lambda > 0, so neutral and contracting points never enter a mask.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "flowsal/field.hpp"
#include "flowsal/stability.hpp"

namespace flowsal {

enum class AlphaMode { fixed, percentile, otsu };
enum class CombineMode { set_union, set_intersection };

struct SaliencyConfig {
    double beta = 0.8;                     // magnification factor, (0.5, 1]
    AlphaMode alpha_mode = AlphaMode::percentile;
    double alpha_value = 90.0;             // threshold (fixed) or percentile in (0,100)
    int local_window = 15;                 // odd, >= 3
    double local_k = 2.0;                  // local threshold = mean + k * stddev
    int min_region_area = 25;              // pixels
    CombineMode combine_mode = CombineMode::set_union;

    void validate() const;
};

struct Region {
    int id = 0;
    int area = 0;                          // pixels
    std::array<int, 4> bbox{0, 0, 0, 0};   // x, y, w, h
    std::array<double, 2> centroid{0, 0};
    double mean_phi = 0.0;
    double max_phi = 0.0;
};

struct SalientRegionSet {
    GridShape shape;
    std::vector<std::int32_t> labels;      // 0 = background, k >= 1 = region id
    std::vector<Region> regions;           // ids dense 1..N, descending mean_phi
};

/// Piecewise magnification; the boundary phi == alpha belongs to the
/// amplified branch.
ScalarField magnify(const StabilityField& phi, const SaliencyConfig& cfg, double alpha);

/// Threshold selection. fixed returns alpha_value; percentile interpolates
/// order statistics of the phi distribution; otsu maximizes between-class
/// variance over a 256-bin histogram spanning [min phi, max phi].
/// Throws DegenerateField in percentile/otsu mode when max - min < 1e-12.
double select_alpha(const StabilityField& phi, const SaliencyConfig& cfg);

/// Two-stage segmentation of the magnified field. Returns a 0/1 field.
ScalarField segment(const ScalarField& phi_hat, const SaliencyConfig& cfg, double alpha);

/// 8-connected component labeling with an area filter. Descriptors are
/// computed from raw phi, not phi_hat, so reported scores are physical.
SalientRegionSet extract_regions(const ScalarField& mask, const StabilityField& phi,
                                 const SaliencyConfig& cfg);

}  // namespace flowsal
