/// @file synth.hpp
/// @brief Synthetic crowd-flow scenes with known ground truth.
///
/// A scene is a superposition of analytic velocity elements (lanes, saddle
/// disturbance, vortex, shear, bottleneck channel, counterflow band) plus
/// seeded noise patches. Scenes render either to a velocity field directly
/// or to textured frame sequences whose consecutive-frame optical flow is the
/// scene field to first order. Everything is deterministic under its seeds.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowsal/field.hpp"
#include "flowsal/optical_flow.hpp"

namespace flowsal {

struct BBox {
    int x = 0, y = 0, w = 0, h = 0;

    bool operator==(const BBox&) const = default;
};

/// Intersection over union of two axis-aligned boxes.
double bbox_iou(const BBox& a, const BBox& b);

enum class ElementKind {
    uniform_lane,
    saddle,
    rotation,
    shear,
    bottleneck_channel,
    counterflow_band,
    noise_patch,
};

const char* element_kind_name(ElementKind kind);

struct SceneElement {
    ElementKind kind = ElementKind::uniform_lane;
    std::optional<BBox> bbox;                       // box geometry
    std::optional<std::array<double, 3>> center;    // cx, cy, radius
    double magnitude = 1.0;
    std::array<double, 2> direction{1.0, 0.0};      // unit vector where applicable
    std::uint64_t rng_seed = 0;                     // required for noise_patch
};

struct SceneSpec {
    GridShape shape;
    std::vector<SceneElement> elements;

    bool operator==(const SceneSpec&) const;
};

struct GroundTruth {
    std::vector<BBox> salient_boxes;
    std::string analytic_field;  // compact closed-form descriptor, may be empty
};

/// Superimposes all element velocity contributions. Throws SpecOutOfBounds
/// when an element geometry leaves the frame, ConfigError for missing
/// required geometry or seeds.
std::pair<VectorField2, GroundTruth> render_field(const SceneSpec& spec);

/// Renders a seeded smoothed texture and warps it backward through the scene
/// field, one frame per time unit, with periodic wrapping. Needs n_frames >= 2.
std::vector<Frame> render_frames(const SceneSpec& spec, int n_frames,
                                 std::uint64_t texture_seed);

/// Human-editable scene text, round-trips through parse_scene.
std::string format_scene(const SceneSpec& spec);

/// Parses the scene text format. origin names the source in errors.
SceneSpec parse_scene(const std::string& text, const std::string& origin = "<scene>");

/// Canned fixtures: "noise-injection-64", "bottleneck-64", "counterflow-64",
/// "saddle-64". Unknown names throw ConfigError.
SceneSpec builtin_scene(const std::string& name);
bool is_builtin_scene(const std::string& name);
std::vector<std::string> builtin_scene_names();

}  // namespace flowsal
