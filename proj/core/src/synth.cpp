#include "flowsal/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "flowsal/advection.hpp"
#include "flowsal/parallel.hpp"

namespace flowsal {

namespace {

// counter-based RNG: stateless, platform-independent, partition-independent
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double hash_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(a ^ splitmix64(b ^ splitmix64(c))));
    return static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double smoothstep01(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

inline double smoothstep01_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 6.0 * t * (1.0 - t);
}

}  // namespace

double bbox_iou(const BBox& a, const BBox& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.w, b.x + b.w);
    const int y1 = std::min(a.y + a.h, b.y + b.h);
    const double inter = static_cast<double>(std::max(0, x1 - x0)) * std::max(0, y1 - y0);
    const double uni = static_cast<double>(a.w) * a.h + static_cast<double>(b.w) * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

const char* element_kind_name(ElementKind kind) {
    switch (kind) {
        case ElementKind::uniform_lane: return "uniform_lane";
        case ElementKind::saddle: return "saddle";
        case ElementKind::rotation: return "rotation";
        case ElementKind::shear: return "shear";
        case ElementKind::bottleneck_channel: return "bottleneck_channel";
        case ElementKind::counterflow_band: return "counterflow_band";
        case ElementKind::noise_patch: return "noise_patch";
    }
    return "?";
}

bool SceneSpec::operator==(const SceneSpec& other) const {
    if (!(shape == other.shape) || elements.size() != other.elements.size()) return false;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const SceneElement& a = elements[i];
        const SceneElement& b = other.elements[i];
        if (a.kind != b.kind || a.bbox != b.bbox || a.center != b.center ||
            a.magnitude != b.magnitude || a.direction != b.direction ||
            a.rng_seed != b.rng_seed) {
            return false;
        }
    }
    return true;
}

namespace {

void validate_element(const SceneElement& e, const GridShape& shape) {
    if (!std::isfinite(e.magnitude) || !std::isfinite(e.direction[0]) ||
        !std::isfinite(e.direction[1])) {
        throw ConfigError("element magnitude and direction must be finite");
    }
    if (e.bbox) {
        const BBox& b = *e.bbox;
        if (b.w <= 0 || b.h <= 0 || b.x < 0 || b.y < 0 || b.x + b.w > shape.width ||
            b.y + b.h > shape.height) {
            throw SpecOutOfBounds(std::string(element_kind_name(e.kind)) +
                                  " bbox leaves the frame");
        }
    }
    if (e.center) {
        const auto& c = *e.center;
        if (c[2] <= 0.0) throw ConfigError("element radius must be positive");
        if (c[0] - c[2] < 0 || c[0] + c[2] > shape.width - 1 || c[1] - c[2] < 0 ||
            c[1] + c[2] > shape.height - 1) {
            throw SpecOutOfBounds(std::string(element_kind_name(e.kind)) +
                                  " radius leaves the frame");
        }
    }
    switch (e.kind) {
        case ElementKind::noise_patch:
            if (!e.bbox) throw ConfigError("noise_patch needs a bbox");
            if (e.rng_seed == 0) throw ConfigError("noise_patch needs a nonzero rng_seed");
            break;
        case ElementKind::saddle:
        case ElementKind::rotation:
            if (!e.center) throw ConfigError("saddle/rotation need center + radius");
            break;
        case ElementKind::bottleneck_channel:
            if (!e.bbox) throw ConfigError("bottleneck_channel needs a bbox");
            if (!(e.direction[0] == 1.0 && e.direction[1] == 0.0)) {
                throw ConfigError("bottleneck_channel flows along +x (direction 1 0)");
            }
            break;
        case ElementKind::counterflow_band:
            if (!e.bbox) throw ConfigError("counterflow_band needs a bbox");
            break;
        default:
            break;
    }
}

// half-height profile of the bottleneck corridor and its x-derivative
struct ChannelProfile {
    double half_height;
    double d_half_height;
};

ChannelProfile bottleneck_profile(const BBox& b, double x) {
    const double hc = b.h / 2.0;
    const double hw = 2.0 * hc;
    const double lt = std::clamp(b.w * 0.5, 4.0, 12.0);
    const double x_in = b.x;
    const double x_out = b.x + b.w;
    if (x < x_in - lt || x > x_out + lt) return {hw, 0.0};
    if (x < x_in) {
        const double t = (x - (x_in - lt)) / lt;
        return {hw + (hc - hw) * smoothstep01(t), (hc - hw) * smoothstep01_deriv(t) / lt};
    }
    if (x <= x_out) return {hc, 0.0};
    const double t = (x - x_out) / lt;
    return {hc + (hw - hc) * smoothstep01(t), (hw - hc) * smoothstep01_deriv(t) / lt};
}

void add_element(const SceneElement& e, const GridShape& shape, VectorField2& field) {
    auto inside_bbox = [&e](int x, int y) {
        if (!e.bbox) return true;  // absent geometry means whole frame
        const BBox& b = *e.bbox;
        return x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h;
    };

    switch (e.kind) {
        case ElementKind::uniform_lane: {
            for (int y = 0; y < shape.height; ++y)
                for (int x = 0; x < shape.width; ++x)
                    if (inside_bbox(x, y)) {
                        field.u(x, y) += e.magnitude * e.direction[0];
                        field.v(x, y) += e.magnitude * e.direction[1];
                    }
            break;
        }
        case ElementKind::saddle:
        case ElementKind::rotation: {
            // localized disturbance: Gaussian envelope tied to the radius
            const double cx = (*e.center)[0], cy = (*e.center)[1], r = (*e.center)[2];
            for (int y = 0; y < shape.height; ++y)
                for (int x = 0; x < shape.width; ++x) {
                    const double dx = x - cx, dy = y - cy;
                    const double g = std::exp(-4.0 * (dx * dx + dy * dy) / (r * r));
                    if (e.kind == ElementKind::saddle) {
                        field.u(x, y) += e.magnitude * g * dx;
                        field.v(x, y) -= e.magnitude * g * dy;
                    } else {
                        field.u(x, y) -= e.magnitude * g * dy;
                        field.v(x, y) += e.magnitude * g * dx;
                    }
                }
            break;
        }
        case ElementKind::shear: {
            const double cy = e.bbox ? e.bbox->y + e.bbox->h / 2.0 : (shape.height - 1) / 2.0;
            for (int y = 0; y < shape.height; ++y)
                for (int x = 0; x < shape.width; ++x)
                    if (inside_bbox(x, y)) field.u(x, y) += e.magnitude * (y - cy);
            break;
        }
        case ElementKind::bottleneck_channel: {
            const BBox& b = *e.bbox;
            const double cy = b.y + b.h / 2.0;
            const double hw = b.h;  // 2 * channel half-height
            for (int y = 0; y < shape.height; ++y)
                for (int x = 0; x < shape.width; ++x) {
                    const auto [hh, dhh] = bottleneck_profile(b, static_cast<double>(x));
                    const double eta = (y - cy) / hh;
                    if (std::abs(eta) >= 1.0) continue;
                    const double profile = 1.0 - eta * eta;
                    // flux-conserving nozzle: u peaks at magnitude * hw / hh
                    field.u(x, y) += e.magnitude * (hw / hh) * profile;
                    field.v(x, y) += e.magnitude * hw * profile * eta * dhh / hh;
                }
            break;
        }
        case ElementKind::counterflow_band: {
            for (int y = 0; y < shape.height; ++y)
                for (int x = 0; x < shape.width; ++x) {
                    const double s = inside_bbox(x, y) ? -1.0 : 1.0;
                    field.u(x, y) += s * e.magnitude * e.direction[0];
                    field.v(x, y) += s * e.magnitude * e.direction[1];
                }
            break;
        }
        case ElementKind::noise_patch: {
            const BBox& b = *e.bbox;
            for (int y = b.y; y < b.y + b.h; ++y)
                for (int x = b.x; x < b.x + b.w; ++x) {
                    const std::uint64_t ux = static_cast<std::uint64_t>(x);
                    const std::uint64_t uy = static_cast<std::uint64_t>(y);
                    field.u(x, y) +=
                        e.magnitude * (2.0 * hash_unit(e.rng_seed, ux, uy, 0) - 1.0);
                    field.v(x, y) +=
                        e.magnitude * (2.0 * hash_unit(e.rng_seed, ux, uy, 1) - 1.0);
                }
            break;
        }
    }
}

void append_ground_truth(const SceneElement& e, const GridShape& shape, GroundTruth& gt) {
    auto clamp_box = [&shape](BBox b) {
        const int x0 = std::clamp(b.x, 0, shape.width - 1);
        const int y0 = std::clamp(b.y, 0, shape.height - 1);
        const int x1 = std::clamp(b.x + b.w, 1, shape.width);
        const int y1 = std::clamp(b.y + b.h, 1, shape.height);
        return BBox{x0, y0, x1 - x0, y1 - y0};
    };
    switch (e.kind) {
        case ElementKind::noise_patch:
            gt.salient_boxes.push_back(*e.bbox);
            break;
        case ElementKind::saddle: {
            const auto& c = *e.center;
            const int s = std::max(3, static_cast<int>(std::lround(c[2] / 2.0)));
            gt.salient_boxes.push_back(clamp_box(BBox{static_cast<int>(std::lround(c[0])) - s,
                                                      static_cast<int>(std::lround(c[1])) - s,
                                                      2 * s, 2 * s}));
            break;
        }
        case ElementKind::bottleneck_channel: {
            // the whole constriction: entry transition, channel, exit transition
            const BBox& b = *e.bbox;
            const int lt = static_cast<int>(std::lround(std::clamp(b.w * 0.5, 4.0, 12.0)));
            gt.salient_boxes.push_back(
                clamp_box(BBox{b.x - lt, b.y - 3, b.w + 2 * lt, b.h + 6}));
            break;
        }
        case ElementKind::counterflow_band: {
            // the two pixel rows (or columns) straddling each shear interface
            const BBox& b = *e.bbox;
            if (b.w >= b.h) {
                gt.salient_boxes.push_back(clamp_box(BBox{b.x, b.y - 1, b.w, 2}));
                gt.salient_boxes.push_back(clamp_box(BBox{b.x, b.y + b.h - 1, b.w, 2}));
            } else {
                gt.salient_boxes.push_back(clamp_box(BBox{b.x - 1, b.y, 2, b.h}));
                gt.salient_boxes.push_back(clamp_box(BBox{b.x + b.w - 1, b.y, 2, b.h}));
            }
            break;
        }
        default:
            break;
    }
}

}  // namespace

std::pair<VectorField2, GroundTruth> render_field(const SceneSpec& spec) {
    validate_shape(spec.shape);
    for (const SceneElement& e : spec.elements) validate_element(e, spec.shape);

    VectorField2 field(spec.shape);
    GroundTruth gt;
    for (const SceneElement& e : spec.elements) {
        add_element(e, spec.shape, field);
        append_ground_truth(e, spec.shape, gt);
    }
    gt.analytic_field = format_scene(spec);
    return {std::move(field), std::move(gt)};
}

namespace {

double sample_periodic(const ScalarField& f, double x, double y) {
    const int w = f.shape().width, h = f.shape().height;
    const double fx = std::floor(x), fy = std::floor(y);
    const double tx = x - fx, ty = y - fy;
    auto wrap = [](long i, int n) {
        long m = i % n;
        return static_cast<int>(m < 0 ? m + n : m);
    };
    const int x0 = wrap(static_cast<long>(fx), w), x1 = wrap(static_cast<long>(fx) + 1, w);
    const int y0 = wrap(static_cast<long>(fy), h), y1 = wrap(static_cast<long>(fy) + 1, h);
    return (1.0 - ty) * ((1.0 - tx) * f.at(x0, y0) + tx * f.at(x1, y0)) +
           ty * ((1.0 - tx) * f.at(x0, y1) + tx * f.at(x1, y1));
}

ScalarField smooth_periodic(const ScalarField& f) {
    static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const GridShape& s = f.shape();
    auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
    ScalarField tmp(s), out(s);
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
            double acc = 0.0;
            for (int t = -2; t <= 2; ++t) acc += k[t + 2] * f.at(wrap(x + t, s.width), y);
            tmp.at(x, y) = acc;
        }
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
            double acc = 0.0;
            for (int t = -2; t <= 2; ++t) acc += k[t + 2] * tmp.at(x, wrap(y + t, s.height));
            out.at(x, y) = acc;
        }
    return out;
}

ScalarField make_texture(GridShape shape, std::uint64_t seed) {
    ScalarField tex(shape);
    for (int y = 0; y < shape.height; ++y)
        for (int x = 0; x < shape.width; ++x)
            tex.at(x, y) = hash_unit(seed, static_cast<std::uint64_t>(x),
                                     static_cast<std::uint64_t>(y), 2);
    // ~4 px correlation length after repeated binomial smoothing
    for (int pass = 0; pass < 4; ++pass) tex = smooth_periodic(tex);
    const double lo = tex.min_value(), hi = tex.max_value();
    if (hi - lo < 1e-9) return ScalarField(shape, 0.5);
    for (double& v : tex.values()) v = 0.05 + 0.9 * (v - lo) / (hi - lo);
    return tex;
}

}  // namespace

std::vector<Frame> render_frames(const SceneSpec& spec, int n_frames,
                                 std::uint64_t texture_seed) {
    if (n_frames < 2) throw ConfigError("render_frames needs n_frames >= 2");
    auto [field, gt] = render_field(spec);
    (void)gt;
    VectorField2 reversed(spec.shape);
    for (std::size_t i = 0; i < field.u().size(); ++i) {
        reversed.u()[i] = -field.u()[i];
        reversed.v()[i] = -field.v()[i];
    }
    const ScalarField texture = make_texture(spec.shape, texture_seed);

    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(n_frames));
    std::vector<double> intensity(static_cast<std::size_t>(spec.shape.count()));
    for (int k = 0; k < n_frames; ++k) {
        if (k == 0) {
            frames.emplace_back(spec.shape, texture.values());
            continue;
        }
        // backtrack k frames through the frozen field, then look up texture
        const AdvectionConfig cfg(static_cast<double>(k), 0.25, 1, {BoundaryMode::clamp});
        parallel_for_chunks(spec.shape.height, [&](int row_begin, int row_end) {
            for (int y = row_begin; y < row_end; ++y)
                for (int x = 0; x < spec.shape.width; ++x) {
                    auto [bx, by] = advect_point(reversed, x, y, cfg);
                    intensity[spec.shape.index(x, y)] = sample_periodic(texture, bx, by);
                }
        });
        frames.emplace_back(spec.shape, intensity);
    }
    return frames;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace

std::string format_scene(const SceneSpec& spec) {
    std::ostringstream os;
    os << "size " << spec.shape.width << " " << spec.shape.height << "\n";
    for (const SceneElement& e : spec.elements) {
        os << "element " << element_kind_name(e.kind) << "\n";
        if (e.bbox) {
            os << "  bbox " << e.bbox->x << " " << e.bbox->y << " " << e.bbox->w << " "
               << e.bbox->h << "\n";
        }
        if (e.center) {
            os << "  center " << format_double((*e.center)[0]) << " "
               << format_double((*e.center)[1]) << " " << format_double((*e.center)[2]) << "\n";
        }
        os << "  magnitude " << format_double(e.magnitude) << "\n";
        if (e.direction[0] != 1.0 || e.direction[1] != 0.0) {
            os << "  direction " << format_double(e.direction[0]) << " "
               << format_double(e.direction[1]) << "\n";
        }
        if (e.kind == ElementKind::noise_patch) {
            os << "  seed " << e.rng_seed << "\n";
        }
        os << "end\n";
    }
    return os.str();
}

SceneSpec parse_scene(const std::string& text, const std::string& origin) {
    SceneSpec spec;
    bool have_size = false;
    bool in_element = false;
    SceneElement current;

    std::uint64_t line_start = 0;
    std::uint64_t offset = 0;
    std::istringstream is(text);
    std::string line;
    auto fail = [&](const std::string& msg) -> void {
        throw FormatError(origin, line_start, msg);
    };

    while (std::getline(is, line)) {
        line_start = offset;
        offset += line.size() + 1;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;

        if (key == "size") {
            if (!(ls >> spec.shape.width >> spec.shape.height)) fail("size needs two integers");
            have_size = true;
        } else if (key == "element") {
            if (in_element) fail("nested element block");
            std::string kind;
            if (!(ls >> kind)) fail("element needs a kind");
            bool known = false;
            for (ElementKind k :
                 {ElementKind::uniform_lane, ElementKind::saddle, ElementKind::rotation,
                  ElementKind::shear, ElementKind::bottleneck_channel,
                  ElementKind::counterflow_band, ElementKind::noise_patch}) {
                if (kind == element_kind_name(k)) {
                    current = SceneElement{};
                    current.kind = k;
                    known = true;
                    break;
                }
            }
            if (!known) fail("unknown element kind '" + kind + "'");
            in_element = true;
        } else if (key == "end") {
            if (!in_element) fail("'end' outside element block");
            spec.elements.push_back(current);
            in_element = false;
        } else if (in_element && key == "bbox") {
            BBox b;
            if (!(ls >> b.x >> b.y >> b.w >> b.h)) fail("bbox needs four integers");
            current.bbox = b;
        } else if (in_element && key == "center") {
            std::array<double, 3> c{};
            if (!(ls >> c[0] >> c[1] >> c[2])) fail("center needs cx cy radius");
            current.center = c;
        } else if (in_element && key == "magnitude") {
            if (!(ls >> current.magnitude)) fail("magnitude needs a number");
        } else if (in_element && key == "direction") {
            if (!(ls >> current.direction[0] >> current.direction[1])) {
                fail("direction needs two numbers");
            }
        } else if (in_element && key == "seed") {
            if (!(ls >> current.rng_seed)) fail("seed needs an integer");
        } else {
            fail("unexpected token '" + key + "'");
        }
    }
    if (in_element) fail("unterminated element block");
    if (!have_size) fail("missing 'size' line");
    validate_shape(spec.shape);
    return spec;
}

SceneSpec builtin_scene(const std::string& name) {
    SceneSpec spec;
    spec.shape = {64, 64};
    if (name == "noise-injection-64") {
        SceneElement lane;
        lane.kind = ElementKind::uniform_lane;
        lane.magnitude = 0.4;
        SceneElement noise;
        noise.kind = ElementKind::noise_patch;
        noise.bbox = BBox{22, 22, 20, 20};
        noise.magnitude = 0.6;
        noise.rng_seed = 7;
        spec.elements = {lane, noise};
    } else if (name == "bottleneck-64") {
        SceneElement chan;
        chan.kind = ElementKind::bottleneck_channel;
        chan.bbox = BBox{30, 26, 16, 12};
        chan.magnitude = 0.5;
        spec.elements = {chan};
    } else if (name == "counterflow-64") {
        SceneElement band;
        band.kind = ElementKind::counterflow_band;
        band.bbox = BBox{0, 24, 64, 16};
        band.magnitude = 0.4;
        spec.elements = {band};
    } else if (name == "saddle-64") {
        SceneElement sad;
        sad.kind = ElementKind::saddle;
        sad.center = {31.5, 31.5, 20.0};
        sad.magnitude = 0.3;
        spec.elements = {sad};
    } else {
        throw ConfigError("unknown builtin scene '" + name + "'");
    }
    return spec;
}

bool is_builtin_scene(const std::string& name) {
    for (const std::string& n : builtin_scene_names()) {
        if (n == name) return true;
    }
    return false;
}

std::vector<std::string> builtin_scene_names() {
    return {"noise-injection-64", "bottleneck-64", "counterflow-64", "saddle-64"};
}

}  // namespace flowsal
