#include "flowsal/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace flowsal {

void validate_shape(const GridShape& shape) {
    if (shape.width < 2 || shape.height < 2) {
        throw ConfigError("grid shape must be at least 2x2, got " +
                          std::to_string(shape.width) + "x" + std::to_string(shape.height));
    }
}

ScalarField::ScalarField(GridShape shape, double fill)
    : shape_(shape), values_(static_cast<std::size_t>(shape.count()), fill) {
    validate_shape(shape);
}

ScalarField::ScalarField(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
    validate_shape(shape);
    if (values_.size() != static_cast<std::size_t>(shape.count())) {
        throw ConfigError("scalar field data length does not match shape");
    }
}

double ScalarField::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
}

VectorField2::VectorField2(GridShape shape, double u0, double v0)
    : shape_(shape),
      u_(static_cast<std::size_t>(shape.count()), u0),
      v_(static_cast<std::size_t>(shape.count()), v0) {
    validate_shape(shape);
}

VectorField2::VectorField2(GridShape shape, std::vector<double> u, std::vector<double> v)
    : shape_(shape), u_(std::move(u)), v_(std::move(v)) {
    validate_shape(shape);
    if (u_.size() != static_cast<std::size_t>(shape.count()) || v_.size() != u_.size()) {
        throw ConfigError("vector field data length does not match shape");
    }
}

bool VectorField2::all_finite() const {
    auto finite = [](double v) { return std::isfinite(v); };
    return std::all_of(u_.begin(), u_.end(), finite) &&
           std::all_of(v_.begin(), v_.end(), finite);
}

double VectorField2::max_speed() const {
    double m = 0.0;
    for (std::size_t i = 0; i < u_.size(); ++i) {
        m = std::max(m, std::hypot(u_[i], v_[i]));
    }
    return m;
}

namespace {

// Resolves a node index per boundary policy. Returns false when the node
// contributes zero (zero-padding mode only).
inline bool resolve_index(int i, int n, BoundaryMode mode, int& out) {
    if (i >= 0 && i < n) {
        out = i;
        return true;
    }
    switch (mode) {
        case BoundaryMode::clamp:
            out = std::clamp(i, 0, n - 1);
            return true;
        case BoundaryMode::zero:
            return false;
        case BoundaryMode::reflect: {
            // mirror about edge nodes: -1 -> 1, n -> n-2
            if (n == 1) {
                out = 0;
                return true;
            }
            int period = 2 * (n - 1);
            int m = i % period;
            if (m < 0) m += period;
            out = m < n ? m : period - m;
            return true;
        }
    }
    out = 0;
    return false;
}

struct BilinearStencil {
    // node indices; valid=false means the node reads as zero
    int x[2] = {0, 0};
    int y[2] = {0, 0};
    bool x_valid[2] = {false, false};
    bool y_valid[2] = {false, false};
    double wx[2] = {0.0, 0.0};
    double wy[2] = {0.0, 0.0};
};

inline BilinearStencil make_stencil(const GridShape& shape, double x, double y,
                                    BoundaryPolicy policy) {
    BilinearStencil s;
    double fx = std::floor(x);
    double fy = std::floor(y);
    int x0 = static_cast<int>(fx);
    int y0 = static_cast<int>(fy);
    double tx = x - fx;
    double ty = y - fy;
    s.wx[0] = 1.0 - tx;
    s.wx[1] = tx;
    s.wy[0] = 1.0 - ty;
    s.wy[1] = ty;
    s.x_valid[0] = resolve_index(x0, shape.width, policy.mode, s.x[0]);
    s.x_valid[1] = resolve_index(x0 + 1, shape.width, policy.mode, s.x[1]);
    s.y_valid[0] = resolve_index(y0, shape.height, policy.mode, s.y[0]);
    s.y_valid[1] = resolve_index(y0 + 1, shape.height, policy.mode, s.y[1]);
    return s;
}

template <typename Fetch>
inline double blend(const BilinearStencil& s, Fetch&& fetch) {
    double acc = 0.0;
    for (int j = 0; j < 2; ++j) {
        if (!s.y_valid[j] || s.wy[j] == 0.0) continue;
        double row = 0.0;
        for (int i = 0; i < 2; ++i) {
            if (!s.x_valid[i] || s.wx[i] == 0.0) continue;
            row += s.wx[i] * fetch(s.x[i], s.y[j]);
        }
        acc += s.wy[j] * row;
    }
    return acc;
}

}  // namespace

std::pair<double, double> sample_bilinear(const VectorField2& field, double x, double y,
                                          BoundaryPolicy policy) {
    BilinearStencil s = make_stencil(field.shape(), x, y, policy);
    double u = blend(s, [&field](int xi, int yi) { return field.u(xi, yi); });
    double v = blend(s, [&field](int xi, int yi) { return field.v(xi, yi); });
    return {u, v};
}

double sample_bilinear(const ScalarField& field, double x, double y, BoundaryPolicy policy) {
    BilinearStencil s = make_stencil(field.shape(), x, y, policy);
    return blend(s, [&field](int xi, int yi) { return field.at(xi, yi); });
}

std::pair<ScalarField, ScalarField> gradient_central(const ScalarField& field) {
    const GridShape& shape = field.shape();
    ScalarField dx(shape);
    ScalarField dy(shape);
    for (int y = 0; y < shape.height; ++y) {
        for (int x = 0; x < shape.width; ++x) {
            double gx;
            if (x == 0) {
                gx = field.at(1, y) - field.at(0, y);
            } else if (x == shape.width - 1) {
                gx = field.at(x, y) - field.at(x - 1, y);
            } else {
                gx = 0.5 * (field.at(x + 1, y) - field.at(x - 1, y));
            }
            double gy;
            if (y == 0) {
                gy = field.at(x, 1) - field.at(x, 0);
            } else if (y == shape.height - 1) {
                gy = field.at(x, y) - field.at(x, y - 1);
            } else {
                gy = 0.5 * (field.at(x, y + 1) - field.at(x, y - 1));
            }
            dx.at(x, y) = gx;
            dy.at(x, y) = gy;
        }
    }
    return {std::move(dx), std::move(dy)};
}

}  // namespace flowsal
