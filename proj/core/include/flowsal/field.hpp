/// @file field.hpp
/// @brief Regular-grid scalar/vector fields, bilinear sampling, gradients.
///
/// Conventions used everywhere in flowsal:
///   - storage is row-major, index = y * width + x
///   - x points right, y points down (image convention)
///   - grid nodes sit at integer coordinates; units are pixels
///   - all scalars are double; file I/O may narrow to float32

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "flowsal/errors.hpp"

namespace flowsal {

struct GridShape {
    int width = 0;
    int height = 0;

    int count() const { return width * height; }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }
    bool contains(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    bool operator==(const GridShape&) const = default;
};

/// Finite differences need at least 2 samples per axis.
void validate_shape(const GridShape& shape);

enum class BoundaryMode { clamp, zero, reflect };

struct BoundaryPolicy {
    BoundaryMode mode = BoundaryMode::clamp;
};

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridShape shape, double fill = 0.0);
    ScalarField(GridShape shape, std::vector<double> values);

    const GridShape& shape() const { return shape_; }
    double at(int x, int y) const { return values_[shape_.index(x, y)]; }
    double& at(int x, int y) { return values_[shape_.index(x, y)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double min_value() const;
    double max_value() const;
    bool all_finite() const;

private:
    GridShape shape_;
    std::vector<double> values_;
};

class VectorField2 {
public:
    VectorField2() = default;
    explicit VectorField2(GridShape shape, double u0 = 0.0, double v0 = 0.0);
    VectorField2(GridShape shape, std::vector<double> u, std::vector<double> v);

    const GridShape& shape() const { return shape_; }
    double u(int x, int y) const { return u_[shape_.index(x, y)]; }
    double v(int x, int y) const { return v_[shape_.index(x, y)]; }
    double& u(int x, int y) { return u_[shape_.index(x, y)]; }
    double& v(int x, int y) { return v_[shape_.index(x, y)]; }
    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& v() const { return v_; }
    std::vector<double>& u() { return u_; }
    std::vector<double>& v() { return v_; }

    bool all_finite() const;
    double max_speed() const;

private:
    GridShape shape_;
    std::vector<double> u_, v_;
};

/// Bilinear interpolation of (u, v) at real coordinates. Out-of-domain
/// lookups are resolved per policy; total by construction.
std::pair<double, double> sample_bilinear(const VectorField2& field, double x, double y,
                                          BoundaryPolicy policy = {});

double sample_bilinear(const ScalarField& field, double x, double y,
                       BoundaryPolicy policy = {});

/// Central differences in the interior, one-sided at borders.
/// Returns (d/dx, d/dy). Grid spacing is 1 pixel.
std::pair<ScalarField, ScalarField> gradient_central(const ScalarField& field);

}  // namespace flowsal
