/// @file stability.hpp
/// @brief Flow-map Jacobian, Cauchy-Green max eigenvalue, instability exponent.
///
/// Per point the 2x2 Jacobian J of the flow map (final position with respect
/// to seed position) gives C = J^T J; the largest eigenvalue lambda of C
/// measures maximal local stretching over the horizon tau, and
///
///     phi = log(sqrt(lambda)) / tau = log(lambda) / (2 tau)
///
/// is the finite-time instability exponent. phi > 0 marks unstable points,
/// phi < 0 contraction; it is deliberately not clamped.

#pragma once

#include <vector>

#include "flowsal/advection.hpp"
#include "flowsal/field.hpp"

namespace flowsal {

struct JacobianField {
    GridShape shape;
    // dxt/dx0, dxt/dy0, dyt/dx0, dyt/dy0 (dimensionless)
    std::vector<double> j11, j12, j21, j22;
};

struct StabilityField {
    GridShape shape;
    std::vector<double> phi;  // 1/frames
    double tau = 1.0;

    double phi_at(int x, int y) const { return phi[shape.index(x, y)]; }
};

/// Central differences of the final positions with respect to seed
/// coordinates, divided by the seed spacing; one-sided at borders.
/// Throws GridTooSmall for seed grids under 2x2.
JacobianField jacobian_of_flow_map(const FlowMap& map);

/// Largest eigenvalue of C = J^T J via the closed form
/// (tr C + sqrt(tr^2 C - 4 det C)) / 2 with the discriminant clamped at 0
/// against rounding. Nonnegative everywhere.
ScalarField max_eigenvalue_ctc(const JacobianField& j);

/// phi = log(max(lambda, 1e-12)) / (2 tau). The floor keeps degenerate
/// compression finite; such points score strongly negative and never reach
/// a saliency threshold.
StabilityField stability_exponent(const ScalarField& lambda_field, double tau);

/// Pipeline convenience: advect -> Jacobian -> eigenvalue -> exponent.
StabilityField compute_stability(const VectorField2& field, const AdvectionConfig& cfg);

}  // namespace flowsal
