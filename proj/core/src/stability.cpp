#include "flowsal/stability.hpp"

#include <cmath>

#include "flowsal/parallel.hpp"

namespace flowsal {

namespace {
constexpr double kLambdaFloor = 1e-12;

// One axis of the finite-difference table: central in the interior,
// one-sided at the borders.
inline double diff_along_x(const std::vector<double>& f, const GridShape& s, int x, int y,
                           double spacing) {
    if (x == 0) return (f[s.index(1, y)] - f[s.index(0, y)]) / spacing;
    if (x == s.width - 1) return (f[s.index(x, y)] - f[s.index(x - 1, y)]) / spacing;
    return (f[s.index(x + 1, y)] - f[s.index(x - 1, y)]) / (2.0 * spacing);
}

inline double diff_along_y(const std::vector<double>& f, const GridShape& s, int x, int y,
                           double spacing) {
    if (y == 0) return (f[s.index(x, 1)] - f[s.index(x, 0)]) / spacing;
    if (y == s.height - 1) return (f[s.index(x, y)] - f[s.index(x, y - 1)]) / spacing;
    return (f[s.index(x, y + 1)] - f[s.index(x, y - 1)]) / (2.0 * spacing);
}
}  // namespace

JacobianField jacobian_of_flow_map(const FlowMap& map) {
    const GridShape& s = map.seed_shape;
    if (s.width < 2 || s.height < 2) {
        throw GridTooSmall("flow-map Jacobian needs a seed grid of at least 2x2");
    }
    const double spacing = static_cast<double>(map.seed_stride);
    JacobianField jf;
    jf.shape = s;
    const std::size_t n = static_cast<std::size_t>(s.count());
    jf.j11.resize(n);
    jf.j12.resize(n);
    jf.j21.resize(n);
    jf.j22.resize(n);

    parallel_for_chunks(s.height, [&](int row_begin, int row_end) {
        for (int y = row_begin; y < row_end; ++y) {
            for (int x = 0; x < s.width; ++x) {
                std::size_t i = s.index(x, y);
                jf.j11[i] = diff_along_x(map.x_final, s, x, y, spacing);
                jf.j12[i] = diff_along_y(map.x_final, s, x, y, spacing);
                jf.j21[i] = diff_along_x(map.y_final, s, x, y, spacing);
                jf.j22[i] = diff_along_y(map.y_final, s, x, y, spacing);
            }
        }
    });
    return jf;
}

ScalarField max_eigenvalue_ctc(const JacobianField& j) {
    ScalarField lambda(j.shape);
    std::vector<double>& out = lambda.values();
    const std::size_t n = out.size();

    parallel_for_chunks(static_cast<int>(n), [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const double a = j.j11[i], b = j.j12[i], c = j.j21[i], d = j.j22[i];
            // C = J^T J, symmetric positive semidefinite
            const double c11 = a * a + c * c;
            const double c12 = a * b + c * d;
            const double c22 = b * b + d * d;
            const double tr = c11 + c22;
            const double det = c11 * c22 - c12 * c12;
            double disc = tr * tr - 4.0 * det;
            if (disc < 0.0) disc = 0.0;
            out[static_cast<std::size_t>(i)] = 0.5 * (tr + std::sqrt(disc));
        }
    });
    return lambda;
}

StabilityField stability_exponent(const ScalarField& lambda_field, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ConfigError("stability exponent needs tau > 0");
    }
    StabilityField sf;
    sf.shape = lambda_field.shape();
    sf.tau = tau;
    const std::vector<double>& lam = lambda_field.values();
    sf.phi.resize(lam.size());
    const double inv_2tau = 1.0 / (2.0 * tau);

    parallel_for_chunks(static_cast<int>(lam.size()), [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            double l = lam[static_cast<std::size_t>(i)];
            if (l < kLambdaFloor) l = kLambdaFloor;
            sf.phi[static_cast<std::size_t>(i)] = std::log(l) * inv_2tau;
        }
    });
    return sf;
}

StabilityField compute_stability(const VectorField2& field, const AdvectionConfig& cfg) {
    FlowMap map = advect_grid(field, cfg);
    JacobianField jac = jacobian_of_flow_map(map);
    ScalarField lambda = max_eigenvalue_ctc(jac);
    return stability_exponent(lambda, cfg.horizon_tau());
}

}  // namespace flowsal
