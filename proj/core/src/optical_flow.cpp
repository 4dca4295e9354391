#include "flowsal/optical_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowsal/parallel.hpp"

namespace flowsal {

namespace {
constexpr double kIntensityScale = 255.0;  // normalize gradients to the 8-bit scale
constexpr int kMinLevelDim = 12;
constexpr double kOmega = 1.9;  // SOR over-relaxation
constexpr int kWarpRounds = 5;
}  // namespace

Frame::Frame(GridShape shape, std::vector<double> intensity_in)
    : shape(shape), intensity(std::move(intensity_in)) {
    validate_shape(shape);
    if (intensity.size() != static_cast<std::size_t>(shape.count())) {
        throw ConfigError("frame data length does not match shape");
    }
    for (double v : intensity) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError("frame intensities must lie in [0, 1]");
        }
    }
}

void FlowParams::validate() const {
    if (!(smoothness_weight > 0.0)) throw ConfigError("smoothness_weight must be positive");
    if (pyramid_levels < 1) throw ConfigError("pyramid_levels must be >= 1");
    if (!(pyramid_scale > 0.0 && pyramid_scale < 1.0)) {
        throw ConfigError("pyramid_scale must lie in (0, 1)");
    }
    if (iterations_per_level < 1) throw ConfigError("iterations_per_level must be >= 1");
    if (!(convergence_eps > 0.0)) throw ConfigError("convergence_eps must be positive");
}

namespace {

ScalarField smooth_binomial(const ScalarField& f) {
    // separable [1 4 6 4 1]/16, clamped at the borders
    static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const GridShape& s = f.shape();
    ScalarField tmp(s), out(s);
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            double acc = 0.0;
            for (int t = -2; t <= 2; ++t) {
                acc += k[t + 2] * f.at(std::clamp(x + t, 0, s.width - 1), y);
            }
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            double acc = 0.0;
            for (int t = -2; t <= 2; ++t) {
                acc += k[t + 2] * tmp.at(x, std::clamp(y + t, 0, s.height - 1));
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

// factor-anchored resampling (coarse node k reads fine position k * ratio),
// so integer-translated content stays integer-translated across levels
ScalarField resample(const ScalarField& f, GridShape target) {
    ScalarField out(target);
    const double rx = static_cast<double>(f.shape().width) / target.width;
    const double ry = static_cast<double>(f.shape().height) / target.height;
    for (int y = 0; y < target.height; ++y) {
        for (int x = 0; x < target.width; ++x) {
            out.at(x, y) = sample_bilinear(f, x * rx, y * ry, {BoundaryMode::clamp});
        }
    }
    return out;
}

std::vector<GridShape> pyramid_shapes(GridShape base, const FlowParams& p) {
    std::vector<GridShape> shapes{base};
    for (int l = 1; l < p.pyramid_levels; ++l) {
        const GridShape& prev = shapes.back();
        GridShape next{static_cast<int>(std::lround(prev.width * p.pyramid_scale)),
                       static_cast<int>(std::lround(prev.height * p.pyramid_scale))};
        if (next.width < kMinLevelDim || next.height < kMinLevelDim) break;
        if (next.width >= prev.width || next.height >= prev.height) break;
        shapes.push_back(next);
    }
    return shapes;
}

std::vector<ScalarField> build_pyramid(const ScalarField& base,
                                       const std::vector<GridShape>& shapes) {
    std::vector<ScalarField> pyr{base};
    for (std::size_t l = 1; l < shapes.size(); ++l) {
        pyr.push_back(resample(smooth_binomial(pyr.back()), shapes[l]));
    }
    return pyr;
}

struct LevelBuffers {
    ScalarField warped, ix, iy, it;
};

void warp_and_derive(const ScalarField& i1, const ScalarField& i2, const std::vector<double>& u,
                     const std::vector<double>& v, LevelBuffers& buf) {
    const GridShape& s = i1.shape();
    parallel_for_chunks(s.height, [&](int row_begin, int row_end) {
        for (int y = row_begin; y < row_end; ++y) {
            for (int x = 0; x < s.width; ++x) {
                const std::size_t i = s.index(x, y);
                buf.warped.at(x, y) =
                    sample_bilinear(i2, x + u[i], y + v[i], {BoundaryMode::clamp});
            }
        }
    });
    // derivatives of the frame average, temporal difference after warping
    parallel_for_chunks(s.height, [&](int row_begin, int row_end) {
        for (int y = row_begin; y < row_end; ++y) {
            for (int x = 0; x < s.width; ++x) {
                auto avg = [&](int ax, int ay) {
                    return 0.5 * (i1.at(ax, ay) + buf.warped.at(ax, ay));
                };
                double gx;
                if (x == 0) {
                    gx = avg(1, y) - avg(0, y);
                } else if (x == s.width - 1) {
                    gx = avg(x, y) - avg(x - 1, y);
                } else {
                    gx = 0.5 * (avg(x + 1, y) - avg(x - 1, y));
                }
                double gy;
                if (y == 0) {
                    gy = avg(x, 1) - avg(x, 0);
                } else if (y == s.height - 1) {
                    gy = avg(x, y) - avg(x, y - 1);
                } else {
                    gy = 0.5 * (avg(x, y + 1) - avg(x, y - 1));
                }
                buf.ix.at(x, y) = gx;
                buf.iy.at(x, y) = gy;
                buf.it.at(x, y) = buf.warped.at(x, y) - i1.at(x, y);
            }
        }
    });
}

// One red-black SOR sweep of the coupled increment system. Returns the max
// absolute update, a deterministic reduction (max is order-independent).
double sor_sweep(const LevelBuffers& buf, double alpha2, std::vector<double>& du,
                 std::vector<double>& dv) {
    const GridShape& s = buf.ix.shape();
    double sweep_max = 0.0;
    for (int parity = 0; parity < 2; ++parity) {
        std::vector<double> chunk_max(static_cast<std::size_t>(s.height), 0.0);
        parallel_for_chunks(s.height, [&](int row_begin, int row_end) {
            for (int y = row_begin; y < row_end; ++y) {
                double local = 0.0;
                for (int x = (y + parity) & 1; x < s.width; x += 2) {
                    const std::size_t i = s.index(x, y);
                    double su = 0.0, sv = 0.0;
                    int n = 0;
                    if (x > 0) {
                        su += du[i - 1];
                        sv += dv[i - 1];
                        ++n;
                    }
                    if (x < s.width - 1) {
                        su += du[i + 1];
                        sv += dv[i + 1];
                        ++n;
                    }
                    if (y > 0) {
                        const std::size_t q = i - static_cast<std::size_t>(s.width);
                        su += du[q];
                        sv += dv[q];
                        ++n;
                    }
                    if (y < s.height - 1) {
                        const std::size_t q = i + static_cast<std::size_t>(s.width);
                        su += du[q];
                        sv += dv[q];
                        ++n;
                    }
                    const double ix = buf.ix.values()[i];
                    const double iy = buf.iy.values()[i];
                    const double it = buf.it.values()[i];
                    const double an = alpha2 * n;
                    const double a11 = ix * ix + an;
                    const double a22 = iy * iy + an;
                    const double a12 = ix * iy;
                    const double b1 = alpha2 * su - ix * it;
                    const double b2 = alpha2 * sv - iy * it;
                    const double det = a11 * a22 - a12 * a12;
                    const double nu = (b1 * a22 - b2 * a12) / det;
                    const double nv = (b2 * a11 - b1 * a12) / det;
                    const double eu = du[i] + kOmega * (nu - du[i]);
                    const double ev = dv[i] + kOmega * (nv - dv[i]);
                    local = std::max(local, std::abs(eu - du[i]));
                    local = std::max(local, std::abs(ev - dv[i]));
                    du[i] = eu;
                    dv[i] = ev;
                }
                chunk_max[static_cast<std::size_t>(y)] = std::max(chunk_max[static_cast<std::size_t>(y)], local);
            }
        });
        for (double m : chunk_max) sweep_max = std::max(sweep_max, m);
    }
    return sweep_max;
}

}  // namespace

VectorField2 estimate_flow(const Frame& prev, const Frame& next, const FlowParams& params) {
    params.validate();
    if (!(prev.shape == next.shape)) {
        throw ShapeMismatch("frame shapes differ: " + std::to_string(prev.shape.width) + "x" +
                            std::to_string(prev.shape.height) + " vs " +
                            std::to_string(next.shape.width) + "x" +
                            std::to_string(next.shape.height));
    }

    const GridShape base = prev.shape;
    ScalarField i1(base), i2(base);
    for (std::size_t i = 0; i < prev.intensity.size(); ++i) {
        i1.values()[i] = prev.intensity[i] * kIntensityScale;
        i2.values()[i] = next.intensity[i] * kIntensityScale;
    }

    const std::vector<GridShape> shapes = pyramid_shapes(base, params);
    const std::vector<ScalarField> pyr1 = build_pyramid(i1, shapes);
    const std::vector<ScalarField> pyr2 = build_pyramid(i2, shapes);
    const double alpha2 = params.smoothness_weight * params.smoothness_weight;

    std::vector<double> u, v;
    for (int level = static_cast<int>(shapes.size()) - 1; level >= 0; --level) {
        const GridShape& s = shapes[static_cast<std::size_t>(level)];
        const std::size_t n = static_cast<std::size_t>(s.count());

        if (level == static_cast<int>(shapes.size()) - 1) {
            u.assign(n, 0.0);
            v.assign(n, 0.0);
        } else {
            // upsample previous level's flow, rescaling displacements
            const GridShape& cs = shapes[static_cast<std::size_t>(level) + 1];
            ScalarField cu(cs, std::move(u)), cv(cs, std::move(v));
            const double rx = static_cast<double>(s.width) / cs.width;
            const double ry = static_cast<double>(s.height) / cs.height;
            u.assign(n, 0.0);
            v.assign(n, 0.0);
            for (int y = 0; y < s.height; ++y) {
                for (int x = 0; x < s.width; ++x) {
                    const std::size_t i = s.index(x, y);
                    u[i] = rx * sample_bilinear(cu, x / rx, y / ry, {BoundaryMode::clamp});
                    v[i] = ry * sample_bilinear(cv, x / rx, y / ry, {BoundaryMode::clamp});
                }
            }
        }

        LevelBuffers buf{ScalarField(s), ScalarField(s), ScalarField(s), ScalarField(s)};
        std::vector<double> du(n, 0.0), dv(n, 0.0);
        const int rounds = std::min(kWarpRounds, params.iterations_per_level);
        const int inner = (params.iterations_per_level + rounds - 1) / rounds;
        const ScalarField& l1 = pyr1[static_cast<std::size_t>(level)];
        const ScalarField& l2 = pyr2[static_cast<std::size_t>(level)];

        for (int round = 0; round < rounds; ++round) {
            warp_and_derive(l1, l2, u, v, buf);
            std::fill(du.begin(), du.end(), 0.0);
            std::fill(dv.begin(), dv.end(), 0.0);
            double change = 0.0;
            for (int it = 0; it < inner; ++it) {
                change = sor_sweep(buf, alpha2, du, dv);
                if (change < params.convergence_eps) break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                u[i] += du[i];
                v[i] += dv[i];
            }
            if (change < params.convergence_eps && round > 0) break;
        }
    }

    VectorField2 flow(base, std::move(u), std::move(v));
    if (!flow.all_finite()) {
        throw NumericError("optical flow produced non-finite values");
    }
    return flow;
}

MeanFlowAccumulator::MeanFlowAccumulator(GridShape shape, int tau)
    : shape_(shape), tau_(tau) {
    validate_shape(shape);
    if (tau < 1) throw ConfigError("accumulator window tau must be >= 1");
    sum_u_.assign(static_cast<std::size_t>(shape.count()), 0.0);
    sum_v_.assign(sum_u_.size(), 0.0);
}

void MeanFlowAccumulator::accumulate(const VectorField2& flow) {
    if (count_ >= tau_) {
        throw WindowFull("accumulator already holds tau = " + std::to_string(tau_) + " flows");
    }
    if (!(flow.shape() == shape_)) {
        throw ShapeMismatch("flow shape does not match accumulator shape");
    }
    for (std::size_t i = 0; i < sum_u_.size(); ++i) {
        sum_u_[i] += flow.u()[i];
        sum_v_[i] += flow.v()[i];
    }
    ++count_;
}

VectorField2 MeanFlowAccumulator::finalize_mean() const {
    if (count_ < tau_) {
        throw WindowIncomplete("accumulator holds " + std::to_string(count_) + " of " +
                               std::to_string(tau_) + " flows");
    }
    VectorField2 mean(shape_);
    const double inv = 1.0 / static_cast<double>(tau_);
    for (std::size_t i = 0; i < sum_u_.size(); ++i) {
        mean.u()[i] = sum_u_[i] * inv;
        mean.v()[i] = sum_v_[i] * inv;
    }
    return mean;
}

}  // namespace flowsal
