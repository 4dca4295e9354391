#include "flowsal/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flowsal/parallel.hpp"

namespace flowsal {

namespace {
constexpr double kDegenerateRange = 1e-12;
constexpr double kLocalMargin = 1e-9;
// instability means log lambda > 0; values under the rounding floor are
// numerically neutral (lambda == 1 up to double precision)
constexpr double kInstabilityFloor = 1e-12;
}  // namespace

void SaliencyConfig::validate() const {
    if (!(beta > 0.5) || !(beta <= 1.0)) {
        throw ConfigError("beta must lie in (0.5, 1]");
    }
    if (local_window < 3 || local_window % 2 == 0) {
        throw ConfigError("local_window must be an odd integer >= 3");
    }
    if (min_region_area < 1) {
        throw ConfigError("min_region_area must be >= 1");
    }
    if (alpha_mode == AlphaMode::percentile &&
        !(alpha_value > 0.0 && alpha_value < 100.0)) {
        throw ConfigError("percentile alpha_value must lie in (0, 100)");
    }
}

ScalarField magnify(const StabilityField& phi, const SaliencyConfig& cfg, double alpha) {
    cfg.validate();
    ScalarField out(phi.shape);
    std::vector<double>& o = out.values();
    const double beta = cfg.beta;
    const double suppress = 1.0 - cfg.beta;
    parallel_for_chunks(static_cast<int>(o.size()), [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const double p = phi.phi[static_cast<std::size_t>(i)];
            o[static_cast<std::size_t>(i)] = p >= alpha ? beta * p : suppress * p;
        }
    });
    return out;
}

namespace {

double percentile_interpolated(std::vector<double> sorted_copy, double pct) {
    std::sort(sorted_copy.begin(), sorted_copy.end());
    const std::size_t n = sorted_copy.size();
    double rank = pct / 100.0 * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    std::size_t hi = std::min(lo + 1, n - 1);
    double t = rank - static_cast<double>(lo);
    return sorted_copy[lo] + t * (sorted_copy[hi] - sorted_copy[lo]);
}

double otsu_threshold(const std::vector<double>& values, double lo, double hi) {
    constexpr int kBins = 256;
    const double range = hi - lo;
    std::array<std::int64_t, kBins> hist{};
    for (double v : values) {
        int b = static_cast<int>((v - lo) / range * kBins);
        b = std::clamp(b, 0, kBins - 1);
        ++hist[static_cast<std::size_t>(b)];
    }
    const double total = static_cast<double>(values.size());
    double sum_all = 0.0;
    for (int b = 0; b < kBins; ++b) sum_all += static_cast<double>(b) * static_cast<double>(hist[b]);

    // classic cumulative-moment sweep over the between-class variance
    double w0 = 0.0, sum0 = 0.0;
    double best_var = -1.0;
    int best_bin = 0;
    for (int b = 0; b < kBins - 1; ++b) {
        w0 += static_cast<double>(hist[b]);
        if (w0 == 0.0) continue;
        const double w1 = total - w0;
        if (w1 == 0.0) break;
        sum0 += static_cast<double>(b) * static_cast<double>(hist[b]);
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best_var) {
            best_var = between;
            best_bin = b;
        }
    }
    // classes split between bins best_bin and best_bin + 1
    return lo + (static_cast<double>(best_bin) + 1.0) / kBins * range;
}

}  // namespace

double select_alpha(const StabilityField& phi, const SaliencyConfig& cfg) {
    cfg.validate();
    if (cfg.alpha_mode == AlphaMode::fixed) {
        return cfg.alpha_value;
    }
    double lo = *std::min_element(phi.phi.begin(), phi.phi.end());
    double hi = *std::max_element(phi.phi.begin(), phi.phi.end());
    if (hi - lo < kDegenerateRange) {
        throw DegenerateField("phi range below 1e-12, no data-driven threshold exists");
    }
    if (cfg.alpha_mode == AlphaMode::percentile) {
        return percentile_interpolated(phi.phi, cfg.alpha_value);
    }
    return otsu_threshold(phi.phi, lo, hi);
}

namespace {

// Sliding-window mean/stddev via summed-area tables; windows are clipped at
// the frame borders.
struct WindowStats {
    GridShape shape;
    std::vector<double> sum, sumsq;

    explicit WindowStats(const ScalarField& f) : shape(f.shape()) {
        const int w = shape.width, h = shape.height;
        sum.assign(static_cast<std::size_t>((w + 1) * (h + 1)), 0.0);
        sumsq.assign(sum.size(), 0.0);
        for (int y = 0; y < h; ++y) {
            double row = 0.0, rowsq = 0.0;
            for (int x = 0; x < w; ++x) {
                const double v = f.at(x, y);
                row += v;
                rowsq += v * v;
                const std::size_t i = static_cast<std::size_t>((y + 1) * (w + 1) + (x + 1));
                const std::size_t up = static_cast<std::size_t>(y * (w + 1) + (x + 1));
                sum[i] = sum[up] + row;
                sumsq[i] = sumsq[up] + rowsq;
            }
        }
    }

    // inclusive box [x0,x1] x [y0,y1]
    void box(int x0, int y0, int x1, int y1, double& s, double& sq, int& count) const {
        const int w1 = shape.width + 1;
        auto at = [&](const std::vector<double>& t, int x, int y) {
            return t[static_cast<std::size_t>(y * w1 + x)];
        };
        s = at(sum, x1 + 1, y1 + 1) - at(sum, x0, y1 + 1) - at(sum, x1 + 1, y0) +
            at(sum, x0, y0);
        sq = at(sumsq, x1 + 1, y1 + 1) - at(sumsq, x0, y1 + 1) - at(sumsq, x1 + 1, y0) +
             at(sumsq, x0, y0);
        count = (x1 - x0 + 1) * (y1 - y0 + 1);
    }
};

}  // namespace

ScalarField segment(const ScalarField& phi_hat, const SaliencyConfig& cfg, double alpha) {
    cfg.validate();
    const GridShape& shape = phi_hat.shape();
    ScalarField mask(shape, 0.0);
    const double global_cut = cfg.beta * alpha;
    const int r = cfg.local_window / 2;
    const WindowStats stats(phi_hat);
    const bool want_union = cfg.combine_mode == CombineMode::set_union;

    parallel_for_chunks(shape.height, [&](int row_begin, int row_end) {
        for (int y = row_begin; y < row_end; ++y) {
            for (int x = 0; x < shape.width; ++x) {
                const double v = phi_hat.at(x, y);
                // only strictly unstable points can be salient
                if (!(v > kInstabilityFloor)) continue;

                const bool global_hit = v >= global_cut;

                bool local_hit = false;
                if (want_union || global_hit) {
                    double s, sq;
                    int count;
                    stats.box(std::max(0, x - r), std::max(0, y - r),
                              std::min(shape.width - 1, x + r),
                              std::min(shape.height - 1, y + r), s, sq, count);
                    const double mean = s / count;
                    double var = sq / count - mean * mean;
                    if (var < 0.0) var = 0.0;
                    const double margin = std::max(cfg.local_k * std::sqrt(var), kLocalMargin);
                    local_hit = v > mean + margin;
                }

                const bool hit = want_union ? (global_hit || local_hit)
                                            : (global_hit && local_hit);
                if (hit) mask.at(x, y) = 1.0;
            }
        }
    });
    return mask;
}

SalientRegionSet extract_regions(const ScalarField& mask, const StabilityField& phi,
                                 const SaliencyConfig& cfg) {
    cfg.validate();
    if (!(mask.shape() == phi.shape)) {
        throw ShapeMismatch("mask and phi shapes differ");
    }
    const GridShape& shape = mask.shape();
    const int w = shape.width, h = shape.height;

    SalientRegionSet out;
    out.shape = shape;
    out.labels.assign(static_cast<std::size_t>(shape.count()), 0);

    // sequential 8-connected flood fill; label order is scan order, then
    // regions are re-indexed by descending mean instability
    std::vector<std::int32_t> raw(static_cast<std::size_t>(shape.count()), 0);
    std::int32_t next = 0;
    std::vector<std::size_t> stack;
    struct Acc {
        std::int64_t area = 0;
        int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
        double sum_x = 0, sum_y = 0, sum_phi = 0;
        double max_phi = -std::numeric_limits<double>::infinity();
        std::size_t first_pixel = 0;
    };
    std::vector<Acc> accs;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t start = shape.index(x, y);
            if (mask.values()[start] == 0.0 || raw[start] != 0) continue;
            ++next;
            Acc acc;
            acc.min_x = acc.max_x = x;
            acc.min_y = acc.max_y = y;
            acc.first_pixel = start;
            raw[start] = next;
            stack.assign(1, start);
            while (!stack.empty()) {
                const std::size_t p = stack.back();
                stack.pop_back();
                const int px = static_cast<int>(p % static_cast<std::size_t>(w));
                const int py = static_cast<int>(p / static_cast<std::size_t>(w));
                ++acc.area;
                acc.min_x = std::min(acc.min_x, px);
                acc.max_x = std::max(acc.max_x, px);
                acc.min_y = std::min(acc.min_y, py);
                acc.max_y = std::max(acc.max_y, py);
                acc.sum_x += px;
                acc.sum_y += py;
                const double pv = phi.phi[p];
                acc.sum_phi += pv;
                acc.max_phi = std::max(acc.max_phi, pv);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = px + dx, ny = py + dy;
                        if (!shape.contains(nx, ny)) continue;
                        const std::size_t q = shape.index(nx, ny);
                        if (mask.values()[q] != 0.0 && raw[q] == 0) {
                            raw[q] = next;
                            stack.push_back(q);
                        }
                    }
                }
            }
            accs.push_back(acc);
        }
    }

    // drop small components, order survivors by descending mean phi
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < accs.size(); ++i) {
        if (accs[i].area >= cfg.min_region_area) keep.push_back(i);
    }
    std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
        const double ma = accs[a].sum_phi / static_cast<double>(accs[a].area);
        const double mb = accs[b].sum_phi / static_cast<double>(accs[b].area);
        if (ma != mb) return ma > mb;
        return accs[a].first_pixel < accs[b].first_pixel;
    });

    std::vector<std::int32_t> remap(accs.size() + 1, 0);
    out.regions.reserve(keep.size());
    for (std::size_t rank = 0; rank < keep.size(); ++rank) {
        const Acc& a = accs[keep[rank]];
        remap[keep[rank] + 1] = static_cast<std::int32_t>(rank + 1);
        Region reg;
        reg.id = static_cast<int>(rank + 1);
        reg.area = static_cast<int>(a.area);
        reg.bbox = {a.min_x, a.min_y, a.max_x - a.min_x + 1, a.max_y - a.min_y + 1};
        reg.centroid = {a.sum_x / static_cast<double>(a.area),
                        a.sum_y / static_cast<double>(a.area)};
        reg.mean_phi = a.sum_phi / static_cast<double>(a.area);
        reg.max_phi = a.max_phi;
        out.regions.push_back(reg);
    }
    for (std::size_t p = 0; p < raw.size(); ++p) {
        out.labels[p] = raw[p] > 0 ? remap[static_cast<std::size_t>(raw[p])] : 0;
    }
    return out;
}

}  // namespace flowsal
