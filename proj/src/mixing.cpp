#include "depmix/mixing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "depmix/csv.hpp"
#include "depmix/errors.hpp"
#include "depmix/stats.hpp"

namespace depmix {

namespace {

constexpr std::int64_t kMaxJointCells = 1 << 16;

// Per-coordinate quantization: cell = position among sorted upper edges.
struct Quantizer {
    std::vector<std::vector<double>> edges; // per coordinate, ascending
    std::vector<std::int64_t> offsets;      // dyadic only: min cell index
    std::vector<std::int64_t> bins;         // bins per coordinate
    std::vector<int> depths;                // dyadic widths (empty for quantile)

    std::int64_t cells() const {
        std::int64_t c = 1;
        for (const auto b : bins) {
            c *= b;
        }
        return c;
    }

    std::int64_t cell_of(const double* point) const {
        std::int64_t cell = 0;
        for (std::size_t m = 0; m < bins.size(); ++m) {
            std::int64_t bm;
            if (depths.empty()) {
                const auto& e = edges[m];
                bm = std::lower_bound(e.begin(), e.end(), point[m]) - e.begin();
            } else if (depths[m] < 0) {
                bm = 0;
            } else {
                const double width = std::ldexp(1.0, -depths[m]);
                bm = static_cast<std::int64_t>(std::floor(point[m] / width)) - offsets[m];
                bm = std::clamp<std::int64_t>(bm, 0, bins[m] - 1);
            }
            cell = cell * bins[m] + bm;
        }
        return cell;
    }
};

// Empirical lower quantile at level m/bins: order statistic ceil(R*m/bins).
// Halving the bin count keeps a subset of the same edges, so coarser grids
// nest inside finer ones on the same sample.
Quantizer quantile_quantizer(std::span<const double> data, std::int64_t replicas,
                             std::int64_t stride, std::int64_t first_col,
                             std::int64_t ncols, int bins) {
    Quantizer q;
    q.edges.resize(static_cast<std::size_t>(ncols));
    q.bins.resize(static_cast<std::size_t>(ncols));
    std::vector<double> col(static_cast<std::size_t>(replicas));
    for (std::int64_t c = 0; c < ncols; ++c) {
        for (std::int64_t r = 0; r < replicas; ++r) {
            col[static_cast<std::size_t>(r)] =
                data[static_cast<std::size_t>(r * stride + first_col + c)];
        }
        std::sort(col.begin(), col.end());
        auto& e = q.edges[static_cast<std::size_t>(c)];
        // Discrete columns with at most `bins` distinct values quantize at
        // the values themselves; order-statistic edges would depend on
        // sampling parity there.
        std::vector<double> distinct;
        for (const double v : col) {
            if (distinct.empty() || distinct.back() != v) {
                distinct.push_back(v);
                if (static_cast<int>(distinct.size()) > bins) {
                    break;
                }
            }
        }
        if (static_cast<int>(distinct.size()) <= bins) {
            e.assign(distinct.begin(), distinct.end() - 1);
        } else {
            for (int m = 1; m < bins; ++m) {
                const std::int64_t idx =
                    std::max<std::int64_t>(1, (replicas * m) / bins) - 1;
                e.push_back(col[static_cast<std::size_t>(idx)]);
            }
            e.erase(std::unique(e.begin(), e.end()), e.end());
            // An edge at the maximum would leave an empty top bin.
            while (!e.empty() && e.back() >= col.back()) {
                e.pop_back();
            }
        }
        q.bins[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(e.size()) + 1;
    }
    return q;
}

Quantizer dyadic_quantizer(std::span<const double> data, std::int64_t replicas,
                           std::int64_t stride, std::int64_t first_col,
                           std::int64_t ncols, const std::vector<int>& depths) {
    if (static_cast<std::int64_t>(depths.size()) != ncols) {
        throw InvalidParameter("dyadic bins: need one depth per window coordinate");
    }
    Quantizer q;
    q.depths = depths;
    q.offsets.assign(static_cast<std::size_t>(ncols), 0);
    q.bins.assign(static_cast<std::size_t>(ncols), 1);
    q.edges.resize(static_cast<std::size_t>(ncols));
    for (std::int64_t c = 0; c < ncols; ++c) {
        if (depths[static_cast<std::size_t>(c)] < 0) {
            continue;
        }
        const double width = std::ldexp(1.0, -depths[static_cast<std::size_t>(c)]);
        double lo = data[static_cast<std::size_t>(first_col + c)];
        double hi = lo;
        for (std::int64_t r = 1; r < replicas; ++r) {
            const double v = data[static_cast<std::size_t>(r * stride + first_col + c)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const std::int64_t clo = static_cast<std::int64_t>(std::floor(lo / width));
        const std::int64_t chi = static_cast<std::int64_t>(std::floor(hi / width));
        q.offsets[static_cast<std::size_t>(c)] = clo;
        q.bins[static_cast<std::size_t>(c)] = chi - clo + 1;
    }
    return q;
}

struct WindowCounts {
    std::int64_t n_past = 0;
    std::int64_t n_future = 0;
    std::int64_t total = 0;
    int blocks = 0;
    std::vector<std::int64_t> raw;          // n_past * n_future
    std::vector<std::int64_t> nullp;        // derangement pairing
    std::vector<std::int32_t> raw_blocks;   // blocks * cells
    std::vector<std::int32_t> null_blocks;  // blocks * cells
    std::int64_t min_past_count = 0;
};

WindowCounts count_windows(std::span<const double> data, std::int64_t replicas,
                           std::int64_t a, std::int64_t b, const Quantizer& qp,
                           const Quantizer& qf, int blocks, Exec exec) {
    WindowCounts wc;
    wc.n_past = qp.cells();
    wc.n_future = qf.cells();
    wc.total = replicas;
    wc.blocks = blocks;
    const std::int64_t cells = wc.n_past * wc.n_future;
    if (cells > kMaxJointCells) {
        throw InvalidParameter("quantization produces " + std::to_string(cells) +
                               " joint cells; cap is " + std::to_string(kMaxJointCells));
    }

    const std::int64_t stride = a + b;
    std::vector<std::int32_t> ucell(static_cast<std::size_t>(replicas));
    std::vector<std::int32_t> vcell(static_cast<std::size_t>(replicas));
    parallel::for_blocks(exec, replicas, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t r = lo; r < hi; ++r) {
            const double* row = &data[static_cast<std::size_t>(r * stride)];
            ucell[static_cast<std::size_t>(r)] = static_cast<std::int32_t>(qp.cell_of(row));
            vcell[static_cast<std::size_t>(r)] = static_cast<std::int32_t>(qf.cell_of(row + a));
        }
    });

    wc.raw.assign(static_cast<std::size_t>(cells), 0);
    wc.nullp.assign(static_cast<std::size_t>(cells), 0);
    wc.raw_blocks.assign(static_cast<std::size_t>(blocks) * cells, 0);
    wc.null_blocks.assign(static_cast<std::size_t>(blocks) * cells, 0);
    for (std::int64_t r = 0; r < replicas; ++r) {
        const std::int64_t u = ucell[static_cast<std::size_t>(r)];
        const std::int64_t v = vcell[static_cast<std::size_t>(r)];
        // Shift pairing: past of r against future of r+1 is exactly
        // independent with identical marginals.
        const std::int64_t vn = vcell[static_cast<std::size_t>((r + 1) % replicas)];
        const std::int64_t blk = r * blocks / replicas;
        ++wc.raw[static_cast<std::size_t>(u * wc.n_future + v)];
        ++wc.nullp[static_cast<std::size_t>(u * wc.n_future + vn)];
        ++wc.raw_blocks[static_cast<std::size_t>(blk * cells + u * wc.n_future + v)];
        ++wc.null_blocks[static_cast<std::size_t>(blk * cells + u * wc.n_future + vn)];
    }

    wc.min_past_count = replicas;
    for (std::int64_t u = 0; u < wc.n_past; ++u) {
        std::int64_t cu = 0;
        for (std::int64_t v = 0; v < wc.n_future; ++v) {
            cu += wc.raw[static_cast<std::size_t>(u * wc.n_future + v)];
        }
        if (cu > 0) {
            wc.min_past_count = std::min(wc.min_past_count, cu);
        }
    }
    return wc;
}

// Expected conditional total variation: average over past cells of the TV
// between the conditional future law and the marginal future law. Equals
// half the l1 distance between the joint and the product of its marginals.
double beta_from_counts(std::span<const std::int64_t> counts, std::int64_t n_past,
                        std::int64_t n_future) {
    std::int64_t total = 0;
    std::vector<std::int64_t> colsum(static_cast<std::size_t>(n_future), 0);
    for (std::int64_t u = 0; u < n_past; ++u) {
        for (std::int64_t v = 0; v < n_future; ++v) {
            const std::int64_t c = counts[static_cast<std::size_t>(u * n_future + v)];
            colsum[static_cast<std::size_t>(v)] += c;
            total += c;
        }
    }
    if (total == 0) {
        return 0.0;
    }
    const double tot = static_cast<double>(total);
    double beta = 0.0;
    for (std::int64_t u = 0; u < n_past; ++u) {
        std::int64_t cu = 0;
        for (std::int64_t v = 0; v < n_future; ++v) {
            cu += counts[static_cast<std::size_t>(u * n_future + v)];
        }
        if (cu == 0) {
            continue;
        }
        double tv = 0.0;
        for (std::int64_t v = 0; v < n_future; ++v) {
            const double cond = static_cast<double>(
                                    counts[static_cast<std::size_t>(u * n_future + v)]) /
                                static_cast<double>(cu);
            const double marg = static_cast<double>(colsum[static_cast<std::size_t>(v)]) / tot;
            tv += std::fabs(cond - marg);
        }
        beta += (static_cast<double>(cu) / tot) * 0.5 * tv;
    }
    return beta;
}

std::vector<double> signed_matrix(std::span<const std::int64_t> counts, std::int64_t n_past,
                                  std::int64_t n_future) {
    std::int64_t total = 0;
    std::vector<std::int64_t> rowsum(static_cast<std::size_t>(n_past), 0);
    std::vector<std::int64_t> colsum(static_cast<std::size_t>(n_future), 0);
    for (std::int64_t u = 0; u < n_past; ++u) {
        for (std::int64_t v = 0; v < n_future; ++v) {
            const std::int64_t c = counts[static_cast<std::size_t>(u * n_future + v)];
            rowsum[static_cast<std::size_t>(u)] += c;
            colsum[static_cast<std::size_t>(v)] += c;
            total += c;
        }
    }
    const double tot = static_cast<double>(total);
    std::vector<double> d(static_cast<std::size_t>(n_past * n_future));
    for (std::int64_t u = 0; u < n_past; ++u) {
        for (std::int64_t v = 0; v < n_future; ++v) {
            d[static_cast<std::size_t>(u * n_future + v)] =
                static_cast<double>(counts[static_cast<std::size_t>(u * n_future + v)]) / tot -
                (static_cast<double>(rowsum[static_cast<std::size_t>(u)]) / tot) *
                    (static_cast<double>(colsum[static_cast<std::size_t>(v)]) / tot);
        }
    }
    return d;
}

double ascent_pass(std::span<const double> d, std::int64_t n_rows, std::int64_t n_cols,
                   std::vector<std::uint8_t>& s, std::vector<std::uint8_t>& t, int iters) {
    double value = 0.0;
    for (int it = 0; it < iters; ++it) {
        bool changed = false;
        for (std::int64_t u = 0; u < n_rows; ++u) {
            double g = 0.0;
            for (std::int64_t v = 0; v < n_cols; ++v) {
                if (t[static_cast<std::size_t>(v)]) {
                    g += d[static_cast<std::size_t>(u * n_cols + v)];
                }
            }
            const std::uint8_t want = g > 0.0 ? 1 : 0;
            if (s[static_cast<std::size_t>(u)] != want) {
                s[static_cast<std::size_t>(u)] = want;
                changed = true;
            }
        }
        double total = 0.0;
        for (std::int64_t v = 0; v < n_cols; ++v) {
            double h = 0.0;
            for (std::int64_t u = 0; u < n_rows; ++u) {
                if (s[static_cast<std::size_t>(u)]) {
                    h += d[static_cast<std::size_t>(u * n_cols + v)];
                }
            }
            const std::uint8_t want = h > 0.0 ? 1 : 0;
            if (t[static_cast<std::size_t>(v)] != want) {
                t[static_cast<std::size_t>(v)] = want;
                changed = true;
            }
            if (want) {
                total += h;
            }
        }
        value = total;
        if (!changed) {
            break;
        }
    }
    return value;
}

AlphaSolve alpha_ascent(std::span<const double> d, std::int64_t n_rows, std::int64_t n_cols,
                        std::uint64_t seed) {
    AlphaSolve best;
    best.exact = false;
    std::vector<double> neg(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        neg[i] = -d[i];
    }
    // Row with the largest l1 mass seeds a deterministic start; a few
    // counter-seeded random starts guard against poor local optima.
    std::int64_t seed_row = 0;
    double best_mass = -1.0;
    for (std::int64_t u = 0; u < n_rows; ++u) {
        double m = 0.0;
        for (std::int64_t v = 0; v < n_cols; ++v) {
            m += std::fabs(d[static_cast<std::size_t>(u * n_cols + v)]);
        }
        if (m > best_mass) {
            best_mass = m;
            seed_row = u;
        }
    }
    for (int sign = 0; sign < 2; ++sign) {
        const std::span<const double> mat = sign ? std::span<const double>(neg) : d;
        for (int start = 0; start < 6; ++start) {
            std::vector<std::uint8_t> s(static_cast<std::size_t>(n_rows), 0);
            std::vector<std::uint8_t> t(static_cast<std::size_t>(n_cols), 0);
            if (start == 0) {
                for (std::int64_t v = 0; v < n_cols; ++v) {
                    t[static_cast<std::size_t>(v)] =
                        mat[static_cast<std::size_t>(seed_row * n_cols + v)] > 0.0 ? 1 : 0;
                }
            } else {
                for (std::int64_t v = 0; v < n_cols; ++v) {
                    t[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(
                        rng::bits(seed, rng::stream_id(rng::StreamClass::Probe,
                                                       static_cast<std::uint64_t>(start)),
                                  static_cast<std::uint64_t>((sign << 30) | v)) &
                        1u);
                }
            }
            const double val = ascent_pass(mat, n_rows, n_cols, s, t, 64);
            if (val > best.value) {
                best.value = val;
                best.s_side = s;
                best.t_side = t;
            }
        }
    }
    return best;
}

} // namespace

AlphaSolve alpha_max_bilinear(std::span<const double> d, std::int64_t n_rows,
                              std::int64_t n_cols, std::uint64_t seed) {
    if (n_rows > n_cols) {
        // Enumerate the smaller side; |d(SxT)| is symmetric in the roles.
        std::vector<double> dt(d.size());
        for (std::int64_t u = 0; u < n_rows; ++u) {
            for (std::int64_t v = 0; v < n_cols; ++v) {
                dt[static_cast<std::size_t>(v * n_rows + u)] =
                    d[static_cast<std::size_t>(u * n_cols + v)];
            }
        }
        AlphaSolve sol = alpha_max_bilinear(dt, n_cols, n_rows, seed);
        std::swap(sol.s_side, sol.t_side);
        sol.transposed = true;
        return sol;
    }

    const std::int64_t s = n_rows;
    const bool feasible = s <= 24 && (double(1ull << s) * static_cast<double>(n_cols)) <= 2e8;
    if (!feasible) {
        return alpha_ascent(d, n_rows, n_cols, seed);
    }

    // Exact: enumerate subsets of the smaller side in Gray-code order; for a
    // fixed S the optimal T is the sign split of the column aggregates.
    AlphaSolve best;
    best.exact = true;
    std::vector<double> g(static_cast<std::size_t>(n_cols), 0.0);
    std::uint64_t prev_gray = 0;
    std::uint64_t best_gray = 0;
    bool best_negative = false;
    for (std::uint64_t code = 1; code < (1ull << s); ++code) {
        const std::uint64_t gray = code ^ (code >> 1);
        const std::uint64_t changed = gray ^ prev_gray;
        const int row = std::countr_zero(changed);
        const bool added = (gray & changed) != 0;
        const double* drow = &d[static_cast<std::size_t>(row) * n_cols];
        if (added) {
            for (std::int64_t v = 0; v < n_cols; ++v) {
                g[static_cast<std::size_t>(v)] += drow[v];
            }
        } else {
            for (std::int64_t v = 0; v < n_cols; ++v) {
                g[static_cast<std::size_t>(v)] -= drow[v];
            }
        }
        double pos = 0.0, negv = 0.0;
        for (std::int64_t v = 0; v < n_cols; ++v) {
            const double x = g[static_cast<std::size_t>(v)];
            if (x > 0.0) {
                pos += x;
            } else {
                negv -= x;
            }
        }
        if (pos > best.value) {
            best.value = pos;
            best_gray = gray;
            best_negative = false;
        }
        if (negv > best.value) {
            best.value = negv;
            best_gray = gray;
            best_negative = true;
        }
        prev_gray = gray;
    }

    best.s_side.assign(static_cast<std::size_t>(n_rows), 0);
    for (std::int64_t u = 0; u < n_rows; ++u) {
        best.s_side[static_cast<std::size_t>(u)] = (best_gray >> u) & 1u;
    }
    best.t_side.assign(static_cast<std::size_t>(n_cols), 0);
    for (std::int64_t v = 0; v < n_cols; ++v) {
        double h = 0.0;
        for (std::int64_t u = 0; u < n_rows; ++u) {
            if (best.s_side[static_cast<std::size_t>(u)]) {
                h += d[static_cast<std::size_t>(u * n_cols + v)];
            }
        }
        best.t_side[static_cast<std::size_t>(v)] = best_negative ? (h < 0.0) : (h > 0.0);
    }
    return best;
}

BinScheme BinScheme::quantile(int bins) {
    BinScheme s;
    s.kind = Kind::Quantile;
    s.bins = bins;
    return s;
}

BinScheme BinScheme::dyadic(std::vector<int> past_depths, std::vector<int> future_depths) {
    BinScheme s;
    s.kind = Kind::Dyadic;
    s.past_depths = std::move(past_depths);
    s.future_depths = std::move(future_depths);
    return s;
}

MixingEstimate estimate_windows(std::span<const double> data, std::int64_t replicas,
                                std::int64_t a, std::int64_t b, const BinScheme& scheme,
                                const MixingOptions& options) {
    if (replicas < 2 || a < 1 || b < 1 ||
        data.size() != static_cast<std::size_t>(replicas) * static_cast<std::size_t>(a + b)) {
        throw InvalidParameter("estimate_windows: shape mismatch");
    }
    const std::int64_t stride = a + b;

    Quantizer qp, qf;
    int bins_used = 0;
    if (scheme.kind == BinScheme::Kind::Quantile) {
        int bins = std::max(scheme.bins, 2);
        while (true) {
            qp = quantile_quantizer(data, replicas, stride, 0, a, bins);
            qf = quantile_quantizer(data, replicas, stride, a, b, bins);
            const WindowCounts probe = count_windows(data, replicas, a, b, qp, qf, 1,
                                                     options.exec);
            if (probe.min_past_count >= options.min_cell) {
                bins_used = bins;
                break;
            }
            if (!options.auto_widen || bins == 2) {
                throw InsufficientOccupancy(
                    "past cell with only " + std::to_string(probe.min_past_count) +
                    " replicas (< " + std::to_string(options.min_cell) +
                    "); widen bins or raise replicas");
            }
            bins /= 2;
        }
    } else {
        qp = dyadic_quantizer(data, replicas, stride, 0, a, scheme.past_depths);
        qf = dyadic_quantizer(data, replicas, stride, a, b, scheme.future_depths);
    }

    const WindowCounts wc =
        count_windows(data, replicas, a, b, qp, qf, options.bootstrap_blocks, options.exec);
    if (wc.min_past_count < options.min_cell) {
        throw InsufficientOccupancy("past cell with only " + std::to_string(wc.min_past_count) +
                                    " replicas (< " + std::to_string(options.min_cell) + ")");
    }

    MixingEstimate est;
    est.replicas = replicas;
    est.past_cells = wc.n_past;
    est.future_cells = wc.n_future;
    est.min_past_count = wc.min_past_count;
    est.bins_used = bins_used;
    est.beta_raw = beta_from_counts(wc.raw, wc.n_past, wc.n_future);
    est.beta_null = beta_from_counts(wc.nullp, wc.n_past, wc.n_future);
    est.beta_corrected = std::max(0.0, est.beta_raw - est.beta_null);

    const std::vector<double> d = signed_matrix(wc.raw, wc.n_past, wc.n_future);
    AlphaSolve alpha = alpha_max_bilinear(d, wc.n_past, wc.n_future, options.seed);
    est.alpha = alpha.value;
    est.alpha_exact = alpha.exact;

    // Block bootstrap over replica blocks: identical block draws feed the
    // raw, null and alpha resamples so the corrected statistic is resampled
    // coherently.
    if (options.bootstrap_resamples > 1) {
        const std::int64_t cells = wc.n_past * wc.n_future;
        std::vector<double> beta_rs, alpha_rs;
        std::vector<std::int64_t> raw_rs(static_cast<std::size_t>(cells));
        std::vector<std::int64_t> null_rs(static_cast<std::size_t>(cells));
        for (int bsi = 0; bsi < options.bootstrap_resamples; ++bsi) {
            std::fill(raw_rs.begin(), raw_rs.end(), 0);
            std::fill(null_rs.begin(), null_rs.end(), 0);
            for (int slot = 0; slot < wc.blocks; ++slot) {
                const std::uint64_t pick =
                    rng::bits(options.seed,
                              rng::stream_id(rng::StreamClass::Bootstrap, 0xB00Bu),
                              (static_cast<std::uint64_t>(bsi) << 32) |
                                  static_cast<std::uint64_t>(slot)) %
                    static_cast<std::uint64_t>(wc.blocks);
                const std::int32_t* rb = &wc.raw_blocks[pick * cells];
                const std::int32_t* nb = &wc.null_blocks[pick * cells];
                for (std::int64_t cidx = 0; cidx < cells; ++cidx) {
                    raw_rs[static_cast<std::size_t>(cidx)] += rb[cidx];
                    null_rs[static_cast<std::size_t>(cidx)] += nb[cidx];
                }
            }
            const double braw = beta_from_counts(raw_rs, wc.n_past, wc.n_future);
            const double bnull = beta_from_counts(null_rs, wc.n_past, wc.n_future);
            beta_rs.push_back(braw - bnull);
            // Warm-started ascent on the resampled signed matrix.
            std::vector<double> drs = signed_matrix(raw_rs, wc.n_past, wc.n_future);
            std::vector<std::uint8_t> s = alpha.transposed ? alpha.t_side : alpha.s_side;
            std::vector<std::uint8_t> t = alpha.transposed ? alpha.s_side : alpha.t_side;
            double av = ascent_pass(drs, wc.n_past, wc.n_future, s, t, 8);
            for (auto& x : drs) {
                x = -x;
            }
            std::vector<std::uint8_t> s2 = s, t2 = t;
            av = std::max(av, ascent_pass(drs, wc.n_past, wc.n_future, s2, t2, 8));
            alpha_rs.push_back(av);
        }
        est.stderr_beta = std::sqrt(stats::variance(beta_rs));
        est.stderr_alpha = std::sqrt(stats::variance(alpha_rs));
    }
    return est;
}

namespace {

std::vector<double> window_matrix(const PathEnsemble& ensemble, std::int64_t j, std::int64_t k,
                                  std::int64_t a, std::int64_t b) {
    if (!(j - a + 1 >= 1 && j + k + b - 1 <= ensemble.n && k >= 1)) {
        throw InvalidParameter("mixing windows outside 1..n");
    }
    std::vector<std::int64_t> offs;
    for (std::int64_t i = j - a + 1; i <= j; ++i) {
        offs.push_back(ensemble.col_offset(i));
    }
    for (std::int64_t i = j + k; i <= j + k + b - 1; ++i) {
        offs.push_back(ensemble.col_offset(i));
    }
    const std::size_t stride = ensemble.columns.size();
    std::vector<double> m(static_cast<std::size_t>(ensemble.replicas) * offs.size());
    for (std::int64_t r = 0; r < ensemble.replicas; ++r) {
        for (std::size_t c = 0; c < offs.size(); ++c) {
            m[static_cast<std::size_t>(r) * offs.size() + c] =
                ensemble.values[static_cast<std::size_t>(r) * stride +
                                static_cast<std::size_t>(offs[c])];
        }
    }
    return m;
}

} // namespace

MixingEstimate mixing_estimate(const PathEnsemble& ensemble, std::int64_t j, std::int64_t k,
                               std::int64_t a, std::int64_t b, const BinScheme& scheme,
                               const MixingOptions& options) {
    const std::vector<double> m = window_matrix(ensemble, j, k, a, b);
    MixingEstimate est = estimate_windows(m, ensemble.replicas, a, b, scheme, options);
    est.gap = k;
    return est;
}

double beta_hat(const PathEnsemble& ensemble, std::int64_t j, std::int64_t k, std::int64_t a,
                std::int64_t b, int bins, std::uint64_t seed) {
    MixingOptions opts;
    opts.seed = seed;
    opts.bootstrap_resamples = 0;
    return mixing_estimate(ensemble, j, k, a, b, BinScheme::quantile(bins), opts).beta_raw;
}

double alpha_hat(const PathEnsemble& ensemble, std::int64_t j, std::int64_t k, std::int64_t a,
                 std::int64_t b, int bins, std::uint64_t seed) {
    MixingOptions opts;
    opts.seed = seed;
    opts.bootstrap_resamples = 0;
    return mixing_estimate(ensemble, j, k, a, b, BinScheme::quantile(bins), opts).alpha;
}

MixingProfile mixing_profile(const FilterSpec& filter, std::span<const std::int64_t> gaps,
                             const MixingPolicy& policy) {
    if (gaps.empty()) {
        throw InvalidParameter("mixing_profile: empty gap list");
    }
    MixingProfile prof;
    prof.policy = policy;
    prof.filter_description = filter.describe();
    const std::int64_t j = policy.resolved_j();
    for (const std::int64_t k : gaps) {
        // One sliced simulation per gap keeps memory at R x (a+b) doubles.
        std::vector<std::int64_t> cols;
        for (std::int64_t i = j - policy.a + 1; i <= j; ++i) {
            cols.push_back(i);
        }
        for (std::int64_t i = j + k; i <= j + k + policy.b - 1; ++i) {
            cols.push_back(i);
        }
        SimulateOptions sopts;
        sopts.exec = policy.exec;
        const PathEnsemble ens =
            simulate_columns(filter, policy.n, policy.replicas, cols, policy.options.seed, sopts);
        MixingEstimate est =
            mixing_estimate(ens, j, k, policy.a, policy.b, policy.scheme, policy.options);
        est.gap = k;
        prof.gaps.push_back(k);
        prof.estimates.push_back(est);
    }
    return prof;
}

void write_mixing_csv(const MixingProfile& profile, const std::filesystem::path& path) {
    csv::Writer w(path, {"k", "alpha", "beta", "stderr_a", "stderr_b"});
    for (const auto& e : profile.estimates) {
        w.row({csv::cell(e.gap), csv::cell(e.alpha), csv::cell(e.beta_raw),
               csv::cell(e.stderr_alpha), csv::cell(e.stderr_beta)});
    }
}

void write_mixing_json(const MixingProfile& profile, const std::filesystem::path& path) {
    nlohmann::json j;
    j["filter"] = profile.filter_description;
    j["policy"] = {{"n", profile.policy.n},
                   {"j", profile.policy.resolved_j()},
                   {"a", profile.policy.a},
                   {"b", profile.policy.b},
                   {"replicas", profile.policy.replicas},
                   {"seed", profile.policy.options.seed},
                   {"min_cell", profile.policy.options.min_cell},
                   {"scheme", profile.policy.scheme.kind == BinScheme::Kind::Quantile
                                  ? "quantile"
                                  : "dyadic"},
                   {"bins", profile.policy.scheme.bins}};
    j["note"] = "finite-window, finite-bin plug-in estimates: lower bounds of the "
                "sup-over-(n,j) coefficients";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : profile.estimates) {
        rows.push_back({{"k", e.gap},
                        {"alpha", e.alpha},
                        {"alpha_exact", e.alpha_exact},
                        {"beta_raw", e.beta_raw},
                        {"beta_null", e.beta_null},
                        {"beta_corrected", e.beta_corrected},
                        {"stderr_alpha", e.stderr_alpha},
                        {"stderr_beta", e.stderr_beta},
                        {"past_cells", e.past_cells},
                        {"future_cells", e.future_cells},
                        {"min_past_count", e.min_past_count},
                        {"bins_used", e.bins_used}});
    }
    j["estimates"] = rows;
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path.string());
    }
    out << j.dump(2) << '\n';
}

} // namespace depmix
