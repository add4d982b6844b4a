#include "mfrac/oracle2d.hpp"

#include "mfrac/csvio.hpp"
#include "mfrac/kernels.hpp"
#include "mfrac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfrac {

Grid2D rasterize(const RadialProfile& f, double L, double h2) {
    if (f.d != 2) throw std::invalid_argument("rasterize: a d = 2 profile is required");
    if (!(h2 > 0.0) || !(L > 0.0)) throw std::invalid_argument("rasterize: L and h2 must be positive");
    double cells = L / h2;
    if (std::abs(cells - std::llround(cells)) > 1e-9)
        throw std::invalid_argument("rasterize: L must be an integer multiple of h2");
    if (f.t_max() >= L) throw std::invalid_argument("rasterize: support must fit strictly inside the square");

    Grid2D grid;
    grid.L = L;
    grid.h2 = h2;
    grid.n = 2 * int(std::llround(cells)) + 1;
    grid.g.resize(std::size_t(grid.n) * grid.n);
    for (int j = 0; j < grid.n; ++j) {
        double y = grid.x_at(j);
        for (int i = 0; i < grid.n; ++i)
            grid.g[std::size_t(j) * grid.n + i] = std::abs(f.eval(std::hypot(grid.x_at(i), y)));
    }
    return grid;
}

namespace {

struct Center {
    int ci, cj;
};

// rows of the disc in index space: dj, reach fl = floor(sqrt(rho^2 - dj^2))
struct DiscRow {
    int dj, fl;
};

std::vector<DiscRow> disc_rows(double rho) {
    std::vector<DiscRow> rows;
    int top = int(std::floor(rho + 1e-9));
    double rho2 = rho * rho + 1e-9; // include nodes exactly on the circle
    for (int dj = -top; dj <= top; ++dj) {
        double rem = rho2 - double(dj) * dj;
        if (rem < 0.0) continue;
        rows.push_back({dj, int(std::floor(std::sqrt(rem)))});
    }
    return rows;
}

} // namespace

std::vector<double> oracle_maximal_2d(const Grid2D& grid, double beta, const Oracle2DParams& par,
                                      int threads) {
    if (!(beta >= 0.0) || beta >= 2.0)
        throw std::invalid_argument("oracle_maximal_2d: beta must satisfy 0 <= beta < 2");
    if (par.stride < 1) throw std::invalid_argument("oracle_maximal_2d: stride must be >= 1");
    if (par.radius_set.empty())
        throw std::invalid_argument("oracle_maximal_2d: the radius set must not be empty");
    for (std::size_t k = 1; k < par.radius_set.size(); ++k)
        if (!(par.radius_set[k] > par.radius_set[k - 1]))
            throw std::invalid_argument("oracle_maximal_2d: radii must ascend");

    const int n = grid.n, mid = grid.mid();
    // keep the exact center node in the strided lattice
    std::vector<Center> centers;
    for (int cj = mid % par.stride; cj < n; cj += par.stride) {
        if (par.s_hi >= 0.0 && std::abs(grid.x_at(cj)) > par.s_hi + 1e-12) continue;
        for (int ci = mid % par.stride; ci < n; ci += par.stride) {
            if (par.s_hi >= 0.0 && std::abs(grid.x_at(ci)) > par.s_hi + 1e-12) continue;
            centers.push_back({ci, cj});
        }
    }

    const std::size_t nr = par.radius_set.size();
    std::vector<std::vector<DiscRow>> rows(nr);
    for (std::size_t k = 0; k < nr; ++k) rows[k] = disc_rows(par.radius_set[k] / grid.h2);

    // phase 1: each center's disc values, written to its own slot
    std::vector<double> vals(centers.size() * nr, 0.0);
    parallel_for(centers.size(), threads, [&](std::size_t c) {
        const Center ctr = centers[c];
        for (std::size_t k = 0; k < nr; ++k) {
            double sum = 0.0;
            long long count = 0;
            for (const DiscRow& row : rows[k]) {
                int j = ctr.cj + row.dj;
                count += 2LL * row.fl + 1; // full row, off-grid nodes are exact zeros
                if (j < 0 || j >= n) continue;
                int lo = std::max(0, ctr.ci - row.fl);
                int hi = std::min(n - 1, ctr.ci + row.fl);
                if (lo > hi) continue;
                sum += kern::reduce_add(&grid.g[std::size_t(j) * n + lo], std::size_t(hi - lo + 1));
            }
            vals[c * nr + k] = std::pow(par.radius_set[k], beta) * (sum / double(count));
        }
    });

    // phase 2: serial max over the field in a fixed order
    std::vector<double> field(std::size_t(n) * n, 0.0);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const Center ctr = centers[c];
        for (std::size_t k = 0; k < nr; ++k) {
            double val = vals[c * nr + k];
            for (const DiscRow& row : rows[k]) {
                int j = ctr.cj + row.dj;
                if (j < 0 || j >= n) continue;
                int lo = std::max(0, ctr.ci - row.fl);
                int hi = std::min(n - 1, ctr.ci + row.fl);
                if (lo > hi) continue;
                kern::max_update(&field[std::size_t(j) * n + lo], std::size_t(hi - lo + 1), val);
            }
        }
    }
    return field;
}

RayCompare compare_with_radial(const Grid2D& grid, const std::vector<double>& field,
                               const MaximalResult& radial, double t_cut) {
    if (field.size() != std::size_t(grid.n) * grid.n)
        throw std::invalid_argument("compare_with_radial: field does not match the grid");
    RayCompare out;
    const int mid = grid.mid();
    std::vector<double> gaps;
    for (int k = 0; mid + k < grid.n; ++k) {
        double t = k * grid.h2;
        if (t > t_cut + 1e-12) break;
        // match this ray node against the radial evaluation grid
        std::size_t best = radial.eval_grid.size();
        for (std::size_t i = 0; i < radial.eval_grid.size(); ++i)
            if (std::abs(radial.eval_grid[i] - t) <= 1e-9 * std::max(1.0, t)) {
                best = i;
                break;
            }
        if (best == radial.eval_grid.size()) continue;
        double o = field[std::size_t(mid) * grid.n + (mid + k)];
        double r = radial.value[best];
        double gap = std::abs(o - r) / std::max(r, 1e-300);
        out.t.push_back(t);
        out.oracle.push_back(o);
        out.radial.push_back(r);
        out.rel_gap.push_back(gap);
        gaps.push_back(gap);
        out.max_gap = std::max(out.max_gap, gap);
    }
    out.n_points = out.t.size();
    if (!gaps.empty()) {
        std::sort(gaps.begin(), gaps.end());
        std::size_t m = gaps.size();
        out.median_gap = (m % 2 == 1) ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
    }
    return out;
}

void RayCompare::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"t", "oracle", "radial", "rel_gap"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        csv.cell(t[i]);
        csv.cell(oracle[i]);
        csv.cell(radial[i]);
        csv.cell(rel_gap[i]);
        csv.end_row();
    }
}

} // namespace mfrac
