#pragma once
#include "mfrac/maximal.hpp"
#include "mfrac/radial.hpp"

#include <string>
#include <vector>

// Independent 2-D check: rasterize the radial function on a square lattice,
// take a brute-force discrete sup of r^beta * (lattice average over discs),
// and compare it with the radial pipeline along the +x ray. No cap kernels,
// no (s, r) reduction -- shared bugs with the radial code are structurally
// unlikely.
namespace mfrac {

struct Grid2D {
    double L = 0.0, h2 = 0.0; // nodes at -L + i*h2, 0 <= i < n, in both axes
    int n = 0;
    std::vector<double> g; // row-major: g[j*n + i] = f(x_i, y_j)

    double x_at(int i) const { return -L + i * h2; }
    int mid() const { return (n - 1) / 2; }
};

// requires a d = 2 profile whose support fits strictly inside the square
Grid2D rasterize(const RadialProfile& f, double L, double h2);

struct Oracle2DParams {
    int stride = 2;                 // disc centers every stride-th node
    double s_hi = -1.0;             // only centers with max(|x|,|y|) <= s_hi (< 0: all)
    std::vector<double> radius_set; // disc radii to scan (ascending)
};

// Discs may overhang the square: nodes outside it count as exact zeros in
// both the sum and the node count, so as long as the support fits inside,
// overhang introduces no bias. Center values are computed in parallel, the
// running max over the field is applied serially in a fixed order, so the
// result is independent of the thread count.
std::vector<double> oracle_maximal_2d(const Grid2D& grid, double beta, const Oracle2DParams& par,
                                      int threads);

struct RayCompare {
    std::vector<double> t, oracle, radial, rel_gap;
    double max_gap = 0.0, median_gap = 0.0;
    std::size_t n_points = 0;

    void write_csv(const std::string& path) const;
};

// matches lattice nodes on the +x ray from the center against the radial
// evaluation grid for t <= t_cut
RayCompare compare_with_radial(const Grid2D& grid, const std::vector<double>& field,
                               const MaximalResult& radial, double t_cut);

} // namespace mfrac
