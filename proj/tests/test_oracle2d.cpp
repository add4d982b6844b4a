#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfrac/maximal.hpp"
#include "mfrac/oracle2d.hpp"
#include "mfrac/radial.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace mfrac;

namespace {

Grid2D tent_grid() { return rasterize(make_tent(2, 0.05, 1.5, 1.0), 2.0, 0.05); }

std::vector<double> default_radii(double beta) {
    std::vector<double> r = uniform_grid(0.1, 0.1, 16);
    if (beta == 0.0) r.insert(r.begin(), 0.0);
    return r;
}

} // namespace

TEST_CASE("rasterization stores |f| on the square lattice") {
    Grid2D grid = tent_grid();
    CHECK(grid.n == 81);
    CHECK(grid.mid() == 40);
    CHECK(grid.x_at(grid.mid()) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(grid.x_at(0) == -2.0);
    CHECK(grid.g[std::size_t(grid.mid()) * grid.n + grid.mid()] == 1.0);

    RadialProfile f = make_tent(2, 0.05, 1.5, 1.0);
    for (int j : {3, 25, 40, 62})
        for (int i : {0, 17, 40, 55}) {
            double want = std::abs(f.eval(std::hypot(grid.x_at(i), grid.x_at(j))));
            CHECK(grid.g[std::size_t(j) * grid.n + i] == want);
        }
}

TEST_CASE("rasterization rejects inconsistent geometry") {
    RadialProfile f3 = make_tent(3, 0.05, 1.5, 1.0);
    CHECK_THROWS_AS(rasterize(f3, 2.0, 0.05), std::invalid_argument);
    RadialProfile f = make_tent(2, 0.05, 1.5, 1.0);
    CHECK_THROWS_AS(rasterize(f, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rasterize(f, 2.03, 0.05), std::invalid_argument); // not a multiple
    CHECK_THROWS_AS(rasterize(f, 1.5, 0.05), std::invalid_argument);  // support does not fit
}

TEST_CASE("a zero-radius disc reproduces the function itself") {
    Grid2D grid = tent_grid();
    Oracle2DParams par;
    par.stride = 1;
    par.radius_set = {0.0};
    std::vector<double> field = oracle_maximal_2d(grid, 0.0, par, 2);
    CHECK(field == grid.g); // single-node discs, bit for bit
}

TEST_CASE("the sup of lattice disc averages is exactly 1 on an indicator plateau") {
    ProfileSpec spec;
    spec.preset = "smoothed_indicator";
    Grid2D grid = rasterize(make_profile(spec, 2, 0.05, 1.5), 2.0, 0.05);
    Oracle2DParams par;
    par.stride = 1;
    par.radius_set = default_radii(0.0);
    std::vector<double> field = oracle_maximal_2d(grid, 0.0, par, 4);
    int mid = grid.mid();
    for (int k : {0, 3, 8, 12}) { // nodes with |x| <= 0.6, well inside the plateau
        double v = field[std::size_t(mid) * grid.n + (mid + k)];
        CHECK(v >= 1.0);          // the point's own zero-radius disc
        CHECK(v <= 1.0 + 1e-13);  // no disc average exceeds the sup of the function
    }
}

TEST_CASE("the oracle field inherits the symmetry of the function") {
    Grid2D grid = tent_grid();
    Oracle2DParams par;
    par.stride = 2;
    par.radius_set = uniform_grid(0.1, 0.1, 12);
    std::vector<double> field = oracle_maximal_2d(grid, 0.5, par, 4);
    int mid = grid.mid(), n = grid.n;
    auto at = [&](int i, int j) { return field[std::size_t(j) * n + i]; };
    for (int k : {2, 6, 10, 14}) {
        double east = at(mid + k, mid);
        CHECK(at(mid - k, mid) == doctest::Approx(east).epsilon(1e-12));
        CHECK(at(mid, mid + k) == doctest::Approx(east).epsilon(1e-12));
        CHECK(at(mid, mid - k) == doctest::Approx(east).epsilon(1e-12));
    }
}

TEST_CASE("more centers can only raise the field, restricted centers only lower it") {
    Grid2D grid = tent_grid();
    Oracle2DParams coarse;
    coarse.stride = 2;
    coarse.radius_set = uniform_grid(0.1, 0.1, 12);
    Oracle2DParams fine = coarse;
    fine.stride = 1;
    Oracle2DParams near = coarse;
    near.s_hi = 0.4;
    std::vector<double> fc = oracle_maximal_2d(grid, 0.5, coarse, 4);
    std::vector<double> ff = oracle_maximal_2d(grid, 0.5, fine, 4);
    std::vector<double> fn = oracle_maximal_2d(grid, 0.5, near, 4);
    for (std::size_t i = 0; i < fc.size(); ++i) {
        CHECK(ff[i] >= fc[i]);
        CHECK(fn[i] <= fc[i]);
    }
}

TEST_CASE("the field is independent of the thread count") {
    Grid2D grid = tent_grid();
    Oracle2DParams par;
    par.stride = 2;
    par.radius_set = uniform_grid(0.1, 0.1, 12);
    std::vector<double> a = oracle_maximal_2d(grid, 0.5, par, 1);
    std::vector<double> b = oracle_maximal_2d(grid, 0.5, par, 4);
    CHECK(a == b);
}

TEST_CASE("lattice and cap-kernel pipelines agree along the +x ray") {
    RadialProfile f = make_tent(2, 0.05, 1.5, 1.0);
    Grid2D grid = tent_grid();
    std::vector<double> eval = uniform_grid(0.0, 0.05, 17);
    SearchParams sp;
    sp.s_step = 0.1; // oracle centers sit every stride * h2; match the resolution
    sp.r_step = 0.1;
    for (double beta : {0.0, 0.5, 1.5}) {
        Oracle2DParams par;
        par.stride = 2;
        par.radius_set = default_radii(beta);
        std::vector<double> field = oracle_maximal_2d(grid, beta, par, 4);
        MaximalResult res = maximal_profile(f, beta, VariantSpec{}, eval, sp, 4);
        RayCompare rc = compare_with_radial(grid, field, res, 0.8);
        CAPTURE(beta);
        CHECK(rc.n_points == 17);
        CHECK(rc.max_gap <= (beta == 0.0 ? 0.025 : 0.02));
        CHECK(rc.median_gap <= 0.01);
        REQUIRE(rc.oracle.size() == rc.n_points);
        for (std::size_t i = 0; i < rc.n_points; ++i) CHECK(rc.oracle[i] > 0.0);
    }
    MaximalResult res = maximal_profile(f, 0.5, VariantSpec{}, eval, sp, 1);
    std::vector<double> short_field(5, 0.0);
    CHECK_THROWS_AS(compare_with_radial(grid, short_field, res, 0.8), std::invalid_argument);
}

TEST_CASE("oracle parameters are validated") {
    Grid2D grid = tent_grid();
    Oracle2DParams par;
    par.radius_set = {0.1, 0.2};
    CHECK_THROWS_AS(oracle_maximal_2d(grid, 2.0, par, 1), std::invalid_argument);
    CHECK_THROWS_AS(oracle_maximal_2d(grid, -0.5, par, 1), std::invalid_argument);
    Oracle2DParams bad_stride = par;
    bad_stride.stride = 0;
    CHECK_THROWS_AS(oracle_maximal_2d(grid, 0.5, bad_stride, 1), std::invalid_argument);
    Oracle2DParams empty;
    CHECK_THROWS_AS(oracle_maximal_2d(grid, 0.5, empty, 1), std::invalid_argument);
    Oracle2DParams unsorted;
    unsorted.radius_set = {0.2, 0.1};
    CHECK_THROWS_AS(oracle_maximal_2d(grid, 0.5, unsorted, 1), std::invalid_argument);
}
