#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfrac/geometry.hpp"
#include "mfrac/radial.hpp"
#include "mfrac/rng.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

using namespace mfrac;

namespace {

constexpr double kPi = 3.14159265358979323846;

RadialProfile ones_profile(int d, double T = 10.0) {
    RadialProfile f;
    f.d = d;
    f.t = {0.0, T};
    f.v = {1.0, 1.0};
    return f;
}

RadialProfile identity_profile(int d, double T = 2.0) {
    RadialProfile f;
    f.d = d;
    f.t = {0.0, T};
    f.v = {0.0, T};
    return f;
}

// Monte-Carlo averages over the ball B((s,0,..),r) by rejection sampling: the
// independent oracle for the cap-kernel integrals.
struct McPair {
    double mass, directional;
};

McPair mc_ball_averages(const RadialProfile& f, const RadialProfile& g, int d, double s, double r,
                        uint64_t seed, std::size_t n) {
    SplitMix64 rng(seed);
    double acc_m = 0.0, acc_d = 0.0;
    std::vector<double> y(static_cast<std::size_t>(d), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double norm2;
        do {
            norm2 = 0.0;
            for (int j = 0; j < d; ++j) {
                y[j] = rng.uniform(-r, r);
                norm2 += y[j] * y[j];
            }
        } while (norm2 > r * r);
        y[0] += s; // center on the first axis
        double u = 0.0;
        for (int j = 0; j < d; ++j) u += y[j] * y[j];
        u = std::sqrt(u);
        acc_m += std::abs(f.eval(u));
        if (u > 0.0) acc_d += g.eval(u) * (y[0] / u);
    }
    return {acc_m / double(n), acc_d / double(n)};
}

} // namespace

TEST_CASE("cap fraction closed forms") {
    CapKernelContext c2 = make_cap_context(2);
    CapKernelContext c3 = make_cap_context(3);

    // equilateral configuration u = s = r: theta* = pi/3
    CHECK(cap_fraction(c2, 1.0, 1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(cap_fraction(c3, 1.0, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));

    // regimes
    CHECK(cap_fraction(c2, 0.2, 0.1, 0.5) == 1.0);  // sphere inside the ball
    CHECK(cap_fraction(c2, 2.0, 0.5, 1.0) == 0.0);  // sphere outside
    CHECK(cap_fraction(c2, 0.3, 1.0, 0.5) == 0.0);  // ball beyond the sphere

    // shrinking spheres against a ball through the origin cover a half-space
    CHECK(cap_fraction(c2, 1e-12, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(cap_fraction(c3, 1e-12, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-9));

    // d = 1: the two-point sphere has one point covered in the partial regime
    CapKernelContext c1 = make_cap_context(1);
    CHECK(cap_fraction(c1, 0.8, 0.5, 0.5) == 0.5);
    CHECK(cap_fraction(c1, 0.2, 0.1, 0.5) == 1.0);

    // continuity at the full/partial boundary (s < r)
    CHECK(cap_fraction(c2, 0.5 - 1e-11, 0.5, 1.0) == 1.0);
    CHECK(cap_fraction(c2, 0.5 + 1e-9, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("directional cap moment closed forms") {
    CapKernelContext c2 = make_cap_context(2);
    CapKernelContext c3 = make_cap_context(3);

    // u = s = r: sin(theta*) = sqrt(3)/2
    CHECK(directional_cap_moment(c2, 1.0, 1.0, 1.0) ==
          doctest::Approx(std::sqrt(3.0) / (2.0 * kPi)).epsilon(1e-14));
    CHECK(directional_cap_moment(c3, 1.0, 1.0, 1.0) == doctest::Approx(3.0 / 16.0).epsilon(1e-14));

    CHECK(directional_cap_moment(c2, 0.2, 0.1, 0.5) == 0.0); // fully covered: zero by symmetry
    CHECK(directional_cap_moment(c2, 3.0, 0.5, 1.0) == 0.0); // outside
    CHECK_THROWS_AS(directional_cap_moment(c2, 0.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("cap kernels validate their arguments") {
    CapKernelContext c2 = make_cap_context(2);
    CHECK_THROWS_AS(cap_fraction(c2, -0.1, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(cap_fraction(c2, 0.1, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_cap_context(0), std::invalid_argument);
}

TEST_CASE("ball averages of the constant function are one in every dimension") {
    for (int d : {1, 2, 3, 4, 6}) {
        CapKernelContext ctx = make_cap_context(d);
        RadialProfile one = ones_profile(d);
        for (auto [s, r] : std::initializer_list<std::pair<double, double>>{
                 {0.0, 1.0}, {0.5, 0.5}, {1.0, 1.0}, {2.0, 0.7}, {0.3, 2.0}}) {
            CAPTURE(d);
            CAPTURE(s);
            CAPTURE(r);
            CHECK(ball_average(ctx, one, s, r) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("ball average closed forms") {
    SUBCASE("origin-centered ball against the plane tent: 1 - 2r/3") {
        CapKernelContext ctx = make_cap_context(2);
        RadialProfile f = make_tent(2, 0.025, 2.0, 1.0);
        CHECK(ball_average(ctx, f, 0.0, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
        CHECK(ball_average(ctx, f, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    }
    SUBCASE("through-origin disc against |x|: 32/(9 pi)") {
        CapKernelContext ctx = make_cap_context(2);
        CHECK(ball_average(ctx, identity_profile(2), 1.0, 1.0) ==
              doctest::Approx(32.0 / (9.0 * kPi)).epsilon(1e-5));
    }
    SUBCASE("through-origin ball in three dimensions against |x|: 6/5") {
        CapKernelContext ctx = make_cap_context(3);
        CHECK(ball_average(ctx, identity_profile(3), 1.0, 1.0) ==
              doctest::Approx(1.2).epsilon(1e-5));
    }
    SUBCASE("one-dimensional interval average of the tent") {
        CapKernelContext ctx = make_cap_context(1);
        RadialProfile f = make_tent(1, 0.025, 2.0, 1.0);
        // (1/0.6) int_{0.2}^{0.8} (1-u) du = 0.5
        CHECK(ball_average(ctx, f, 0.5, 0.3) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("Monte-Carlo oracle confirms mass and directional averages") {
    const std::size_t n = 400000;
    for (int d : {2, 3}) {
        CapKernelContext ctx = make_cap_context(d);
        RadialProfile f = make_tent(d, 0.025, 2.0, 1.0);
        RadialProfile g = weak_derivative(modulus(f));
        for (auto [s, r] : std::initializer_list<std::pair<double, double>>{
                 {0.6, 0.5}, {0.4, 0.4}, {1.1, 0.35}}) {
            McPair mc = mc_ball_averages(f, g, d, s, r, 4242 + uint64_t(d), n);
            double mass = ball_average(ctx, f, s, r);
            double dir = directional_ball_average(ctx, g, s, r);
            CAPTURE(d);
            CAPTURE(s);
            CAPTURE(r);
            CHECK(mass == doctest::Approx(mc.mass).epsilon(0.01));
            CHECK(dir == doctest::Approx(mc.directional).epsilon(0.05));
        }
    }
}

TEST_CASE("scaled-mass average equals the plain average of the lifted profile") {
    // weight u * inv_scale against ones == integrating |x| directly
    CapKernelContext ctx = make_cap_context(2);
    double got = ball_average_scaled_mass(ctx, ones_profile(2, 2.0), 1.0, 1.0, 1.0);
    CHECK(got == doctest::Approx(32.0 / (9.0 * kPi)).epsilon(1e-5));
    CHECK(ball_average_scaled_mass(ctx, ones_profile(2, 2.0), 1.0, 1.0, 0.0) == 0.0);
    // scaling the weight scales the result linearly
    double twice = ball_average_scaled_mass(ctx, ones_profile(2, 2.0), 1.0, 1.0, 2.0);
    CHECK(twice == doctest::Approx(2.0 * got).epsilon(1e-13));
}

TEST_CASE("ball averages of a decreasing profile decrease in the center offset") {
    CapKernelContext ctx = make_cap_context(2);
    RadialProfile f = make_tent(2, 0.025, 2.0, 1.0);
    double prev = ball_average(ctx, f, 0.0, 0.4);
    for (double s : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        double cur = ball_average(ctx, f, s, 0.4);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("average tables are deterministic and serialize losslessly") {
    RadialProfile f = make_tent(2, 0.05, 2.0, 1.0);
    auto s_grid = uniform_grid(0.0, 0.1, 12);
    auto r_grid = uniform_grid(0.1, 0.1, 8);
    AverageTable a = build_average_table(f, 0.5, s_grid, r_grid, 1);
    AverageTable b = build_average_table(f, 0.5, s_grid, r_grid, 4);
    CHECK(a.a == b.a); // threading must not change a single bit

    SUBCASE("values match direct ball averages") {
        CapKernelContext ctx = make_cap_context(2);
        double want = std::pow(r_grid[3], 0.5) * ball_average(ctx, f, s_grid[5], r_grid[3]);
        CHECK(a.at(5, 3) == doctest::Approx(want).epsilon(1e-13));
    }
    SUBCASE("cells whose ball misses the support are exactly zero") {
        // s - r >= t_max: the row loop stops early and leaves zeros
        CHECK(a.at(11, 0) == 0.0); // s = 1.1, r = 0.1, support radius 1.0
    }
    SUBCASE("binary round trip is lossless") {
        std::string path = "table_roundtrip.bin";
        a.save_binary(path);
        AverageTable c = AverageTable::load_binary(path);
        CHECK(c.d == a.d);
        CHECK(c.beta == a.beta);
        CHECK(c.f_hash == a.f_hash);
        CHECK(c.s_grid == a.s_grid);
        CHECK(c.r_grid == a.r_grid);
        CHECK(c.a == a.a);
        std::remove(path.c_str());
    }
    SUBCASE("corrupt files are rejected") {
        std::string path = "table_corrupt.bin";
        std::FILE* fp = std::fopen(path.c_str(), "wb");
        std::fputs("definitely not a table", fp);
        std::fclose(fp);
        CHECK_THROWS_AS(AverageTable::load_binary(path), std::runtime_error);
        std::remove(path.c_str());
    }
}

TEST_CASE("uniform grids enumerate start + i*step") {
    auto g = uniform_grid(0.5, 0.25, 4);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == 0.5);
    CHECK(g[3] == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(uniform_grid(0.0, 1.0, 0).empty());
}
