#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfrac/geometry.hpp"
#include "mfrac/maximal.hpp"
#include "mfrac/radial.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

using namespace mfrac;

namespace {

// Reference search: a plain double loop over every table cell, applying the
// variant's membership rule directly. No pruning, no kernels, no windowing —
// the value the real search must reproduce bit for bit.
double brute_best(const AverageTable& tab, double t, const VariantSpec& v) {
    double best = 0.0;
    for (std::size_t ir = 0; ir < tab.nr(); ++ir) {
        double r = tab.r_grid[ir];
        if (v.kind == Variant::truncated && r > v.trunc_factor * t + 1e-9) continue;
        for (std::size_t is = 0; is < tab.ns(); ++is) {
            double s = tab.s_grid[is];
            bool member;
            switch (v.kind) {
                case Variant::inner_only: member = t - r >= -1e-12 && std::abs(s - (t - r)) <= 1e-9; break;
                case Variant::outer_only: member = std::abs(s - (t + r)) <= 1e-9; break;
                default: member = std::abs(s - t) <= r + 1e-9; break;
            }
            if (member && tab.at(is, ir) > best) best = tab.at(is, ir);
        }
    }
    return best;
}

// Same idea on the line: every interval [x_a, x_b] containing x_m.
double brute_best_1d(const LineFunction& f, const std::vector<double>& P, int m, double beta,
                     const VariantSpec& v) {
    int n = f.n();
    double best = (beta == 0.0) ? std::abs(f.v[std::size_t(m)]) : 0.0;
    if (v.kind == Variant::truncated && beta == 0.0 && f.x_at(m) == 0.0) best = 0.0;
    for (int a = 0; a <= m; ++a)
        for (int b = std::max(a + 1, m); b <= n; ++b) {
            double r = 0.5 * (b - a) * f.h;
            if (v.kind == Variant::truncated && r > v.trunc_factor * std::abs(f.x_at(m)) + 1e-9)
                continue;
            // same arithmetic shape as the search (scale precomputed, then one
            // multiply) so agreement can be checked bitwise
            double w = std::pow(r, beta) / ((b - a) * f.h);
            double val = w * (P[std::size_t(b)] - P[std::size_t(a)]);
            if (val > best) best = val;
        }
    return best;
}

} // namespace

TEST_CASE("variant names round-trip and reject junk") {
    for (Variant v : {Variant::noncentered, Variant::centered, Variant::truncated,
                      Variant::inner_only, Variant::outer_only})
        CHECK(variant_from_string(variant_name(v)) == v);
    CHECK_THROWS_AS(variant_from_string("sideways"), std::invalid_argument);
}

TEST_CASE("plane tent at the origin: sup at radius 1/2 with value sqrt(1/2)*(2/3)") {
    // avg over B(0,r) of (1 - u) is 1 - 2r/3; r^(1/2)(1 - 2r/3) peaks at r = 1/2,
    // a grid radius, and the integrand is polynomial, so the value is exact.
    RadialProfile f = make_tent(2, 0.025, 2.0, 1.0);
    const double want = std::sqrt(0.5) * (2.0 / 3.0);
    for (Variant k : {Variant::noncentered, Variant::centered}) {
        VariantSpec v{k};
        MaximalResult res = maximal_profile(f, 0.5, v, {0.0});
        CAPTURE(variant_name(k));
        CHECK(res.value[0] == doctest::Approx(want).epsilon(1e-12));
        REQUIRE(!res.good[0].balls.empty());
        CHECK(res.good[0].r_min == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("line tent at the origin: sup at radius 2/3 with value (2/3)^(3/2)") {
    LineFunction f = make_line_tent(0.0, 1.0, 0.025, -2.2, 2.2);
    Max1D res = maximal_1d(f, 0.5, VariantSpec{Variant::centered});
    int m = int(std::llround((0.0 - f.x_min) / f.h));
    REQUIRE(res.x[std::size_t(m)] == doctest::Approx(0.0).epsilon(1e-15));
    const double want = std::pow(2.0 / 3.0, 1.5);
    CHECK(res.value[std::size_t(m)] == doctest::Approx(want).epsilon(1e-3));
    const GoodBallSet& g = res.good[std::size_t(m)];
    REQUIRE(!g.balls.empty());
    CHECK(g.r_min >= 2.0 / 3.0 - 2 * f.h);
    CHECK(g.r_max <= 2.0 / 3.0 + 2 * f.h);

    // the radial d = 1 pipeline must land on the same closed form
    RadialProfile fr = make_tent(1, 0.025, 2.0, 1.0);
    MaximalResult rr = maximal_profile(fr, 0.5, VariantSpec{Variant::centered}, {0.0});
    CHECK(rr.value[0] == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("table search equals the brute-force reference on every variant") {
    RadialProfile f = make_bump_sum(2, 0.05, 2.0, {{0.3, 0.3, 1.0}, {0.9, 0.25, 0.6}});
    std::vector<double> eval = uniform_grid(0.0, 0.05, 25); // up to t = 1.2
    for (double beta : {0.0, 0.5}) {
        AverageTable tab;
        VariantSpec nc{Variant::noncentered};
        MaximalResult base = maximal_profile(f, beta, nc, eval, {}, 1, &tab);
        RadialProfile fa = modulus(f);
        for (Variant k : {Variant::noncentered, Variant::truncated, Variant::inner_only,
                          Variant::outer_only}) {
            VariantSpec v{k};
            MaximalResult res = maximal_profile(f, beta, v, eval);
            for (std::size_t i = 0; i < eval.size(); ++i) {
                double want = brute_best(tab, eval[i], v);
                if (beta == 0.0 && !(k == Variant::truncated && eval[i] == 0.0))
                    want = std::max(want, fa.eval(eval[i]));
                CAPTURE(variant_name(k));
                CAPTURE(beta);
                CAPTURE(eval[i]);
                CHECK(res.value[i] == want); // bitwise: same cells, same max
            }
        }
        (void)base;
    }
}

TEST_CASE("line search equals the brute-force reference") {
    LineFunction f = make_line_random(99, 6, -1.0, 1.2, 0.05, -2.0, 2.0);
    std::vector<double> P = prefix_abs_integral(f);
    for (double beta : {0.0, 0.5}) {
        for (Variant k : {Variant::noncentered, Variant::truncated}) {
            VariantSpec v{k};
            Max1D res = maximal_1d(f, beta, v);
            for (int m = 0; m <= f.n(); m += 7) {
                CAPTURE(beta);
                CAPTURE(variant_name(k));
                CAPTURE(f.x_at(m));
                CHECK(res.value[std::size_t(m)] == brute_best_1d(f, P, m, beta, v));
            }
        }
    }
}

TEST_CASE("restricting the ball family can only lower the sup") {
    RadialProfile f = make_tent(2, 0.05, 2.0, 1.0);
    std::vector<double> eval = uniform_grid(0.05, 0.05, 24);
    MaximalResult nc = maximal_profile(f, 0.5, VariantSpec{Variant::noncentered}, eval);
    for (Variant k : {Variant::centered, Variant::truncated, Variant::inner_only,
                      Variant::outer_only}) {
        MaximalResult res = maximal_profile(f, 0.5, VariantSpec{k}, eval);
        for (std::size_t i = 0; i < eval.size(); ++i) {
            CAPTURE(variant_name(k));
            CAPTURE(eval[i]);
            CHECK(res.value[i] <= nc.value[i]);
        }
    }
}

TEST_CASE("at beta = 0 the maximal function dominates the function") {
    std::vector<double> eval = uniform_grid(0.0, 0.05, 30);
    for (const char* preset : {"tent", "bump_sum"}) {
        ProfileSpec spec;
        spec.preset = preset;
        RadialProfile f = make_profile(spec, 2, 0.05, 2.0);
        RadialProfile fa = modulus(f);
        for (Variant k : {Variant::noncentered, Variant::centered}) {
            MaximalResult res = maximal_profile(f, 0.0, VariantSpec{k}, eval);
            for (std::size_t i = 0; i < eval.size(); ++i) {
                CAPTURE(preset);
                CAPTURE(eval[i]);
                CHECK(res.value[i] >= fa.eval(eval[i]));
            }
        }
    }
    // plateau of the smoothed indicator: the point value 1 is attained
    ProfileSpec ind;
    ind.preset = "smoothed_indicator";
    RadialProfile g = make_profile(ind, 2, 0.05, 2.0);
    MaximalResult res = maximal_profile(g, 0.0, VariantSpec{Variant::noncentered}, {0.4});
    CHECK(res.value[0] >= 1.0);
    CHECK(res.value[0] == doctest::Approx(1.0).epsilon(2e-5));
}

TEST_CASE("doubling the function doubles the maximal function exactly") {
    RadialProfile f = make_tent(2, 0.05, 2.0, 1.0);
    RadialProfile f2 = pl_combine(2.0, f, 0.0, f);
    std::vector<double> eval = uniform_grid(0.0, 0.1, 12);
    for (double beta : {0.0, 0.5, 1.5}) {
        MaximalResult a = maximal_profile(f, beta, VariantSpec{}, eval);
        MaximalResult b = maximal_profile(f2, beta, VariantSpec{}, eval);
        for (std::size_t i = 0; i < eval.size(); ++i)
            CHECK(b.value[i] == 2.0 * a.value[i]); // power-of-two scaling is exact

        LineFunction lf = make_line_tent(0.3, 0.8, 0.05, -2.0, 2.0);
        LineFunction lf2 = lf;
        for (double& x : lf2.v) x *= 2.0;
        if (beta < 1.0) {
            Max1D la = maximal_1d(lf, beta, VariantSpec{});
            Max1D lb = maximal_1d(lf2, beta, VariantSpec{});
            CHECK(la.value.size() == lb.value.size());
            for (std::size_t i = 0; i < la.value.size(); ++i)
                CHECK(lb.value[i] == 2.0 * la.value[i]);
        }
    }
}

TEST_CASE("translating a line function translates its maximal function") {
    double h = 0.025;
    LineFunction a = make_line_tent(0.0, 1.0, h, -2.0, 2.0);
    LineFunction b = make_line_tent(0.5, 1.0, h, -2.0, 2.0);
    Max1D ma = maximal_1d(a, 0.5, VariantSpec{});
    Max1D mb = maximal_1d(b, 0.5, VariantSpec{});
    int shift = int(std::llround(0.5 / h));
    for (int i = 0; i + shift <= a.n(); i += 5) {
        if (std::abs(ma.value[std::size_t(i)]) < 1e-12) continue;
        CHECK(mb.value[std::size_t(i + shift)] ==
              doctest::Approx(ma.value[std::size_t(i)]).epsilon(1e-11));
    }
}

TEST_CASE("pruning and threading change nothing observable") {
    RadialProfile f = make_bump_sum(2, 0.05, 2.0, {{0.3, 0.3, 1.0}, {0.9, 0.25, 0.6}});
    std::vector<double> eval = uniform_grid(0.0, 0.05, 25);
    SearchParams plain;
    plain.prune = false;
    MaximalResult a = maximal_profile(f, 0.5, VariantSpec{}, eval, plain, 1);
    SearchParams pruned;
    pruned.prune = true;
    MaximalResult b = maximal_profile(f, 0.5, VariantSpec{}, eval, pruned, 4);
    CHECK(a.value == b.value);
    REQUIRE(a.good.size() == b.good.size());
    for (std::size_t i = 0; i < a.good.size(); ++i) {
        CHECK(a.good[i].value == b.good[i].value);
        CHECK(a.good[i].balls.size() == b.good[i].balls.size());
    }
}

TEST_CASE("degenerate inputs") {
    SUBCASE("the zero profile has a zero maximal function and no argmax") {
        RadialProfile z;
        z.d = 2;
        z.h = 0.25;
        z.t = {0.0, 1.0};
        z.v = {0.0, 0.0};
        MaximalResult res = maximal_profile(z, 0.5, VariantSpec{}, {0.0, 0.5});
        for (double v : res.value) CHECK(v == 0.0);
        for (const GoodBallSet& g : res.good) CHECK(g.balls.empty());
    }
    SUBCASE("truncated at the origin admits no ball at all") {
        RadialProfile f = make_tent(2, 0.05, 2.0, 1.0);
        for (double beta : {0.0, 0.5}) {
            MaximalResult res = maximal_profile(f, beta, VariantSpec{Variant::truncated}, {0.0});
            CHECK(res.value[0] == 0.0);
            CHECK(res.good[0].empty_admissible);
        }
    }
    SUBCASE("the exponent must stay inside [0, d)") {
        RadialProfile f = make_tent(2, 0.05, 2.0, 1.0);
        CHECK_THROWS_AS(maximal_profile(f, 2.0, VariantSpec{}, {0.0}), std::invalid_argument);
        CHECK_THROWS_AS(maximal_profile(f, -0.1, VariantSpec{}, {0.0}), std::invalid_argument);
        LineFunction lf = make_line_tent(0.0, 1.0, 0.05, -2.0, 2.0);
        CHECK_THROWS_AS(maximal_1d(lf, 1.0, VariantSpec{}), std::invalid_argument);
    }
    SUBCASE("centered values never come from the table") {
        RadialProfile f = make_tent(2, 0.05, 2.0, 1.0);
        AverageTable tab = build_average_table(f, 0.5, uniform_grid(0.0, 0.1, 10),
                                               uniform_grid(0.1, 0.1, 10));
        CHECK_THROWS_AS(maximal_radial(tab, 0.5, VariantSpec{Variant::centered}, 1e-6),
                        std::invalid_argument);
        CHECK_THROWS_AS(maximal_radial(tab, -0.5, VariantSpec{}, 1e-6), std::invalid_argument);
    }
}

TEST_CASE("radius statistics respect the envelope floor") {
    RadialProfile f = make_tent(2, 0.025, 2.0, 1.0);
    std::vector<double> eval = uniform_grid(0.0, 0.05, 25);
    MaximalResult res = maximal_profile(f, 0.5, VariantSpec{}, eval);
    EnvelopeData env{lp_norm(f, std::numeric_limits<double>::infinity()), lp_norm(f, 1.0)};
    RadiusStats st = good_radius_stats(res, env, 0.025);
    CHECK(st.n_points == eval.size());
    CHECK(st.n_empty == 0);
    CHECK(st.r_min > 0.0);
    CHECK(st.r_max >= st.r_min);
    std::size_t total = 0, listed = 0;
    for (std::size_t c : st.histogram) total += c;
    for (const GoodBallSet& g : res.good) listed += g.balls.size();
    CHECK(total == listed);
    // every good ball's radius clears (value/linf)^(1/beta) - h: with beta = 1/2
    // a ball of radius r can reach r^beta * linf at most
    CHECK(st.min_radius_slack >= 0.0);
}

TEST_CASE("truncated good balls obey the radius constraint") {
    RadialProfile f = make_tent(2, 0.05, 2.0, 1.0);
    std::vector<double> eval = uniform_grid(0.2, 0.1, 10);
    VariantSpec v{Variant::truncated};
    MaximalResult res = maximal_profile(f, 0.5, v, eval);
    for (std::size_t i = 0; i < eval.size(); ++i)
        for (const GoodBall& b : res.good[i].balls) {
            CHECK(b.r <= v.trunc_factor * eval[i] + 1e-9);
            CHECK(std::abs(b.s - eval[i]) <= b.r + 1e-9);
        }
}
