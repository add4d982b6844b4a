#pragma once
#include <cstdint>
#include <string>
#include <vector>

// Discretized radial functions on R^d and compactly supported piecewise-linear
// functions on the line. Everything downstream (ball averages, maximal
// operators, derivative checks) consumes these two types.
//
// A radial function f(x) = profile(|x|) is stored through its profile on
// [0, t_max]. Profiles are piecewise-linear over an explicit knot vector;
// make_profile produces uniform knots i*h, and operations that need new nodes
// (modulus at sign changes) insert them so the class stays exactly closed.
// A profile with step = true is interpreted as piecewise CONSTANT: the value
// on [t_i, t_{i+1}) is v[i]. Weak derivatives live in that form, which keeps
// their integrals exact.
namespace mfrac {

double unit_ball_volume(int d); // omega_d

struct RadialProfile {
    int d = 1;
    double h = 0.0;         // nominal construction spacing (kept through refinement)
    std::vector<double> t;  // knots, strictly ascending, t.front() == 0
    std::vector<double> v;  // values at knots (step = true: value on [t_i, t_{i+1}))
    bool step = false;

    double t_max() const { return t.back(); }
    // f(|x|) for |x| = u >= 0; zero beyond t_max
    double eval(double u) const;
    // index of the segment containing u, i.e. largest i with t[i] <= u
    std::size_t segment_of(double u) const;
    uint64_t content_hash() const;
};

struct LineFunction {
    double x_min = 0.0, x_max = 0.0, h = 0.0;
    std::vector<double> v; // samples at x_min + i*h; v.front() == v.back() == 0

    int n() const { return int(v.size()) - 1; }
    double x_at(int i) const { return x_min + i * h; }
    double eval(double x) const;
    uint64_t content_hash() const;
};

struct NormReport {
    double p = 1.0, q = 1.0;
    double l1 = 0.0, lp = 0.0, linf = 0.0;
    double grad_l1 = 0.0;
    double w11 = 0.0; // l1 + grad_l1
};

// ---- presets ----------------------------------------------------------

struct Bump {
    double center, width, height;
};

struct ProfileSpec {
    std::string preset = "tent"; // tent | smoothed_indicator | bump_sum | random_pl
    double a = 1.0;              // tent/indicator outer radius
    double ramp = 0.1;           // indicator ramp width
    std::vector<Bump> bumps{{0.3, 0.3, 1.0}, {0.9, 0.25, 0.6}};
    uint64_t seed = 0; // random_pl; a seed is required there
    int n_knots = 5;
    bool has_seed = false;
};

// Samples the preset at the uniform grid {i*h}. Throws std::invalid_argument
// on nonsensical geometry (h <= 0, t_max <= 0, support reaching past t_max,
// missing seed for random presets).
RadialProfile make_profile(const ProfileSpec& spec, int d, double h, double t_max);

RadialProfile make_tent(int d, double h, double t_max, double a);
RadialProfile make_smoothed_indicator(int d, double h, double t_max, double a, double ramp);
RadialProfile make_bump_sum(int d, double h, double t_max, const std::vector<Bump>& bumps);
RadialProfile make_random_pl(int d, double h, double t_max, uint64_t seed, int n_knots);

// ---- calculus on profiles ---------------------------------------------

// |f|, with a knot inserted at every sign change so the result is exactly
// piecewise-linear. Step profiles just take absolute values.
RadialProfile modulus(const RadialProfile& f);

// Piecewise-constant slope profile (step = true), same knots. Evaluating it
// at a knot yields the right-hand slope; the last knot carries the left-hand
// slope.
RadialProfile weak_derivative(const RadialProfile& f);

// a*f + b*g on the union of knot vectors (exact for piecewise-linear inputs).
RadialProfile pl_combine(double a, const RadialProfile& f, double b, const RadialProfile& g);

// integral of |g|^p t^(d-1) dt over the support. Piecewise-linear profiles:
// 4-point Gauss per knot cell after sign-knot insertion (exact whenever
// p + d - 1 <= 7 with integer p). Step profiles: exact per segment.
double weighted_power_integral(const RadialProfile& g, double p, int d);

// radius of the smallest ball containing the support (0 for the zero profile)
double support_radius(const RadialProfile& f);

// (d omega_d integral |f|^p t^(d-1) dt)^(1/p); p = inf -> max |f|
double lp_norm(const RadialProfile& f, double p);
// d omega_d integral |f'| t^(d-1) dt, exact per segment
double grad_l1(const RadialProfile& f);
// ||f - g||_L1 + ||f' - g'||_L1 on the knot union
double w11_dist(const RadialProfile& f, const RadialProfile& g);

NormReport norm_report(const RadialProfile& f, double p, double q);

// ---- line functions ----------------------------------------------------

LineFunction make_line_tent(double center, double a, double h, double x_min, double x_max);
// random piecewise-linear control polygon sampled on the grid; support inside
// [lo, hi], endpoints zero
LineFunction make_line_random(uint64_t seed, int n_knots, double lo, double hi,
                              double h, double x_min, double x_max);
// even extension of a d=1 profile onto [-t_max - pad, t_max + pad]
LineFunction line_from_profile_even(const RadialProfile& f, double pad);

// P[i] = integral of |f| from x_min to x_i, exact per segment including
// interior sign crossings
std::vector<double> prefix_abs_integral(const LineFunction& f);

// integral |g(x)|^p dx over the window for samples g on a uniform grid;
// segments are split at sign crossings, then trapezoid on nodes+midpoints
double line_power_integral(const std::vector<double>& g, double x0, double h, double p);
double line_lp_norm(const std::vector<double>& g, double x0, double h, double p);
// sum |slope| * h: total variation = ||f'||_L1 on the line, exact
double line_grad_l1(const LineFunction& f);

} // namespace mfrac
