#include "mfrac/radial.hpp"

#include "mfrac/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace mfrac {

double unit_ball_volume(int d) {
    if (d < 1) throw std::invalid_argument("unit_ball_volume: d must be >= 1");
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

// ---- hashing (FNV-1a over raw bytes; provenance ids, not crypto) --------

namespace {

uint64_t fnv1a(const void* data, std::size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t fnv1a_doubles(const std::vector<double>& xs, uint64_t h) {
    for (double x : xs) {
        uint64_t bits;
        std::memcpy(&bits, &x, 8);
        h = fnv1a(&bits, 8, h);
    }
    return h;
}

void check_grid(double h, double t_max) {
    if (!(h > 0.0)) throw std::invalid_argument("profile: h must be positive");
    if (!(t_max > 0.0)) throw std::invalid_argument("profile: t_max must be positive");
    if (h > t_max) throw std::invalid_argument("profile: h exceeds t_max");
}

std::vector<double> uniform_knots(double h, double t_max) {
    // t_max is kept exactly as the last knot; n*h may differ from it by fp dust
    std::size_t n = std::size_t(std::llround(t_max / h));
    if (n < 1) n = 1;
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = double(i) * h;
    t[n] = t_max;
    return t;
}

} // namespace

uint64_t RadialProfile::content_hash() const {
    uint64_t h0 = fnv1a(&d, sizeof d);
    unsigned char st = step ? 1 : 0;
    h0 = fnv1a(&st, 1, h0);
    h0 = fnv1a_doubles(t, h0);
    return fnv1a_doubles(v, h0);
}

uint64_t LineFunction::content_hash() const {
    uint64_t h0 = fnv1a(&x_min, sizeof x_min);
    h0 = fnv1a(&h, sizeof h, h0);
    return fnv1a_doubles(v, h0);
}

std::size_t RadialProfile::segment_of(double u) const {
    auto it = std::upper_bound(t.begin(), t.end(), u);
    if (it == t.begin()) return 0;
    std::size_t i = std::size_t(it - t.begin()) - 1;
    return std::min(i, t.size() - 2);
}

double RadialProfile::eval(double u) const {
    if (u < 0.0) throw std::invalid_argument("RadialProfile::eval: negative radius");
    if (u >= t.back()) return (step || u > t.back()) ? 0.0 : v.back();
    std::size_t i = segment_of(u);
    if (step) return v[i];
    double w = t[i + 1] - t[i];
    double lam = (u - t[i]) / w;
    return v[i] + lam * (v[i + 1] - v[i]);
}

double LineFunction::eval(double x) const {
    if (x <= x_min || x >= x_max) return 0.0;
    double s = (x - x_min) / h;
    int i = std::min(int(s), n() - 1);
    double lam = s - i;
    return v[i] + lam * (v[i + 1] - v[i]);
}

// ---- presets ------------------------------------------------------------

namespace {

template <class Fn>
RadialProfile sample_uniform(int d, double h, double t_max, Fn&& fn) {
    check_grid(h, t_max);
    RadialProfile f;
    f.d = d;
    f.h = h;
    f.t = uniform_knots(h, t_max);
    f.v.resize(f.t.size());
    for (std::size_t i = 0; i < f.t.size(); ++i) f.v[i] = fn(f.t[i]);
    f.v.back() = 0.0;
    return f;
}

} // namespace

RadialProfile make_tent(int d, double h, double t_max, double a) {
    if (!(a > 0.0) || a > t_max) throw std::invalid_argument("tent: need 0 < a <= t_max");
    return sample_uniform(d, h, t_max, [a](double t) { return std::max(0.0, 1.0 - t / a); });
}

RadialProfile make_smoothed_indicator(int d, double h, double t_max, double a, double ramp) {
    if (!(a > 0.0) || a > t_max) throw std::invalid_argument("smoothed_indicator: need 0 < a <= t_max");
    if (!(ramp > 0.0) || ramp > a) throw std::invalid_argument("smoothed_indicator: need 0 < ramp <= a");
    return sample_uniform(d, h, t_max, [a, ramp](double t) {
        if (t <= a - ramp) return 1.0;
        if (t >= a) return 0.0;
        return (a - t) / ramp;
    });
}

RadialProfile make_bump_sum(int d, double h, double t_max, const std::vector<Bump>& bumps) {
    if (bumps.empty()) throw std::invalid_argument("bump_sum: at least one bump is required");
    for (const Bump& b : bumps) {
        if (!(b.width > 0.0)) throw std::invalid_argument("bump_sum: width must be positive");
        if (b.center + b.width > t_max) throw std::invalid_argument("bump_sum: bump support exceeds t_max");
        if (b.center < 0.0) throw std::invalid_argument("bump_sum: negative center");
    }
    return sample_uniform(d, h, t_max, [&bumps](double t) {
        double acc = 0.0;
        for (const Bump& b : bumps) acc += b.height * std::max(0.0, 1.0 - std::abs(t - b.center) / b.width);
        return acc;
    });
}

RadialProfile make_random_pl(int d, double h, double t_max, uint64_t seed, int n_knots) {
    if (n_knots < 1) throw std::invalid_argument("random_pl: n_knots must be >= 1");
    SplitMix64 rng(seed);
    std::vector<double> kt(n_knots), kv(n_knots);
    for (double& x : kt) x = rng.uniform(0.05, 0.95) * t_max;
    std::sort(kt.begin(), kt.end());
    for (double& x : kv) x = rng.uniform(-1.0, 1.0);
    double v0 = rng.uniform(-1.0, 1.0);
    // control polygon (0, v0), (kt_i, kv_i), (t_max, 0), sampled at the grid
    auto poly = [&](double t) {
        double pt = 0.0, pv = v0;
        for (int i = 0; i <= n_knots; ++i) {
            double ct = (i < n_knots) ? kt[i] : t_max;
            double cv = (i < n_knots) ? kv[i] : 0.0;
            if (t <= ct) {
                double w = ct - pt;
                return w <= 0.0 ? cv : pv + (t - pt) / w * (cv - pv);
            }
            pt = ct;
            pv = cv;
        }
        return 0.0;
    };
    return sample_uniform(d, h, t_max, poly);
}

RadialProfile make_profile(const ProfileSpec& spec, int d, double h, double t_max) {
    if (spec.preset == "tent") return make_tent(d, h, t_max, spec.a);
    if (spec.preset == "smoothed_indicator")
        return make_smoothed_indicator(d, h, t_max, spec.a, spec.ramp);
    if (spec.preset == "bump_sum") return make_bump_sum(d, h, t_max, spec.bumps);
    if (spec.preset == "random_pl") {
        if (!spec.has_seed) throw std::invalid_argument("random_pl: seed required");
        return make_random_pl(d, h, t_max, spec.seed, spec.n_knots);
    }
    throw std::invalid_argument("make_profile: unknown preset '" + spec.preset + "'");
}

// ---- calculus -----------------------------------------------------------

RadialProfile modulus(const RadialProfile& f) {
    RadialProfile g;
    g.d = f.d;
    g.h = f.h;
    g.step = f.step;
    if (f.step) {
        g.t = f.t;
        g.v.resize(f.v.size());
        for (std::size_t i = 0; i < f.v.size(); ++i) g.v[i] = std::abs(f.v[i]);
        return g;
    }
    g.t.reserve(f.t.size());
    g.v.reserve(f.v.size());
    for (std::size_t i = 0; i + 1 < f.t.size(); ++i) {
        g.t.push_back(f.t[i]);
        g.v.push_back(std::abs(f.v[i]));
        double a = f.v[i], b = f.v[i + 1];
        if ((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)) {
            double w = f.t[i + 1] - f.t[i];
            double lam = a / (a - b); // exact zero of the segment
            double tz = f.t[i] + lam * w;
            // skip degenerate slivers that would create zero-length segments
            if (tz > f.t[i] + 1e-13 * std::max(1.0, w) && tz < f.t[i + 1] - 1e-13 * std::max(1.0, w)) {
                g.t.push_back(tz);
                g.v.push_back(0.0);
            }
        }
    }
    g.t.push_back(f.t.back());
    g.v.push_back(std::abs(f.v.back()));
    return g;
}

RadialProfile weak_derivative(const RadialProfile& f) {
    if (f.step) throw std::invalid_argument("weak_derivative: input is already a step profile");
    RadialProfile g;
    g.d = f.d;
    g.h = f.h;
    g.step = true;
    g.t = f.t;
    std::size_t n = f.t.size() - 1;
    g.v.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) g.v[i] = (f.v[i + 1] - f.v[i]) / (f.t[i + 1] - f.t[i]);
    g.v[n] = g.v[n - 1]; // last knot carries the left-hand slope
    return g;
}

namespace {

std::vector<double> knot_union(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> u;
    u.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    std::vector<double> out;
    out.reserve(u.size());
    for (double x : u) {
        if (out.empty() || x - out.back() > 1e-13 * std::max(1.0, std::abs(x))) out.push_back(x);
    }
    return out;
}

} // namespace

RadialProfile pl_combine(double ca, const RadialProfile& f, double cb, const RadialProfile& g) {
    if (f.step || g.step) throw std::invalid_argument("pl_combine: step profiles not supported");
    if (f.d != g.d) throw std::invalid_argument("pl_combine: dimension mismatch");
    RadialProfile out;
    out.d = f.d;
    out.h = std::min(f.h, g.h);
    out.t = knot_union(f.t, g.t);
    out.v.resize(out.t.size());
    for (std::size_t i = 0; i < out.t.size(); ++i)
        out.v[i] = ca * f.eval(std::min(out.t[i], f.t_max())) + cb * g.eval(std::min(out.t[i], g.t_max()));
    return out;
}

double weighted_power_integral(const RadialProfile& g, double p, int d) {
    if (!(p >= 1.0)) throw std::invalid_argument("weighted_power_integral: p must be >= 1");
    if (g.step) {
        // |c|^p (b^d - a^d) / d per segment, exact
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < g.t.size(); ++i) {
            double c = std::abs(g.v[i]);
            if (c == 0.0) continue;
            acc += std::pow(c, p) * (std::pow(g.t[i + 1], d) - std::pow(g.t[i], d)) / d;
        }
        return acc;
    }
    // 4-point Gauss per knot cell (|m| is linear inside each one): exact for
    // integer p + d - 1 <= 7, otherwise accurate far past every tolerance used
    static constexpr double gx[4] = {-0.8611363115940526, -0.33998104358485626,
                                     0.33998104358485626, 0.8611363115940526};
    static constexpr double gw[4] = {0.34785484513745385, 0.6521451548625461,
                                     0.6521451548625461, 0.34785484513745385};
    RadialProfile m = modulus(g);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < m.t.size(); ++i) {
        double a = m.t[i], b = m.t[i + 1];
        double w = b - a;
        if (w <= 0.0) continue;
        double va = m.v[i], vb = m.v[i + 1];
        double c = 0.5 * (a + b), hh = 0.5 * w;
        for (int q = 0; q < 4; ++q) {
            double x = c + hh * gx[q];
            double val = va + (x - a) / w * (vb - va);
            acc += hh * gw[q] * std::pow(val, p) * (d == 1 ? 1.0 : std::pow(x, d - 1));
        }
    }
    return acc;
}

double support_radius(const RadialProfile& f) {
    std::size_t last = f.t.size(); // index past the last nonzero value
    for (std::size_t i = f.t.size(); i-- > 0;)
        if (f.v[i] != 0.0) {
            last = i;
            break;
        }
    if (last == f.t.size()) return 0.0;
    // a nonzero knot value reaches into the next segment before hitting zero
    return f.t[std::min(last + 1, f.t.size() - 1)];
}

double lp_norm(const RadialProfile& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : f.v) m = std::max(m, std::abs(x));
        return m;
    }
    double dd = double(f.d);
    double i = weighted_power_integral(f, p, f.d);
    return std::pow(dd * unit_ball_volume(f.d) * i, 1.0 / p);
}

double grad_l1(const RadialProfile& f) {
    const RadialProfile* der = &f;
    RadialProfile tmp;
    if (!f.step) {
        tmp = weak_derivative(f);
        der = &tmp;
    }
    // omega_d * sum |slope| (b^d - a^d), exact
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < der->t.size(); ++i)
        acc += std::abs(der->v[i]) * (std::pow(der->t[i + 1], f.d) - std::pow(der->t[i], f.d));
    return unit_ball_volume(f.d) * acc;
}

double w11_dist(const RadialProfile& f, const RadialProfile& g) {
    RadialProfile diff = pl_combine(1.0, f, -1.0, g);
    return lp_norm(diff, 1.0) + grad_l1(diff);
}

NormReport norm_report(const RadialProfile& f, double p, double q) {
    NormReport r;
    r.p = p;
    r.q = q;
    r.l1 = lp_norm(f, 1.0);
    r.lp = lp_norm(f, p);
    r.linf = lp_norm(f, std::numeric_limits<double>::infinity());
    r.grad_l1 = grad_l1(f);
    r.w11 = r.l1 + r.grad_l1;
    return r;
}

// ---- line functions ------------------------------------------------------

namespace {

LineFunction sample_line(double x_min, double x_max, double h, auto&& fn) {
    check_grid(h, x_max - x_min);
    LineFunction f;
    f.x_min = x_min;
    f.x_max = x_max;
    f.h = h;
    std::size_t n = std::size_t(std::llround((x_max - x_min) / h));
    f.v.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f.v[i] = fn(x_min + double(i) * h);
    f.v.front() = 0.0;
    f.v.back() = 0.0;
    return f;
}

} // namespace

LineFunction make_line_tent(double center, double a, double h, double x_min, double x_max) {
    if (!(a > 0.0)) throw std::invalid_argument("line tent: width must be positive");
    if (center - a < x_min || center + a > x_max)
        throw std::invalid_argument("line tent: support exceeds the window");
    return sample_line(x_min, x_max, h,
                       [center, a](double x) { return std::max(0.0, 1.0 - std::abs(x - center) / a); });
}

LineFunction make_line_random(uint64_t seed, int n_knots, double lo, double hi,
                              double h, double x_min, double x_max) {
    if (n_knots < 1) throw std::invalid_argument("line random: n_knots must be >= 1");
    if (lo < x_min || hi > x_max || !(hi > lo))
        throw std::invalid_argument("line random: support window invalid");
    SplitMix64 rng(seed);
    std::vector<double> kt(n_knots), kv(n_knots);
    for (double& x : kt) x = lo + (hi - lo) * rng.uniform(0.05, 0.95);
    std::sort(kt.begin(), kt.end());
    for (double& x : kv) x = rng.uniform(-1.0, 1.0);
    auto poly = [&](double x) -> double {
        if (x <= lo || x >= hi) return 0.0;
        double pt = lo, pv = 0.0;
        for (int i = 0; i <= n_knots; ++i) {
            double ct = (i < n_knots) ? kt[i] : hi;
            double cv = (i < n_knots) ? kv[i] : 0.0;
            if (x <= ct) {
                double w = ct - pt;
                return w <= 0.0 ? cv : pv + (x - pt) / w * (cv - pv);
            }
            pt = ct;
            pv = cv;
        }
        return 0.0;
    };
    return sample_line(x_min, x_max, h, poly);
}

LineFunction line_from_profile_even(const RadialProfile& f, double pad) {
    if (f.step) throw std::invalid_argument("line_from_profile_even: step profile");
    double w = f.t_max() + pad;
    return sample_line(-w, w, f.h, [&f](double x) {
        double u = std::abs(x);
        return u > f.t_max() ? 0.0 : f.eval(u);
    });
}

namespace {

// exact integral of |linear| over one segment of width w going va -> vb
double segment_abs_integral(double va, double vb, double w) {
    if ((va >= 0.0 && vb >= 0.0) || (va <= 0.0 && vb <= 0.0))
        return 0.5 * w * (std::abs(va) + std::abs(vb));
    double lam = va / (va - vb); // crossing position
    return 0.5 * w * (lam * std::abs(va) + (1.0 - lam) * std::abs(vb));
}

} // namespace

std::vector<double> prefix_abs_integral(const LineFunction& f) {
    std::vector<double> P(f.v.size());
    P[0] = 0.0;
    for (std::size_t i = 0; i + 1 < f.v.size(); ++i)
        P[i + 1] = P[i] + segment_abs_integral(f.v[i], f.v[i + 1], f.h);
    return P;
}

double line_power_integral(const std::vector<double>& g, double /*x0*/, double h, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("line_power_integral: p must be >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        double va = g[i], vb = g[i + 1];
        auto piece = [p](double a, double b, double w) {
            // trapezoid on nodes+midpoint of |linear|^p, linear already one-signed
            double am = std::abs(a), bm = std::abs(b), mm = std::abs(0.5 * (a + b));
            return 0.25 * w * (std::pow(am, p) + 2.0 * std::pow(mm, p) + std::pow(bm, p));
        };
        if ((va >= 0.0 && vb >= 0.0) || (va <= 0.0 && vb <= 0.0)) {
            acc += piece(va, vb, h);
        } else {
            double lam = va / (va - vb);
            acc += piece(va, 0.0, lam * h) + piece(0.0, vb, (1.0 - lam) * h);
        }
    }
    return acc;
}

double line_lp_norm(const std::vector<double>& g, double x0, double h, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : g) m = std::max(m, std::abs(x));
        return m;
    }
    return std::pow(line_power_integral(g, x0, h, p), 1.0 / p);
}

double line_grad_l1(const LineFunction& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < f.v.size(); ++i) acc += std::abs(f.v[i + 1] - f.v[i]);
    return acc;
}

} // namespace mfrac
