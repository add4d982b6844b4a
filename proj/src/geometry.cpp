#include "mfrac/geometry.hpp"

#include "mfrac/csvio.hpp"
#include "mfrac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace mfrac {

namespace {

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n. Machine
// precision for n = 64; built once per context.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - z); // map [-1,1] -> [0,1], descending z -> ascending x
        w[i] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
}

// int_0^theta sin^(d-2) phi dphi
double sine_power_integral(const CapKernelContext& ctx, double theta) {
    switch (ctx.d) {
        case 2: return theta;
        case 3: return 1.0 - std::cos(theta);
        default: {
            double acc = 0.0;
            for (std::size_t i = 0; i < ctx.gl_x.size(); ++i) {
                double phi = theta * ctx.gl_x[i];
                acc += ctx.gl_w[i] * std::pow(std::sin(phi), ctx.d - 2);
            }
            return theta * acc;
        }
    }
}

void check_usr(double u, double s, double r) {
    if (!(u >= 0.0)) throw std::invalid_argument("cap kernels: u must be nonnegative");
    if (!(s >= 0.0)) throw std::invalid_argument("cap kernels: s must be nonnegative");
    if (!(r > 0.0)) throw std::invalid_argument("cap kernels: r must be positive");
}

// cos(theta*), clamped; valid only in the partial regime with u, s > 0
double cap_cosine(double u, double s, double r) {
    double c = (u * u + s * s - r * r) / (2.0 * u * s);
    return std::min(1.0, std::max(-1.0, c));
}

// partial-regime fraction, u in (|s-r|, s+r); the u -> 0 limit (s == r) is the
// half-space through the origin
double partial_fraction(const CapKernelContext& ctx, double u, double s, double r) {
    if (u <= 0.0) return 0.5;
    if (ctx.d == 1) return 0.5;
    double th = std::acos(cap_cosine(u, s, r));
    return sine_power_integral(ctx, th) / ctx.c_d;
}

double partial_moment(const CapKernelContext& ctx, double u, double s, double r) {
    if (ctx.d == 1) return 0.5;
    double cth = (u <= 0.0) ? 0.0 : cap_cosine(u, s, r);
    double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
    return std::pow(sth, ctx.d - 1) / ((ctx.d - 1) * ctx.c_d);
}

} // namespace

CapKernelContext make_cap_context(int d) {
    if (d < 1) throw std::invalid_argument("make_cap_context: d must be >= 1");
    CapKernelContext ctx;
    ctx.d = d;
    ctx.omega_d = unit_ball_volume(d);
    // c_d = sqrt(pi) Gamma((d-1)/2) / Gamma(d/2); with the convention c_1 = 2
    // (two half-point masses) so that |S^(d-2)| c_d = d omega_d holds for d = 1
    ctx.c_d = (d == 1) ? 2.0
                       : std::sqrt(M_PI) * std::tgamma(0.5 * (d - 1)) / std::tgamma(0.5 * d);
    if (d >= 4) gauss_legendre_01(64, ctx.gl_x, ctx.gl_w);
    return ctx;
}

double cap_fraction(const CapKernelContext& ctx, double u, double s, double r) {
    check_usr(u, s, r);
    if (u + s <= r) return 1.0;
    if (u <= s - r || u >= s + r) return 0.0;
    return partial_fraction(ctx, u, s, r);
}

double directional_cap_moment(const CapKernelContext& ctx, double u, double s, double r) {
    check_usr(u, s, r);
    if (ctx.d >= 2 && s == 0.0)
        throw std::invalid_argument("directional_cap_moment: s = 0 has no outward direction");
    if (u + s <= r) return 0.0;
    if (u <= s - r || u >= s + r) return 0.0;
    return partial_moment(ctx, u, s, r);
}

// ---- ball integrals -------------------------------------------------------

namespace {

enum class Regime { full, partial };
enum class Kern { mass, directional, scaled_mass };

struct BallIntegrand {
    const CapKernelContext* ctx;
    const RadialProfile* g;
    Kern kern;
    bool take_abs;
    double inv_scale; // scaled_mass: extra weight u * inv_scale
};

double kern_weight(const BallIntegrand& bi, Regime reg, double u, double s, double r) {
    double k;
    if (reg == Regime::full) {
        // covered completely: fraction 1, first moment 0 by symmetry
        k = (bi.kern == Kern::directional) ? 0.0 : 1.0;
    } else {
        k = (bi.kern == Kern::directional) ? partial_moment(*bi.ctx, u, s, r)
                                           : partial_fraction(*bi.ctx, u, s, r);
    }
    if (bi.kern == Kern::scaled_mass) k *= u * bi.inv_scale;
    return k;
}

// 4-point Gauss-Legendre on [-1, 1]; exact through degree 7, so full-regime
// cells (polynomial weight times a linear profile segment) carry no quadrature
// error for any d <= 6
constexpr double kGx[4] = {-0.8611363115940526, -0.33998104358485626, 0.33998104358485626,
                           0.8611363115940526};
constexpr double kGw[4] = {0.34785484513745385, 0.6521451548625461, 0.6521451548625461,
                           0.34785484513745385};

// integrate g(u) u^(d-1) kern(u) over [a, b] within one regime. Nodes: regime
// bounds, profile knots, geometric refinement toward partial edges (the cap
// opens/closes with a sqrt kink there); wide partial cells are split evenly,
// then each cell takes the 4-point Gauss rule on interior nodes.
double integrate_piece(const BallIntegrand& bi, double a, double b, Regime reg, double s, double r) {
    if (!(b > a)) return 0.0;
    const RadialProfile& g = *bi.g;
    const int d = bi.ctx->d;

    static thread_local std::vector<double> nodes;
    nodes.clear();
    nodes.push_back(a);
    {
        auto lo = std::upper_bound(g.t.begin(), g.t.end(), a);
        auto hi = std::lower_bound(g.t.begin(), g.t.end(), b);
        for (auto it = lo; it != hi; ++it)
            if (*it > nodes.back() + 1e-14 * std::max(1.0, *it)) nodes.push_back(*it);
    }
    if (b > nodes.back() + 1e-14 * std::max(1.0, b)) nodes.push_back(b);
    else nodes.back() = b;
    if (nodes.size() < 2) return 0.0;

    if (reg == Regime::partial && d >= 2) {
        // subdivide the first and last cells toward the edge, quarter steps
        double w0 = nodes[1] - nodes[0];
        double w1 = nodes[nodes.size() - 1] - nodes[nodes.size() - 2];
        double frac = 0.25;
        for (int k = 0; k < 4; ++k) {
            nodes.push_back(a + w0 * frac);
            nodes.push_back(b - w1 * frac);
            frac *= 0.25;
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    }

    const double wmax =
        (reg == Regime::partial) ? (b - a) / 16.0 : std::numeric_limits<double>::infinity();
    auto F = [&](double x) {
        double gv = g.eval(x);
        if (bi.take_abs) gv = std::abs(gv);
        double uw = (d == 1) ? 1.0 : std::pow(x, d - 1);
        return gv * uw * kern_weight(bi, reg, x, s, r);
    };

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double xa = nodes[i], xb = nodes[i + 1];
        if (xb - xa <= 0.0) continue;
        int m = 1;
        if (xb - xa > wmax) m = std::min(64, int(std::ceil((xb - xa) / wmax)));
        double step = (xb - xa) / m;
        for (int k = 0; k < m; ++k) {
            double c = xa + (k + 0.5) * step;
            double h = 0.5 * step;
            for (int q = 0; q < 4; ++q) acc += h * kGw[q] * F(c + h * kGx[q]);
        }
    }
    return acc;
}

double ball_integral(const BallIntegrand& bi, double s, double r) {
    const double T = bi.g->t_max();
    double acc = 0.0;
    if (r > s) acc += integrate_piece(bi, 0.0, std::min(r - s, T), Regime::full, s, r);
    double a = std::abs(s - r), b = std::min(s + r, T);
    if (b > a) acc += integrate_piece(bi, a, b, Regime::partial, s, r);
    int d = bi.ctx->d;
    return double(d) / std::pow(r, d) * acc;
}

void check_sr(double s, double r) {
    if (!(s >= 0.0)) throw std::invalid_argument("ball averages: s must be nonnegative");
    if (!(r > 0.0)) throw std::invalid_argument("ball averages: r must be positive");
}

} // namespace

double ball_average(const CapKernelContext& ctx, const RadialProfile& f, double s, double r) {
    check_sr(s, r);
    if (f.d != ctx.d) throw std::invalid_argument("ball_average: dimension mismatch");
    // sign changes inside segments would put kinks of |f| off the node set
    RadialProfile fm = modulus(f);
    BallIntegrand bi{&ctx, &fm, Kern::mass, true, 0.0};
    return ball_integral(bi, s, r);
}

double directional_ball_average(const CapKernelContext& ctx, const RadialProfile& g, double s, double r) {
    check_sr(s, r);
    if (g.d != ctx.d) throw std::invalid_argument("directional_ball_average: dimension mismatch");
    if (ctx.d >= 2 && s == 0.0)
        throw std::invalid_argument("directional_ball_average: s = 0 has no outward direction");
    BallIntegrand bi{&ctx, &g, Kern::directional, false, 0.0};
    return ball_integral(bi, s, r);
}

double ball_average_scaled_mass(const CapKernelContext& ctx, const RadialProfile& g, double s, double r,
                                double inv_scale) {
    check_sr(s, r);
    BallIntegrand bi{&ctx, &g, Kern::scaled_mass, true, inv_scale};
    return ball_integral(bi, s, r);
}

// ---- tables ----------------------------------------------------------------

std::vector<double> uniform_grid(double start, double step, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) g[i] = start + double(i) * step;
    return g;
}

AverageTable build_average_table(const RadialProfile& f, double beta,
                                 std::vector<double> s_grid, std::vector<double> r_grid,
                                 int threads) {
    if (s_grid.empty() || r_grid.empty()) throw std::invalid_argument("build_average_table: empty grid");
    if (!(r_grid.front() > 0.0)) throw std::invalid_argument("build_average_table: radii must be positive");
    AverageTable tab;
    tab.d = f.d;
    tab.beta = beta;
    tab.s_grid = std::move(s_grid);
    tab.r_grid = std::move(r_grid);
    tab.a.assign(tab.ns() * tab.nr(), 0.0);
    tab.f_hash = f.content_hash();

    RadialProfile fm = modulus(f);
    const double T = fm.t_max();
    CapKernelContext ctx = make_cap_context(f.d);
    const std::size_t ns = tab.ns();

    parallel_for(tab.nr(), threads, [&](std::size_t ir) {
        double r = tab.r_grid[ir];
        double rb = std::pow(r, beta);
        BallIntegrand bi{&ctx, &fm, Kern::mass, true, 0.0};
        double* row = tab.a.data() + ir * ns;
        for (std::size_t is = 0; is < ns; ++is) {
            double s = tab.s_grid[is];
            if (s - r >= T) break; // ascending s: every later cell misses the support too
            row[is] = rb * ball_integral(bi, s, r);
        }
    });
    return tab;
}

// ---- serialization ----------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'M', 'F', 'A', 'V', 'T', 'B', '0', '1'};

void put_u64(std::ofstream& os, uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (x >> (8 * i)) & 0xff; // little endian
    os.write(reinterpret_cast<char*>(b), 8);
}

uint64_t get_u64(std::ifstream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= uint64_t(b[i]) << (8 * i);
    return x;
}

void put_f64v(std::ofstream& os, const std::vector<double>& v) {
    for (double x : v) {
        uint64_t bits;
        std::memcpy(&bits, &x, 8);
        put_u64(os, bits);
    }
}

void get_f64v(std::ifstream& is, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        uint64_t bits = get_u64(is);
        std::memcpy(&v[i], &bits, 8);
    }
}
} // namespace

void AverageTable::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"s", "r", "value"});
    for (std::size_t is = 0; is < ns(); ++is)
        for (std::size_t ir = 0; ir < nr(); ++ir) {
            csv.cell(s_grid[is]);
            csv.cell(r_grid[ir]);
            csv.cell(at(is, ir));
            csv.end_row();
        }
}

void AverageTable::save_binary(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("AverageTable: cannot open '" + path + "' for writing");
    os.write(kMagic, 8);
    put_u64(os, uint64_t(d));
    uint64_t bb;
    std::memcpy(&bb, &beta, 8);
    put_u64(os, bb);
    put_u64(os, ns());
    put_u64(os, nr());
    put_u64(os, f_hash);
    put_f64v(os, s_grid);
    put_f64v(os, r_grid);
    put_f64v(os, a);
    if (!os) throw std::runtime_error("AverageTable: write failed for '" + path + "'");
}

AverageTable AverageTable::load_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("AverageTable: cannot open '" + path + "'");
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("AverageTable: bad magic in '" + path + "'");
    AverageTable t;
    t.d = int(get_u64(is));
    uint64_t bb = get_u64(is);
    std::memcpy(&t.beta, &bb, 8);
    std::size_t ns = get_u64(is), nr = get_u64(is);
    t.f_hash = get_u64(is);
    if (!is || ns == 0 || nr == 0 || ns > (1u << 26) || nr > (1u << 26))
        throw std::runtime_error("AverageTable: corrupt header in '" + path + "'");
    get_f64v(is, t.s_grid, ns);
    get_f64v(is, t.r_grid, nr);
    get_f64v(is, t.a, ns * nr);
    if (!is) throw std::runtime_error("AverageTable: truncated data in '" + path + "'");
    return t;
}

} // namespace mfrac
