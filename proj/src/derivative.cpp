#include "mfrac/derivative.hpp"

#include "mfrac/csvio.hpp"
#include "mfrac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfrac {

namespace {

double median_of(std::vector<double> x) {
    if (x.empty()) return 0.0;
    std::sort(x.begin(), x.end());
    std::size_t n = x.size();
    return (n % 2 == 1) ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double abs_max(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

// central differences are meaningless across kinks (plateau edges, argmax
// switches); a point is smooth enough when its one-sided slopes agree
bool smooth_at(const std::vector<double>& v, const std::vector<double>& grid, std::size_t i) {
    if (i == 0 || i + 1 >= v.size()) return true; // one-sided already
    double l = (v[i] - v[i - 1]) / (grid[i] - grid[i - 1]);
    double r = (v[i + 1] - v[i]) / (grid[i + 1] - grid[i]);
    return std::abs(l - r) <= 0.5 * std::max(std::abs(l), std::abs(r));
}

} // namespace

std::vector<double> fd_gradient(const std::vector<double>& values, const std::vector<double>& grid) {
    if (values.size() != grid.size())
        throw std::invalid_argument("fd_gradient: values and grid differ in length");
    std::size_t n = values.size();
    std::vector<double> g(n, 0.0);
    if (n < 2) return g;
    g[0] = (values[1] - values[0]) / (grid[1] - grid[0]);
    g[n - 1] = (values[n - 1] - values[n - 2]) / (grid[n - 1] - grid[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        g[i] = (values[i + 1] - values[i - 1]) / (grid[i + 1] - grid[i - 1]);
    return g;
}

GradientPair gradient_formula_check(const RadialProfile& f, const MaximalResult& res,
                                    double activity) {
    GradientPair out;
    out.t = res.eval_grid;
    out.activity = activity;
    out.fd = fd_gradient(res.value, res.eval_grid);
    std::size_t n = out.t.size();
    out.formula.assign(n, 0.0);
    out.spread.assign(n, 0.0);
    out.mask.assign(n, 0);

    CapKernelContext ctx = make_cap_context(f.d);
    RadialProfile gmod = weak_derivative(modulus(f));
    double fd_max = abs_max(out.fd);
    // a near-argmax ball counts as unique when the whole set fits in a few cells
    double ball_tol = 2.0 * std::max(res.params.s_step, res.params.r_step);

    std::vector<double> errs;
    for (std::size_t i = 0; i < n; ++i) {
        const GoodBallSet& gset = res.good[i];
        if (gset.balls.empty()) continue;
        double best = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
        double s_lo = lo, s_hi = -lo, r_lo = lo, r_hi = -lo;
        bool first = true;
        for (const GoodBall& b : gset.balls) {
            // a ball centered at the origin averages an odd field to zero; the
            // zero-radius member (point-value competitor) contributes the slope
            // of |f| itself, the shrinking-ball limit of the directional average
            double val = 0.0;
            if (b.s > 0.0)
                val = (b.r > 0.0)
                          ? std::pow(b.r, res.beta) * directional_ball_average(ctx, gmod, b.s, b.r)
                          : gmod.eval(b.s);
            lo = std::min(lo, val);
            hi = std::max(hi, val);
            s_lo = std::min(s_lo, b.s);
            s_hi = std::max(s_hi, b.s);
            r_lo = std::min(r_lo, b.r);
            r_hi = std::max(r_hi, b.r);
            if (first || std::abs(val - out.fd[i]) < std::abs(best - out.fd[i])) {
                best = val;
                first = false;
            }
        }
        out.formula[i] = best;
        out.spread[i] = hi - lo;
        bool active = fd_max > 0.0 && std::abs(out.fd[i]) >= activity * fd_max;
        bool unique_ball = (s_hi - s_lo) <= ball_tol && (r_hi - r_lo) <= ball_tol;
        if (active && unique_ball && smooth_at(res.value, res.eval_grid, i)) {
            out.mask[i] = 1;
            ++out.n_masked;
            errs.push_back(std::abs(out.formula[i] - out.fd[i]) /
                           std::max(std::abs(out.fd[i]), 1e-12));
        }
    }
    out.median_rel_err = median_of(std::move(errs));
    return out;
}

void GradientPair::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"t", "fd", "formula", "spread", "mask"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        csv.cell(t[i]);
        csv.cell(fd[i]);
        csv.cell(formula[i]);
        csv.cell(spread[i]);
        csv.cell(double(mask[i]));
        csv.end_row();
    }
}

RatioReport assemble_ratio_report(const std::vector<double>& t, std::vector<double> num,
                                  std::vector<double> den, double flag_above) {
    RatioReport rep;
    rep.t = t;
    rep.numerator = std::move(num);
    rep.denominator = std::move(den);
    std::size_t n = rep.t.size();
    rep.ratio.assign(n, 0.0);
    rep.flag.assign(n, 0);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < n; ++i) {
        double den_i = std::max(rep.denominator[i], 1e-300);
        rep.ratio[i] = rep.numerator[i] / den_i;
        rep.max_ratio = std::max(rep.max_ratio, rep.ratio[i]);
        ratios.push_back(rep.ratio[i]);
        if (rep.ratio[i] > flag_above) {
            rep.flag[i] = 1;
            ++rep.n_flagged;
        }
    }
    rep.median_ratio = median_of(std::move(ratios));
    return rep;
}

void RatioReport::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"t", "numerator", "denominator", "ratio", "flag"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        csv.cell(t[i]);
        csv.cell(numerator[i]);
        csv.cell(denominator[i]);
        csv.cell(ratio[i]);
        csv.cell(double(flag[i]));
        csv.end_row();
    }
}

RatioReport check_kinnunen(const RadialProfile& f, const std::vector<double>& eval_grid,
                           const SearchParams& sp, int threads) {
    VariantSpec nc{Variant::noncentered, 0.25};
    MaximalResult mf = maximal_profile(f, 0.0, nc, eval_grid, sp, threads);
    std::vector<double> num = fd_gradient(mf.value, eval_grid);
    for (double& x : num) x = std::abs(x);
    // the gradient magnitude of a radial function is |profile slope|
    RadialProfile grad = weak_derivative(f);
    MaximalResult mg = maximal_profile(grad, 0.0, nc, eval_grid, sp, threads);
    return assemble_ratio_report(eval_grid, std::move(num), mg.value, 1.05);
}

RatioReport check_ks(const RadialProfile& f, double beta, Variant kind,
                     const std::vector<double>& eval_grid, const SearchParams& sp, int threads) {
    if (!(beta >= 1.0))
        throw std::invalid_argument("check_ks: requires beta >= 1 so the lower order stays nonnegative");
    if (kind != Variant::noncentered && kind != Variant::centered)
        throw std::invalid_argument("check_ks: only the plain centered/noncentered operators");
    VariantSpec v{kind, 0.25};
    MaximalResult hi = maximal_profile(f, beta, v, eval_grid, sp, threads);
    MaximalResult lo = maximal_profile(f, beta - 1.0, v, eval_grid, sp, threads);
    std::vector<double> num = fd_gradient(hi.value, eval_grid);
    for (double& x : num) x = std::abs(x);
    // no absolute constant to compare against; max_ratio is the empirical one
    return assemble_ratio_report(eval_grid, std::move(num), lo.value,
                                 std::numeric_limits<double>::infinity());
}

RatioReport check_refined_ks(const RadialProfile& f, const MaximalResult& res, double activity) {
    CapKernelContext ctx = make_cap_context(f.d);
    RadialProfile gmod = weak_derivative(modulus(f));
    RadialProfile fm = modulus(f);
    std::vector<double> t, num, den;
    for (std::size_t i = 0; i < res.eval_grid.size(); ++i) {
        const GoodBallSet& gset = res.good[i];
        if (gset.balls.empty()) continue;
        // where the point value itself attains the sup, the zero-radius limit
        // dominates and no ball carries derivative information
        double here = fm.eval(res.eval_grid[i]);
        if (res.beta == 0.0 && here >= res.value[i] * (1.0 - activity)) continue;
        for (const GoodBall& b : gset.balls) {
            if (b.r <= 0.0) continue;
            double dir = (b.s > 0.0) ? directional_ball_average(ctx, gmod, b.s, b.r) : 0.0;
            t.push_back(res.eval_grid[i]);
            num.push_back(std::abs(std::pow(b.r, res.beta) * dir));
            den.push_back(b.a / b.r); // = r^(beta-1) * average of |f| over the ball
        }
    }
    return assemble_ratio_report(t, std::move(num), std::move(den),
                                 std::numeric_limits<double>::infinity());
}

InnerBallReport check_inner_ball(const RadialProfile& f, const MaximalResult& res, double tol,
                                 double activity) {
    (void)activity;
    InnerBallReport rep;
    CapKernelContext ctx = make_cap_context(f.d);
    RadialProfile gmod = weak_derivative(modulus(f));
    for (std::size_t i = 0; i < res.eval_grid.size(); ++i) {
        double t = res.eval_grid[i];
        if (t <= 0.0) continue;
        for (const GoodBall& b : res.good[i].balls) {
            // only balls genuinely contained in the ball of radius t qualify
            if (b.r <= 0.0 || b.s + b.r > t * (1.0 + 1e-12)) continue;
            ++rep.n_inner;
            double lhs = (b.s > 0.0) ? std::abs(directional_ball_average(ctx, gmod, b.s, b.r)) : 0.0;
            double rhs = ball_average_scaled_mass(ctx, gmod, b.s, b.r, 1.0 / t);
            double plain = ball_average(ctx, gmod, b.s, b.r);
            rep.max_defect = std::max(rep.max_defect, lhs - rhs);
            rep.max_weight_gap = std::max(rep.max_weight_gap, rhs - plain);
            if (lhs > rhs + tol + 1e-6 * std::abs(rhs)) ++rep.n_violations;
        }
    }
    return rep;
}

GeometryReport check_ball_geometry(const MaximalResult& res, double activity) {
    if (res.variant.kind != Variant::noncentered)
        throw std::invalid_argument("check_ball_geometry: tangency holds for the noncentered operator");
    GeometryReport rep;
    std::vector<double> fd = fd_gradient(res.value, res.eval_grid);
    double fd_max = abs_max(fd);
    double tol = 2.0 * std::max(res.params.s_step, res.params.r_step);
    for (std::size_t i = 0; i < res.eval_grid.size(); ++i) {
        if (fd_max <= 0.0 || std::abs(fd[i]) < activity * fd_max) continue;
        if (!smooth_at(res.value, res.eval_grid, i)) continue;
        double t = res.eval_grid[i];
        if (res.good[i].balls.empty()) continue;
        ++rep.n_points;
        for (const GoodBall& b : res.good[i].balls) {
            ++rep.n_balls;
            // at points where the value genuinely moves, every near-argmax ball
            // keeps the evaluation point on its boundary...
            double tangency = std::abs(std::abs(b.s - t) - b.r);
            if (tangency > tol) ++rep.tangency_violations;
            rep.max_tangency_defect = std::max(rep.max_tangency_defect, tangency);
            // ...and sits on one side of the sphere through that point
            bool inner = b.s + b.r <= t + tol;
            bool outer = b.s - b.r >= t - tol;
            if (!inner && !outer) ++rep.onesided_violations;
        }
    }
    return rep;
}

// ---- the radial envelopes u and v --------------------------------------------

namespace {

struct StepSegments {
    std::vector<double> a, b, c; // [a_k, b_k) with |slope| c_k
    double t_max = 0.0;
};

StepSegments slope_segments(const RadialProfile& f) {
    RadialProfile g = weak_derivative(modulus(f));
    StepSegments s;
    s.t_max = g.t_max();
    for (std::size_t k = 0; k + 1 < g.t.size(); ++k) {
        double c = std::abs(g.v[k]);
        if (c == 0.0 || g.t[k + 1] <= g.t[k]) continue;
        s.a.push_back(g.t[k]);
        s.b.push_back(g.t[k + 1]);
        s.c.push_back(c);
    }
    return s;
}

} // namespace

UVReport compute_uv(const RadialProfile& f, const std::vector<double>& eval_grid) {
    UVReport rep;
    int d = f.d;
    double dwd = d * unit_ball_volume(d);
    StepSegments seg = slope_segments(f);
    std::size_t m = seg.a.size();

    for (double t : eval_grid) {
        if (t <= 0.0) continue; // the outer envelope has a log pole at the origin
        double us = 0.0, vs = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (seg.b[k] > t) us += seg.c[k] * std::log(seg.b[k] / std::max(seg.a[k], t));
            if (seg.a[k] < t) {
                double top = std::min(seg.b[k], t);
                vs += seg.c[k] * (std::pow(top, d + 1) - std::pow(seg.a[k], d + 1));
            }
        }
        rep.t.push_back(t);
        rep.u.push_back(dwd * us);
        rep.v.push_back(dwd * vs / ((d + 1) * std::pow(t, d + 1)));
    }

    rep.grad_mod_l1 = grad_l1(modulus(f));
    rep.grad_l1_value = grad_l1(f);

    // exact piecewise integration of t^(d-1) * u(t): between consecutive kink
    // radii u(t) = A - B log t, and the antiderivative of t^(d-1) log t is
    // t^d (d log t - 1) / d^2, which vanishes at t = 0
    std::vector<double> knots = seg.a;
    knots.insert(knots.end(), seg.b.begin(), seg.b.end());
    knots.push_back(0.0);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    auto log_primitive = [&](double t) {
        return t <= 0.0 ? 0.0 : std::pow(t, d) * (d * std::log(t) - 1.0) / double(d * d);
    };
    double u_int = 0.0; // integral of t^(d-1) u(t)
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
        double a = knots[j], b = knots[j + 1];
        double A = 0.0, B = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (seg.a[k] >= b) // segment entirely above: full log span
                A += seg.c[k] * std::log(seg.b[k] / seg.a[k]);
            else if (seg.b[k] >= b) { // the segment containing (a, b)
                A += seg.c[k] * std::log(seg.b[k]);
                B += seg.c[k];
            }
        }
        A *= dwd;
        B *= dwd;
        u_int += A * (std::pow(b, d) - std::pow(a, d)) / d -
                 B * (log_primitive(b) - log_primitive(a));
    }
    rep.u_l1 = dwd * u_int;

    // t^(d-1) v(t) = dwd/(d+1) * t^-2 * W(t) with W piecewise alpha + gamma t^(d+1)
    double v_int = 0.0, W_below = 0.0;
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
        double a = knots[j], b = knots[j + 1];
        double alpha = W_below, gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (seg.a[k] <= a && b <= seg.b[k]) { // active slope across (a, b)
                alpha -= seg.c[k] * std::pow(seg.a[k], d + 1);
                gamma += seg.c[k];
            }
        }
        if (alpha != 0.0) v_int += alpha * (1.0 / a - 1.0 / b);
        v_int += gamma * (std::pow(b, d) - std::pow(a, d)) / d;
        for (std::size_t k = 0; k < m; ++k)
            if (seg.b[k] == b) W_below += seg.c[k] * (std::pow(seg.b[k], d + 1) - std::pow(seg.a[k], d + 1));
    }
    if (!knots.empty() && knots.back() > 0.0) v_int += W_below / knots.back(); // tail beyond the support
    rep.v_l1 = dwd * dwd / (d + 1.0) * v_int;

    double u_ref = unit_ball_volume(d) * rep.grad_mod_l1;
    double v_ref = dwd * rep.grad_l1_value;
    rep.u_identity_rel_err = u_ref > 0.0 ? std::abs(rep.u_l1 - u_ref) / u_ref : 0.0;
    rep.v_identity_rel_err = v_ref > 0.0 ? std::abs(rep.v_l1 - v_ref) / v_ref : 0.0;
    return rep;
}

DominationReport check_domination(const RadialProfile& f, double beta,
                                  const MaximalResult& full, const MaximalResult& truncated,
                                  double annulus_lo, double annulus_hi) {
    if (full.eval_grid != truncated.eval_grid)
        throw std::invalid_argument("check_domination: the two runs must share an evaluation grid");
    if (!(annulus_lo > 0.0) || !(annulus_hi > annulus_lo))
        throw std::invalid_argument("check_domination: need 0 < annulus_lo < annulus_hi");
    DominationReport rep;
    rep.q = f.d / (f.d - beta);
    std::vector<double> fd_full = fd_gradient(full.value, full.eval_grid);
    std::vector<double> fd_trunc = fd_gradient(truncated.value, truncated.eval_grid);

    std::vector<double> ann;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < full.eval_grid.size(); ++i) {
        double t = full.eval_grid[i];
        if (t >= annulus_lo && t <= annulus_hi) {
            ann.push_back(t);
            idx.push_back(i);
        }
    }
    UVReport uv = compute_uv(f, ann);
    double pref = std::pow(grad_l1(modulus(f)), rep.q - 1.0);

    for (std::size_t j = 0; j < ann.size(); ++j) {
        std::size_t i = idx[j];
        double lhs = std::pow(std::abs(fd_full[i]), rep.q);
        double rhs = pref * (uv.u[j] + uv.v[j]) + std::pow(std::abs(fd_trunc[i]), rep.q);
        if (rhs < 1e-300) continue;
        rep.t.push_back(ann[j]);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.c_fit = std::max(rep.c_fit, lhs / rhs);
        ++rep.n_annulus;
    }
    return rep;
}

void DominationReport::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"t", "lhs", "rhs"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        csv.cell(t[i]);
        csv.cell(lhs[i]);
        csv.cell(rhs[i]);
        csv.end_row();
    }
}

} // namespace mfrac
