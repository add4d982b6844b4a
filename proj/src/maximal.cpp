#include "mfrac/maximal.hpp"

#include "mfrac/csvio.hpp"
#include "mfrac/kernels.hpp"
#include "mfrac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfrac {

Variant variant_from_string(const std::string& name) {
    if (name == "noncentered") return Variant::noncentered;
    if (name == "centered") return Variant::centered;
    if (name == "truncated") return Variant::truncated;
    if (name == "inner_only") return Variant::inner_only;
    if (name == "outer_only") return Variant::outer_only;
    throw std::invalid_argument("unknown variant '" + name + "'");
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::noncentered: return "noncentered";
        case Variant::centered: return "centered";
        case Variant::truncated: return "truncated";
        case Variant::inner_only: return "inner_only";
        case Variant::outer_only: return "outer_only";
    }
    return "?";
}

namespace {

constexpr double kIdxSlack = 1e-9;

// contiguous index range of grid values in [lo, hi], inclusive, with slack
// proportional to the local scale so boundary cells are kept
std::pair<std::size_t, std::size_t> grid_range(const std::vector<double>& grid, double lo, double hi) {
    double slack = kIdxSlack * std::max({1.0, std::abs(lo), std::abs(hi)});
    auto a = std::lower_bound(grid.begin(), grid.end(), lo - slack);
    auto b = std::upper_bound(grid.begin(), grid.end(), hi + slack);
    if (a >= b) return {1, 0}; // empty
    return {std::size_t(a - grid.begin()), std::size_t(b - grid.begin()) - 1};
}

// nearest grid index to x if within half a step, else npos
std::size_t grid_snap(const std::vector<double>& grid, double x) {
    if (grid.empty()) return std::size_t(-1);
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    std::size_t best = std::size_t(-1);
    double dbest = std::numeric_limits<double>::infinity();
    for (auto c : {it, it == grid.begin() ? it : it - 1}) {
        if (c == grid.end()) continue;
        double dd = std::abs(*c - x);
        if (dd < dbest) {
            dbest = dd;
            best = std::size_t(c - grid.begin());
        }
    }
    double step = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
    if (best != std::size_t(-1) && dbest <= 0.5 * step + kIdxSlack * std::max(1.0, std::abs(x)))
        return best;
    return std::size_t(-1);
}

double envelope_bound(double r, double beta, int d, const EnvelopeData& env, double omega_d) {
    double by_linf = std::pow(r, beta) * env.linf;
    double by_l1 = std::pow(r, beta - d) * env.l1 / omega_d;
    return std::min(by_linf, by_l1);
}

struct CellVisitor {
    const AverageTable& tab;
    double t;
    const VariantSpec& v;

    // calls fn(ir, is_lo, is_hi) for each radius row and its admissible s-slice
    template <class Fn>
    void rows(Fn&& fn) const {
        for (std::size_t ir = 0; ir < tab.nr(); ++ir) {
            double r = tab.r_grid[ir];
            if (v.kind == Variant::truncated && r > v.trunc_factor * t + kIdxSlack) break;
            std::size_t lo, hi;
            if (v.kind == Variant::inner_only || v.kind == Variant::outer_only) {
                double target = (v.kind == Variant::inner_only) ? t - r : t + r;
                if (target < -kIdxSlack) continue;
                std::size_t is = grid_snap(tab.s_grid, std::max(0.0, target));
                if (is == std::size_t(-1)) continue;
                lo = hi = is;
            } else {
                auto range = grid_range(tab.s_grid, t - r, t + r);
                if (range.first > range.second) continue;
                lo = range.first;
                hi = range.second;
            }
            fn(ir, lo, hi);
        }
    }
};

} // namespace

GoodBallSet maximal_radial(const AverageTable& tab, double t, const VariantSpec& v,
                           double eps_rel, const EnvelopeData* env) {
    if (t < 0.0) throw std::invalid_argument("maximal_radial: negative |x|");
    if (v.kind == Variant::centered)
        throw std::invalid_argument("maximal_radial: centered values are computed on demand, not from the table");

    GoodBallSet out;
    out.t = t;
    const double omega = unit_ball_volume(tab.d);
    // crossover radius of the envelope: below it the linf branch binds (increasing),
    // above it the l1 branch binds (decreasing); safe to stop once past it
    double r_cross = std::numeric_limits<double>::infinity();
    if (env && env->linf > 0.0)
        r_cross = std::pow(env->l1 / (omega * env->linf), 1.0 / tab.d);

    CellVisitor vis{tab, t, v};
    double best = 0.0;
    bool any = false;
    bool done = false;
    vis.rows([&](std::size_t ir, std::size_t lo, std::size_t hi) {
        if (done) return;
        any = true;
        double r = tab.r_grid[ir];
        if (env) {
            double bound = envelope_bound(r, tab.beta, tab.d, *env, omega) * (1.0 + 1e-5) + 1e-300;
            if (bound < best * (1.0 - eps_rel)) {
                if (r > r_cross) done = true;
                return;
            }
        }
        auto hit = kern::max_element(tab.row(ir) + lo, hi - lo + 1);
        if (hit.value > best) best = hit.value;
    });

    out.value = best;
    out.empty_admissible = !any;
    if (!any || best <= 0.0) return out;

    double thresh = best * (1.0 - eps_rel);
    done = false;
    vis.rows([&](std::size_t ir, std::size_t lo, std::size_t hi) {
        if (done) return;
        double r = tab.r_grid[ir];
        if (env) {
            double bound = envelope_bound(r, tab.beta, tab.d, *env, omega) * (1.0 + 1e-5) + 1e-300;
            if (bound < thresh) {
                if (r > r_cross) done = true;
                return;
            }
        }
        const double* row = tab.row(ir);
        for (std::size_t is = lo; is <= hi; ++is)
            if (row[is] >= thresh) out.balls.push_back({tab.s_grid[is], r, row[is]});
    });

    out.r_min = std::numeric_limits<double>::infinity();
    for (const GoodBall& b : out.balls) {
        out.r_min = std::min(out.r_min, b.r);
        out.r_max = std::max(out.r_max, b.r);
    }
    return out;
}

GoodBallSet maximal_centered(const CapKernelContext& ctx, const RadialProfile& f_abs, double beta,
                             double t, const std::vector<double>& r_grid, double eps_rel) {
    GoodBallSet out;
    out.t = t;
    std::vector<double> col(r_grid.size());
    for (std::size_t ir = 0; ir < r_grid.size(); ++ir)
        col[ir] = std::pow(r_grid[ir], beta) * ball_average(ctx, f_abs, t, r_grid[ir]);
    auto hit = kern::max_element(col.data(), col.size());
    double best = std::max(0.0, hit.value);
    out.value = best;
    out.empty_admissible = r_grid.empty();
    if (best <= 0.0) return out;
    double thresh = best * (1.0 - eps_rel);
    out.r_min = std::numeric_limits<double>::infinity();
    for (std::size_t ir = 0; ir < r_grid.size(); ++ir) {
        if (col[ir] >= thresh) {
            out.balls.push_back({t, r_grid[ir], col[ir]});
            out.r_min = std::min(out.r_min, r_grid[ir]);
            out.r_max = std::max(out.r_max, r_grid[ir]);
        }
    }
    return out;
}

namespace {

struct DerivedGrids {
    std::vector<double> s_grid, r_grid;
    double s_step, r_step;
};

DerivedGrids derive_grids(const RadialProfile& f, const std::vector<double>& eval_grid,
                          const SearchParams& sp) {
    DerivedGrids g;
    g.s_step = sp.s_step > 0.0 ? sp.s_step : f.h;
    g.r_step = sp.r_step > 0.0 ? sp.r_step : f.h;
    double eval_max = eval_grid.empty() ? f.t_max() : eval_grid.back();
    // any ball of radius beyond max(t, t_max) is dominated by the one that
    // just covers the support, so the derived cap is safe for every eval point
    double r_max = sp.r_max > 0.0 ? sp.r_max : std::max(eval_max, f.t_max()) + 2.0 * g.r_step;
    double s_max = sp.s_max > 0.0 ? sp.s_max : eval_max + r_max + g.s_step;
    g.s_grid = uniform_grid(0.0, g.s_step, std::size_t(std::floor(s_max / g.s_step + kIdxSlack)) + 1);
    g.r_grid = uniform_grid(g.r_step, g.r_step, std::size_t(std::floor(r_max / g.r_step + kIdxSlack)));
    return g;
}

// At beta = 0 the shrinking-ball limit makes the point value itself an
// admissible competitor (every variant admits balls of vanishing radius at t,
// except the truncated family at t = 0, where no ball exists at all).  The
// discrete radius grid starts at r_step, so without this the value at a local
// maximum of |f| would be systematically low.
void add_point_candidate(GoodBallSet& g, double t, double here, const VariantSpec& v,
                         double eps_rel) {
    if (v.kind == Variant::truncated && t <= 0.0) return;
    if (here <= 0.0 || here < g.value * (1.0 - eps_rel)) return;
    if (here > g.value) {
        g.value = here;
        double thresh = here * (1.0 - eps_rel);
        std::vector<GoodBall> kept;
        for (const GoodBall& b : g.balls)
            if (b.a >= thresh) kept.push_back(b);
        g.balls = std::move(kept);
        g.r_max = 0.0;
        for (const GoodBall& b : g.balls) g.r_max = std::max(g.r_max, b.r);
    }
    g.balls.push_back({t, 0.0, here});
    g.r_min = 0.0;
    g.empty_admissible = false;
}

} // namespace

MaximalResult maximal_profile(const RadialProfile& f, double beta, const VariantSpec& v,
                              const std::vector<double>& eval_grid, const SearchParams& sp,
                              int threads, AverageTable* table_out) {
    if (!(beta >= 0.0) || beta >= f.d)
        throw std::invalid_argument("maximal_profile: beta must satisfy 0 <= beta < d");

    MaximalResult res;
    res.d = f.d;
    res.beta = beta;
    res.variant = v;
    res.eval_grid = eval_grid;
    res.params = sp;
    res.f_hash = f.content_hash();
    res.value.assign(eval_grid.size(), 0.0);
    res.good.resize(eval_grid.size());

    RadialProfile fm = modulus(f);
    EnvelopeData env;
    env.linf = lp_norm(fm, std::numeric_limits<double>::infinity());
    env.l1 = weighted_power_integral(fm, 1.0, fm.d) * fm.d * unit_ball_volume(fm.d);

    DerivedGrids grids = derive_grids(f, eval_grid, sp);
    res.params.s_step = grids.s_step;
    res.params.r_step = grids.r_step;
    res.params.s_max = grids.s_grid.back();
    res.params.r_max = grids.r_grid.back();

    if (v.kind == Variant::centered) {
        CapKernelContext ctx = make_cap_context(f.d);
        parallel_for(eval_grid.size(), threads, [&](std::size_t i) {
            res.good[i] = maximal_centered(ctx, fm, beta, eval_grid[i], grids.r_grid, sp.eps_rel);
            if (beta == 0.0)
                add_point_candidate(res.good[i], eval_grid[i], fm.eval(eval_grid[i]), v, sp.eps_rel);
            res.value[i] = res.good[i].value;
        });
        if (table_out) *table_out = AverageTable{};
        return res;
    }

    AverageTable tab = build_average_table(fm, beta, grids.s_grid, grids.r_grid, threads);
    const EnvelopeData* envp = sp.prune ? &env : nullptr;
    parallel_for(eval_grid.size(), threads, [&](std::size_t i) {
        res.good[i] = maximal_radial(tab, eval_grid[i], v, sp.eps_rel, envp);
        if (beta == 0.0)
            add_point_candidate(res.good[i], eval_grid[i], fm.eval(eval_grid[i]), v, sp.eps_rel);
        res.value[i] = res.good[i].value;
    });
    if (table_out) *table_out = std::move(tab);
    return res;
}

void MaximalResult::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"t", "value", "r_min", "r_max", "s_best", "r_best"});
    for (std::size_t i = 0; i < eval_grid.size(); ++i) {
        const GoodBallSet& g = good[i];
        const GoodBall* top = nullptr;
        for (const GoodBall& b : g.balls)
            if (!top || b.a > top->a) top = &b;
        csv.cell(eval_grid[i]);
        csv.cell(value[i]);
        csv.cell(g.balls.empty() ? 0.0 : g.r_min);
        csv.cell(g.balls.empty() ? 0.0 : g.r_max);
        csv.cell(top ? top->s : 0.0);
        csv.cell(top ? top->r : 0.0);
        csv.end_row();
    }
}

// ---- 1-D ---------------------------------------------------------------------

namespace {

struct Support {
    int lo = -1, hi = -1; // node indices of the first/last nonzero segment ends
};

Support support_of(const LineFunction& f) {
    Support s;
    int n = int(f.v.size());
    for (int i = 0; i < n; ++i)
        if (f.v[i] != 0.0) {
            s.lo = std::max(0, i - 1);
            break;
        }
    for (int i = n - 1; i >= 0; --i)
        if (f.v[i] != 0.0) {
            s.hi = std::min(n - 1, i + 1);
            break;
        }
    return s;
}

} // namespace

Max1D maximal_1d(const LineFunction& f, double beta, const VariantSpec& v, double eps_rel, int threads) {
    if (!(beta >= 0.0) || beta >= 1.0)
        throw std::invalid_argument("maximal_1d: beta must satisfy 0 <= beta < 1");

    const int n = f.n(); // segments; nodes 0..n
    Max1D out;
    out.beta = beta;
    out.variant = v;
    out.x.resize(n + 1);
    for (int i = 0; i <= n; ++i) out.x[i] = f.x_at(i);
    out.value.assign(n + 1, 0.0);
    out.good.resize(n + 1);

    std::vector<double> P = prefix_abs_integral(f);
    const double h = f.h;
    const double itot = P.back();
    double linf = 0.0;
    for (double x : f.v) linf = std::max(linf, std::abs(x));
    Support sup = support_of(f);

    if (itot <= 0.0) {
        for (int i = 0; i <= n; ++i) out.good[i].t = std::abs(out.x[i]);
        return out;
    }

    parallel_for(std::size_t(n) + 1, threads, [&](std::size_t mi) {
        int m = int(mi);
        double xm = out.x[m];
        GoodBallSet& g = out.good[mi];
        g.t = std::abs(xm);

        auto interval_ok = [&](int a, int b) {
            if (v.kind == Variant::truncated)
                return 0.5 * (b - a) * h <= v.trunc_factor * std::abs(xm) + kIdxSlack;
            return true;
        };
        auto value_of = [&](int a, int b) {
            double r = 0.5 * (b - a) * h;
            return std::pow(r, beta) * (P[b] - P[a]) / ((b - a) * h);
        };

        double best = 0.0;
        if (beta == 0.0) best = std::abs(f.v[m]); // radius-0 candidate is legitimate at beta = 0

        // longest useful interval: one more node past full support coverage
        auto cap_b = [&](int) { return std::min(n, std::max(sup.hi, m) + 1); };
        int a_min_cov = std::max(0, std::min(sup.lo, m) - 1);

        if (v.kind == Variant::centered) {
            int k_cap = std::max(m - a_min_cov, cap_b(m) - m);
            for (int k = 1; k <= k_cap; ++k) {
                int a = std::max(0, m - k), b = std::min(n, m + k);
                double r = k * h;
                double val = std::pow(r, beta) * (P[b] - P[a]) / (2.0 * r);
                if (val > best) best = val;
            }
        } else if (v.kind == Variant::inner_only || v.kind == Variant::outer_only) {
            bool inner = v.kind == Variant::inner_only;
            // inner: interval inside [-|x|, |x|] touching x; outer: outside, touching x
            if (xm >= 0.0 ? inner : !inner) {
                int a_lo = inner ? std::max(a_min_cov, m - int(std::floor(2.0 * std::abs(xm) / h + kIdxSlack)))
                                 : a_min_cov;
                for (int a = a_lo; a < m; ++a)
                    if (interval_ok(a, m)) best = std::max(best, value_of(a, m));
            }
            if (xm >= 0.0 ? !inner : inner) {
                int b_hi = inner ? std::min(cap_b(m), m + int(std::floor(2.0 * std::abs(xm) / h + kIdxSlack)))
                                 : cap_b(m);
                for (int b = m + 1; b <= b_hi; ++b)
                    if (interval_ok(m, b)) best = std::max(best, value_of(m, b));
            }
        } else {
            // noncentered / truncated: scan by interval length, contiguous in a
            int l_cap = cap_b(m) - a_min_cov;
            double r_cross = itot / (2.0 * linf); // envelope crossover half-length
            for (int l = 1; l <= l_cap; ++l) {
                double r = 0.5 * l * h;
                if (v.kind == Variant::truncated && r > v.trunc_factor * std::abs(xm) + kIdxSlack) break;
                double bound = std::pow(r, beta) * std::min(linf, itot / (l * h)) * (1.0 + 1e-5);
                if (bound < best * (1.0 - eps_rel)) {
                    if (r > r_cross) break;
                    continue;
                }
                int a_lo = std::max(a_min_cov, m - l), a_hi = std::min(m, n - l);
                if (a_lo > a_hi) continue;
                double w = std::pow(r, beta) / (l * h);
                auto hit = kern::scaled_diff_max(P.data() + a_lo + l, P.data() + a_lo,
                                                 std::size_t(a_hi - a_lo) + 1, w);
                if (hit.value > best) best = hit.value;
            }
        }

        g.value = best;
        out.value[mi] = best;
        if (best <= 0.0) {
            g.empty_admissible = (v.kind == Variant::truncated && v.trunc_factor * std::abs(xm) < h);
            return;
        }

        // collect near-argmax intervals
        double thresh = best * (1.0 - eps_rel);
        auto consider = [&](int a, int b) {
            if (a == b) return;
            double val = value_of(a, b);
            if (val >= thresh) g.balls.push_back({f.x_min + 0.5 * (a + b) * h, 0.5 * (b - a) * h, val});
        };
        if (beta == 0.0 && std::abs(f.v[m]) >= thresh)
            g.balls.push_back({xm, 0.0, std::abs(f.v[m])});
        if (v.kind == Variant::centered) {
            int k_cap = std::max(m - a_min_cov, cap_b(m) - m);
            for (int k = 1; k <= k_cap; ++k) {
                int a = std::max(0, m - k), b = std::min(n, m + k);
                double r = k * h;
                double val = std::pow(r, beta) * (P[b] - P[a]) / (2.0 * r);
                if (val >= thresh) g.balls.push_back({xm, r, val});
            }
        } else if (v.kind == Variant::inner_only || v.kind == Variant::outer_only) {
            bool inner = v.kind == Variant::inner_only;
            if (xm >= 0.0 ? inner : !inner) {
                int a_lo = inner ? std::max(a_min_cov, m - int(std::floor(2.0 * std::abs(xm) / h + kIdxSlack)))
                                 : a_min_cov;
                for (int a = a_lo; a < m; ++a)
                    if (interval_ok(a, m)) consider(a, m);
            }
            if (xm >= 0.0 ? !inner : inner) {
                int b_hi = inner ? std::min(cap_b(m), m + int(std::floor(2.0 * std::abs(xm) / h + kIdxSlack)))
                                 : cap_b(m);
                for (int b = m + 1; b <= b_hi; ++b)
                    if (interval_ok(m, b)) consider(m, b);
            }
        } else {
            int l_cap = cap_b(m) - a_min_cov;
            for (int l = 1; l <= l_cap; ++l) {
                double r = 0.5 * l * h;
                if (v.kind == Variant::truncated && r > v.trunc_factor * std::abs(xm) + kIdxSlack) break;
                double bound = std::pow(r, beta) * std::min(linf, itot / (l * h)) * (1.0 + 1e-5);
                if (bound < thresh) continue;
                int a_lo = std::max(a_min_cov, m - l), a_hi = std::min(m, n - l);
                for (int a = a_lo; a <= a_hi; ++a) consider(a, a + l);
            }
        }
        g.r_min = std::numeric_limits<double>::infinity();
        for (const GoodBall& b : g.balls) {
            g.r_min = std::min(g.r_min, b.r);
            g.r_max = std::max(g.r_max, b.r);
        }
    });

    return out;
}

RadiusStats good_radius_stats(const MaximalResult& res, const EnvelopeData& env, double h) {
    RadiusStats st;
    st.histogram.assign(16, 0);
    st.r_min = std::numeric_limits<double>::infinity();
    st.min_radius_slack = std::numeric_limits<double>::infinity();
    double r_hi = 0.0;
    for (const GoodBallSet& g : res.good) r_hi = std::max(r_hi, g.r_max);
    for (const GoodBallSet& g : res.good) {
        ++st.n_points;
        if (g.balls.empty()) {
            ++st.n_empty;
            continue;
        }
        st.r_min = std::min(st.r_min, g.r_min);
        st.r_max = std::max(st.r_max, g.r_max);
        for (const GoodBall& b : g.balls) {
            std::size_t bin = r_hi > 0.0 ? std::min<std::size_t>(15, std::size_t(b.r / r_hi * 16.0)) : 0;
            ++st.histogram[bin];
        }
        if (res.beta > 0.0 && env.linf > 0.0 && g.value > 0.0) {
            double r_floor = std::pow(g.value / env.linf, 1.0 / res.beta) - h;
            st.min_radius_slack = std::min(st.min_radius_slack, g.r_min - r_floor);
        }
    }
    if (st.n_points == st.n_empty) st.r_min = 0.0;
    return st;
}

} // namespace mfrac
