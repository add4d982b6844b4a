#include "mfrac/convergence.hpp"

#include "mfrac/csvio.hpp"
#include "mfrac/derivative.hpp"
#include "mfrac/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mfrac {

SeqKind seqkind_from_string(const std::string& s) {
    if (s == "amplitude") return SeqKind::amplitude;
    if (s == "mollify") return SeqKind::mollify;
    if (s == "translate") return SeqKind::translate;
    if (s == "node_jitter") return SeqKind::node_jitter;
    throw std::invalid_argument("unknown sequence kind: " + s);
}

const char* seqkind_name(SeqKind k) {
    switch (k) {
        case SeqKind::amplitude: return "amplitude";
        case SeqKind::mollify: return "mollify";
        case SeqKind::translate: return "translate";
        case SeqKind::node_jitter: return "node_jitter";
    }
    return "?";
}

namespace {

RadialProfile unit_w11(RadialProfile g) {
    double n = lp_norm(g, 1.0) + grad_l1(g);
    if (!(n > 0.0)) throw std::invalid_argument("make_sequence: direction has zero W11 size");
    for (double& x : g.v) x /= n;
    return g;
}

// exact signed primitive of a piecewise-linear profile; odd extension below 0
// matches integrating the even extension of the profile itself
struct SignedPrimitive {
    const RadialProfile* f;
    std::vector<double> P;

    explicit SignedPrimitive(const RadialProfile& prof) : f(&prof) {
        P.assign(prof.t.size(), 0.0);
        for (std::size_t i = 0; i + 1 < prof.t.size(); ++i) {
            double w = prof.t[i + 1] - prof.t[i];
            P[i + 1] = P[i] + 0.5 * w * (prof.v[i] + prof.v[i + 1]);
        }
    }

    double pos(double x) const {
        if (x >= f->t_max()) return P.back();
        std::size_t i = f->segment_of(x);
        double w = x - f->t[i];
        return P[i] + 0.5 * w * (f->v[i] + f->eval(x));
    }

    double operator()(double x) const { return x >= 0.0 ? pos(x) : -pos(-x); }
};

std::vector<double> dedupe_sorted(std::vector<double> k, double tol) {
    std::sort(k.begin(), k.end());
    std::vector<double> out;
    for (double x : k)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}

// moving average of width w; exactly piecewise quadratic between the shifted
// knots, re-linearized by sampling knots and midpoints
RadialProfile mollify_profile(const RadialProfile& f, double w) {
    if (f.step) throw std::invalid_argument("mollify_profile: piecewise-linear input required");
    if (!(w > 0.0)) throw std::invalid_argument("mollify_profile: width must be positive");
    SignedPrimitive I(f);
    double T = f.t_max(), half = 0.5 * w;
    std::vector<double> knots{0.0, T + half};
    for (double k : f.t)
        for (double cand : {k - half, k + half})
            if (cand > 0.0 && cand < T + half) knots.push_back(cand);
    knots = dedupe_sorted(std::move(knots), 1e-12 * (T + w));
    std::vector<double> refined;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        refined.push_back(knots[i]);
        if (i + 1 < knots.size()) refined.push_back(0.5 * (knots[i] + knots[i + 1]));
    }
    RadialProfile out;
    out.d = f.d;
    out.h = f.h;
    out.step = false;
    out.t = refined;
    out.v.reserve(refined.size());
    for (double t : refined) out.v.push_back((I(t + half) - I(t - half)) / w);
    out.v.back() = 0.0; // the averaging window has fully left the support
    return out;
}

// profile recentred at delta: value at t is f(|t - delta|); inserting the
// reflected knots keeps the result exactly piecewise-linear
RadialProfile translate_profile(const RadialProfile& f, double delta) {
    if (f.step) throw std::invalid_argument("translate_profile: piecewise-linear input required");
    if (!(delta > 0.0)) throw std::invalid_argument("translate_profile: delta must be positive");
    std::vector<double> knots{0.0, delta};
    for (double k : f.t) {
        if (delta - k > 0.0) knots.push_back(delta - k);
        knots.push_back(delta + k);
    }
    knots = dedupe_sorted(std::move(knots), 1e-13 * (f.t_max() + delta));
    RadialProfile out;
    out.d = f.d;
    out.h = f.h;
    out.step = false;
    out.t = knots;
    out.v.reserve(knots.size());
    for (double t : knots) out.v.push_back(f.eval(std::abs(t - delta)));
    out.v.back() = 0.0;
    return out;
}

} // namespace

Sequence make_sequence(const RadialProfile& f, const SequenceSpec& spec) {
    if (f.step) throw std::invalid_argument("make_sequence: piecewise-linear limit required");
    if (spec.count < 2) throw std::invalid_argument("make_sequence: count must be >= 2");
    if (!(spec.rate > 0.0 && spec.rate < 1.0))
        throw std::invalid_argument("make_sequence: rate must lie in (0, 1)");
    if (!(spec.scale > 0.0)) throw std::invalid_argument("make_sequence: scale must be positive");

    Sequence out;
    RadialProfile dir;
    if (spec.kind == SeqKind::amplitude)
        dir = unit_w11(make_random_pl(f.d, f.h, f.t_max(), spec.seed, 6));

    for (int j = 1; j <= spec.count; ++j) {
        double eps = spec.scale * std::pow(spec.rate, j);
        RadialProfile fj;
        switch (spec.kind) {
            case SeqKind::amplitude:
                fj = pl_combine(1.0, f, eps, dir);
                break;
            case SeqKind::mollify:
                fj = mollify_profile(f, eps);
                break;
            case SeqKind::translate:
                fj = translate_profile(f, eps);
                break;
            case SeqKind::node_jitter: {
                double hc = std::max(4.0 * f.h, f.t_max() / 12.0);
                RadialProfile gj =
                    unit_w11(make_random_pl(f.d, hc, f.t_max(), substream(spec.seed, uint64_t(j)), 5));
                fj = pl_combine(1.0, f, eps, gj);
                break;
            }
        }
        out.w11.push_back(w11_dist(fj, f));
        out.members.push_back(std::move(fj));
    }

    // each member must contract against the previous by roughly the requested
    // rate; the admissible ratio leaves headroom for kind-dependent constants
    // without ever allowing outright stagnation
    double max_ratio = std::min(0.999, 1.5 * spec.rate);
    for (std::size_t i = 0; i < out.w11.size(); ++i) {
        if (!(out.w11[i] > 0.0)) {
            std::ostringstream msg;
            msg << "make_sequence(" << seqkind_name(spec.kind) << "): member " << (i + 1)
                << " coincides with the limit; raise scale";
            throw std::runtime_error(msg.str());
        }
        if (i == 0 || out.w11[i - 1] < 1e-12) continue;
        double ratio = out.w11[i] / out.w11[i - 1];
        if (!(ratio <= max_ratio)) {
            std::ostringstream msg;
            msg << "make_sequence(" << seqkind_name(spec.kind) << "): member " << (i + 1)
                << " contracts at ratio " << ratio << " > " << max_ratio
                << "; the sequence does not decay at rate " << spec.rate;
            throw std::runtime_error(msg.str());
        }
    }
    return out;
}

SequenceRun compute_sequence_run(const RadialProfile& f, double beta, const VariantSpec& v,
                                 const SequenceSpec& spec, const std::vector<double>& eval_grid,
                                 const SearchParams& sp, int threads) {
    SequenceRun run;
    run.beta = beta;
    run.variant = v;
    run.f = f;
    run.seq = make_sequence(f, spec);

    // freeze one search box for every run: members may extend the support
    // (translation, smoothing), and comparability needs identical grids
    SearchParams sp2 = sp;
    double ext = f.t_max();
    for (const RadialProfile& m : run.seq.members) ext = std::max(ext, m.t_max());
    double eval_max = eval_grid.empty() ? ext : eval_grid.back();
    double r_step = sp.r_step > 0.0 ? sp.r_step : f.h;
    double s_step = sp.s_step > 0.0 ? sp.s_step : f.h;
    if (sp2.r_max < 0.0) sp2.r_max = std::max(eval_max, ext) + 2.0 * r_step;
    if (sp2.s_max < 0.0) sp2.s_max = eval_max + sp2.r_max + s_step;

    run.limit = maximal_profile(f, beta, v, eval_grid, sp2, threads);
    run.members.reserve(run.seq.members.size());
    for (const RadialProfile& m : run.seq.members)
        run.members.push_back(maximal_profile(m, beta, v, eval_grid, sp2, threads));
    return run;
}

namespace {

RadialProfile samples_profile(int d, const std::vector<double>& t, std::vector<double> v) {
    RadialProfile p;
    p.d = d;
    p.h = t.size() > 1 ? t[1] - t[0] : 1.0;
    p.t = t;
    p.v = std::move(v);
    p.step = false;
    return p;
}

// integral of |g|^q over the region beyond the cut radius
double tail_mass_of(int d, double q, const std::vector<double>& grid, const std::vector<double>& g,
                    double cut) {
    std::size_t i0 = 0;
    while (i0 < grid.size() && grid[i0] < cut) ++i0;
    if (i0 + 1 >= grid.size()) return 0.0;
    std::vector<double> t(grid.begin() + i0, grid.end());
    std::vector<double> v(g.begin() + i0, g.end());
    RadialProfile p = samples_profile(d, t, std::move(v));
    return d * unit_ball_volume(d) * weighted_power_integral(p, q, d);
}

} // namespace

ConvergenceReport analyze_convergence(const SequenceRun& run, double tail_cut) {
    ConvergenceReport rep;
    int d = run.limit.d;
    rep.beta = run.beta;
    rep.q = d / (d - run.beta);
    rep.tail_cut = tail_cut;

    const std::vector<double>& grid = run.limit.eval_grid;
    if (grid.size() < 3) throw std::invalid_argument("analyze_convergence: evaluation grid too small");
    std::vector<double> G = fd_gradient(run.limit.value, grid);
    rep.grad_lq_limit = lp_norm(samples_profile(d, grid, G), rep.q);
    rep.bl_limit = std::pow(rep.grad_lq_limit, rep.q);

    for (std::size_t j = 0; j < run.members.size(); ++j) {
        const MaximalResult& mr = run.members[j];
        std::vector<double> Gj = fd_gradient(mr.value, grid);
        std::vector<double> diff(G.size());
        double sup = 0.0;
        for (std::size_t i = 0; i < G.size(); ++i) {
            diff[i] = Gj[i] - G[i];
            sup = std::max(sup, std::abs(mr.value[i] - run.limit.value[i]));
        }
        ConvergenceRow row;
        row.j = int(j) + 1;
        row.w11_dist = run.seq.w11[j];
        row.lq_grad_dist = lp_norm(samples_profile(d, grid, diff), rep.q);
        row.sup_dist = sup;
        row.bl_integral = std::pow(lp_norm(samples_profile(d, grid, Gj), rep.q), rep.q);
        row.tail_mass = tail_mass_of(d, rep.q, grid, diff, tail_cut);
        rep.rows.push_back(row);
    }

    rep.lq_decreasing = true;
    for (std::size_t j = 1; j < rep.rows.size(); ++j)
        if (!(rep.rows[j].lq_grad_dist < rep.rows[j - 1].lq_grad_dist)) rep.lq_decreasing = false;

    double last = rep.rows.empty() ? 0.0 : rep.rows.back().lq_grad_dist;
    rep.final_rel = last / std::max(rep.grad_lq_limit, 1e-300);
    rep.final_small = rep.grad_lq_limit > 0.0 ? (last <= 0.05 * rep.grad_lq_limit) : (last <= 1e-12);
    rep.verdict = rep.lq_decreasing && rep.final_small;

    if (!rep.rows.empty()) {
        double last_bl = rep.rows.back().bl_integral;
        rep.bl_converges = std::abs(last_bl - rep.bl_limit) <= 0.05 * std::max(rep.bl_limit, 1e-300);
        std::vector<double> G_last = fd_gradient(run.members.back().value, grid);
        double gmax = 0.0;
        for (double x : G) gmax = std::max(gmax, std::abs(x));
        double tolp = std::max(0.05 * gmax, 1e-9);
        SplitMix64 rng(0xB10C5EEDULL);
        int hits = 0;
        const int draws = 32;
        for (int k = 0; k < draws; ++k) {
            std::size_t idx = std::size_t(rng.next_u64() % grid.size());
            if (std::abs(G_last[idx] - G[idx]) <= tolp) ++hits;
        }
        rep.pointwise_converges = hits >= int(0.95 * draws);
        rep.consistent = (rep.bl_converges && rep.pointwise_converges) == rep.final_small;
    }
    return rep;
}

void ConvergenceReport::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"j", "w11_dist", "lq_grad_dist", "sup_dist", "bl_integral", "tail_mass"});
    for (const ConvergenceRow& r : rows) {
        csv.cell(double(r.j));
        csv.cell(r.w11_dist);
        csv.cell(r.lq_grad_dist);
        csv.cell(r.sup_dist);
        csv.cell(r.bl_integral);
        csv.cell(r.tail_mass);
        csv.end_row();
    }
}

TailReport analyze_tail(const SequenceRun& run, const std::vector<double>& cuts, double eps) {
    if (cuts.empty()) throw std::invalid_argument("analyze_tail: need at least one cut radius");
    for (std::size_t c = 1; c < cuts.size(); ++c)
        if (!(cuts[c] > cuts[c - 1])) throw std::invalid_argument("analyze_tail: cuts must ascend");

    TailReport rep;
    rep.cuts = cuts;
    rep.eps = eps;
    int d = run.limit.d;
    double q = d / (d - run.beta);
    const std::vector<double>& grid = run.limit.eval_grid;
    std::vector<double> G = fd_gradient(run.limit.value, grid);

    rep.mass.assign(cuts.size(), std::vector<double>(run.members.size(), 0.0));
    for (std::size_t j = 0; j < run.members.size(); ++j) {
        std::vector<double> Gj = fd_gradient(run.members[j].value, grid);
        std::vector<double> diff(G.size());
        for (std::size_t i = 0; i < G.size(); ++i) diff[i] = Gj[i] - G[i];
        for (std::size_t c = 0; c < cuts.size(); ++c)
            rep.mass[c][j] = tail_mass_of(d, q, grid, diff, cuts[c]);
    }

    rep.monotone_in_cut = true;
    for (std::size_t j = 0; j < run.members.size(); ++j)
        for (std::size_t c = 1; c < cuts.size(); ++c)
            if (rep.mass[c][j] > rep.mass[c - 1][j] * (1.0 + 1e-9) + 1e-15) rep.monotone_in_cut = false;

    rep.j_small = -1;
    for (std::size_t j = 0; j < run.members.size(); ++j) {
        bool ok_from_here = true;
        for (std::size_t j2 = j; j2 < run.members.size() && ok_from_here; ++j2)
            for (std::size_t c = 0; c < cuts.size(); ++c)
                if (rep.mass[c][j2] > eps) {
                    ok_from_here = false;
                    break;
                }
        if (ok_from_here) {
            rep.j_small = int(j) + 1;
            break;
        }
    }
    rep.uniformly_small = rep.j_small >= 1;
    return rep;
}

void TailReport::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"cut", "j", "tail_mass"});
    for (std::size_t c = 0; c < cuts.size(); ++c)
        for (std::size_t j = 0; j < mass[c].size(); ++j) {
            csv.cell(cuts[c]);
            csv.cell(double(j + 1));
            csv.cell(mass[c][j]);
            csv.end_row();
        }
}

UniformReport analyze_uniform(const SequenceRun& run) {
    int d = run.limit.d;
    if (!(run.beta > d - 1 && run.beta < d))
        throw std::invalid_argument("analyze_uniform: requires d-1 < beta < d");
    double p = d / run.beta;

    UniformReport rep;
    for (std::size_t j = 0; j < run.members.size(); ++j) {
        double sup = 0.0;
        for (std::size_t i = 0; i < run.limit.value.size(); ++i)
            sup = std::max(sup, std::abs(run.members[j].value[i] - run.limit.value[i]));
        RadialProfile diff = pl_combine(1.0, run.seq.members[j], -1.0, run.f);
        double rhs = lp_norm(diff, p);
        double bound = rhs + 1e-6 + 0.01 * rhs;
        rep.sup_dist.push_back(sup);
        rep.bound.push_back(bound);
        rep.max_defect = std::max(rep.max_defect, sup - bound);
        if (sup > bound) ++rep.n_violations;
    }
    return rep;
}

void UniformReport::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"j", "sup_dist", "bound", "flag"});
    for (std::size_t j = 0; j < sup_dist.size(); ++j) {
        csv.cell(double(j + 1));
        csv.cell(sup_dist[j]);
        csv.cell(bound[j]);
        csv.cell(sup_dist[j] > bound[j] ? 1.0 : 0.0);
        csv.end_row();
    }
}

ProbeReport conjecture_probe_1d(std::uint64_t seed, int corpus, const std::vector<double>& betas,
                                double h, double half_window, int threads) {
    if (corpus < 1) throw std::invalid_argument("conjecture_probe_1d: corpus must be >= 1");
    if (!(h > 0.0)) throw std::invalid_argument("conjecture_probe_1d: h must be positive");
    if (!(half_window >= 2.0))
        throw std::invalid_argument("conjecture_probe_1d: window must extend past the support");
    for (double b : betas)
        if (!(b > 0.0 && b < 1.0))
            throw std::invalid_argument("conjecture_probe_1d: beta must lie in (0, 1)");

    ProbeReport rep;
    rep.all_finite = true;
    VariantSpec centered{Variant::centered, 0.25};

    for (int id = 0; id < corpus; ++id) {
        for (double beta : betas) {
            double q = 1.0 / (1.0 - beta);
            double ratio[2] = {0.0, 0.0};
            for (int res = 0; res < 2; ++res) {
                double hh = res == 0 ? h : 0.5 * h;
                LineFunction fl = make_line_random(substream(seed, uint64_t(id)), 6, -1.0, 1.0, hh,
                                                   -half_window, half_window);
                double den = line_grad_l1(fl);
                Max1D mr = maximal_1d(fl, beta, centered, 1e-6, threads);
                std::vector<double> fd = fd_gradient(mr.value, mr.x);
                double num = line_lp_norm(fd, fl.x_min, hh, q);
                ratio[res] = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
            }
            ProbeRow row;
            row.id = id;
            row.beta = beta;
            row.q = q;
            row.ratio_coarse = ratio[0];
            row.ratio_fine = ratio[1];
            row.drift = std::abs(ratio[1] - ratio[0]) / std::max(std::abs(ratio[0]), 1e-300);
            if (!std::isfinite(row.ratio_coarse) || !std::isfinite(row.ratio_fine))
                rep.all_finite = false;
            rep.max_drift = std::max(rep.max_drift, row.drift);
            rep.rows.push_back(row);
        }
    }
    return rep;
}

void ProbeReport::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"id", "beta", "q", "ratio_coarse", "ratio_fine", "drift"});
    for (const ProbeRow& r : rows) {
        csv.cell(double(r.id));
        csv.cell(r.beta);
        csv.cell(r.q);
        csv.cell(r.ratio_coarse);
        csv.cell(r.ratio_fine);
        csv.cell(r.drift);
        csv.end_row();
    }
}

} // namespace mfrac
