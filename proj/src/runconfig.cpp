#include "mfrac/runconfig.hpp"

#include "mfrac/csvio.hpp"
#include "mfrac/derivative.hpp"
#include "mfrac/oracle2d.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mfrac {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

// consume-and-check access to one JSON object level; leftovers are typos
struct Taker {
    json j;
    std::string path;

    Taker(json obj, std::string p) : j(std::move(obj)), path(std::move(p)) {
        if (!j.is_object()) fail(path.empty() ? std::string("top level must be an object")
                                              : path + " must be a JSON object");
    }
    std::string key(const std::string& k) const { return path.empty() ? k : path + "." + k; }
    bool has(const char* k) const { return j.contains(k); }
    json take(const char* k) {
        json v = j.at(k);
        j.erase(k);
        return v;
    }
    double num(const char* k, double def) {
        if (!has(k)) return def;
        json v = take(k);
        if (!v.is_number()) fail(key(k) + " must be a number");
        return v.get<double>();
    }
    long long integer(const char* k, long long def) {
        if (!has(k)) return def;
        json v = take(k);
        if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key(k) + " must be an integer");
        return v.get<long long>();
    }
    std::uint64_t uint64(const char* k, std::uint64_t def) {
        if (!has(k)) return def;
        json v = take(k);
        if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)))
            fail(key(k) + " must be a nonnegative integer");
        return v.get<std::uint64_t>();
    }
    bool boolean(const char* k, bool def) {
        if (!has(k)) return def;
        json v = take(k);
        if (!v.is_boolean()) fail(key(k) + " must be true or false");
        return v.get<bool>();
    }
    std::string str(const char* k, const std::string& def) {
        if (!has(k)) return def;
        json v = take(k);
        if (!v.is_string()) fail(key(k) + " must be a string");
        return v.get<std::string>();
    }
    std::vector<double> num_array(const char* k, std::vector<double> def) {
        if (!has(k)) return def;
        json v = take(k);
        if (!v.is_array()) fail(key(k) + " must be an array of numbers");
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number()) fail(key(k) + " must contain numbers only");
            out.push_back(e.get<double>());
        }
        return out;
    }
    json obj(const char* k) { return has(k) ? take(k) : json::object(); }
    void done() {
        if (!j.empty()) fail("unknown key \"" + key(j.begin().key()) + "\"");
    }
};

void apply_override(json& doc, const std::string& ov) {
    std::size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
        fail("override \"" + ov + "\" must look like dotted.path=value");
    std::string pathstr = ov.substr(0, eq), val = ov.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(val);
    } catch (const json::parse_error&) {
        parsed = val; // bare words are strings
    }
    json* cur = &doc;
    std::size_t pos = 0;
    while (true) {
        std::size_t dot = pathstr.find('.', pos);
        std::string k = pathstr.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (k.empty()) fail("override path \"" + pathstr + "\" has an empty component");
        if (dot == std::string::npos) {
            (*cur)[k] = parsed;
            break;
        }
        if (!cur->contains(k) || !(*cur)[k].is_object()) (*cur)[k] = json::object();
        cur = &(*cur)[k];
        pos = dot + 1;
    }
}

RunConfig parse_config_json(json doc) {
    Taker top(std::move(doc), "");
    RunConfig cfg;

    cfg.d = int(top.integer("d", 2));
    if (cfg.d < 1 || cfg.d > 6)
        fail("d = " + fmt_int(cfg.d) + " violates 1 <= d <= 6");
    cfg.beta = top.num("beta", 0.5);
    if (!(cfg.beta >= 0.0 && cfg.beta < cfg.d))
        fail("beta = " + fmt_double(cfg.beta) + " violates 0 <= beta < d = " + fmt_int(cfg.d));

    {
        Taker v(top.obj("variant"), "variant");
        cfg.variant.kind = variant_from_string(v.str("kind", "noncentered"));
        cfg.variant.trunc_factor = v.num("trunc_factor", 0.25);
        if (!(cfg.variant.trunc_factor > 0.0 && cfg.variant.trunc_factor <= 0.25))
            fail("variant.trunc_factor = " + fmt_double(cfg.variant.trunc_factor) +
                 " violates 0 < trunc_factor <= 0.25");
        v.done();
    }
    {
        Taker g(top.obj("grid"), "grid");
        cfg.h = g.num("h", 0.025);
        if (!(cfg.h > 0.0)) fail("grid.h = " + fmt_double(cfg.h) + " must be positive");
        cfg.t_max = g.num("t_max", 2.0);
        if (!(cfg.t_max >= 4.0 * cfg.h))
            fail("grid.t_max = " + fmt_double(cfg.t_max) + " violates t_max >= 4*h = " +
                 fmt_double(4.0 * cfg.h));
        cfg.eval_max = g.num("eval_max", 1.5);
        if (!(cfg.eval_max > 0.0))
            fail("grid.eval_max = " + fmt_double(cfg.eval_max) + " must be positive");
        g.done();
    }
    {
        Taker s(top.obj("search"), "search");
        cfg.search.s_step = s.num("s_step", 0.0);
        cfg.search.r_step = s.num("r_step", 0.0);
        if (cfg.search.s_step < 0.0 || cfg.search.r_step < 0.0)
            fail("search steps must be >= 0 (0 selects the profile spacing)");
        cfg.search.s_max = s.num("s_max", -1.0);
        cfg.search.r_max = s.num("r_max", -1.0);
        cfg.search.eps_rel = s.num("eps_rel", 1e-6);
        if (!(cfg.search.eps_rel > 0.0 && cfg.search.eps_rel <= 0.1))
            fail("search.eps_rel = " + fmt_double(cfg.search.eps_rel) + " violates 0 < eps_rel <= 0.1");
        cfg.search.prune = s.boolean("prune", true);
        s.done();
    }
    {
        Taker f(top.obj("function"), "function");
        cfg.function.preset = f.str("preset", "tent");
        static const std::set<std::string> known{"tent", "smoothed_indicator", "bump_sum", "random_pl"};
        if (!known.count(cfg.function.preset))
            fail("function.preset \"" + cfg.function.preset +
                 "\" is not one of tent|smoothed_indicator|bump_sum|random_pl");
        cfg.function.a = f.num("a", 1.0);
        if (!(cfg.function.a > 0.0))
            fail("function.a = " + fmt_double(cfg.function.a) + " must be positive");
        cfg.function.ramp = f.num("ramp", 0.1);
        if (!(cfg.function.ramp > 0.0))
            fail("function.ramp = " + fmt_double(cfg.function.ramp) + " must be positive");
        cfg.function.n_knots = int(f.integer("n_knots", 5));
        if (cfg.function.n_knots < 2 || cfg.function.n_knots > 64)
            fail("function.n_knots = " + fmt_int(cfg.function.n_knots) + " violates 2 <= n_knots <= 64");
        if (f.has("seed")) {
            cfg.function.seed = f.uint64("seed", 0);
            cfg.function.has_seed = true;
        }
        if (f.has("bumps")) {
            json arr = f.take("bumps");
            if (!arr.is_array()) fail("function.bumps must be an array");
            cfg.function.bumps.clear();
            for (const json& e : arr) {
                Taker b(e, "function.bumps[]");
                Bump bump{b.num("center", 0.0), b.num("width", 0.0), b.num("height", 0.0)};
                if (!(bump.width > 0.0)) fail("function.bumps[].width must be positive");
                if (bump.center < 0.0) fail("function.bumps[].center must be >= 0");
                if (bump.height == 0.0) fail("function.bumps[].height must be nonzero");
                b.done();
                cfg.function.bumps.push_back(bump);
            }
        }
        f.done();
    }
    {
        Taker s(top.obj("sequence"), "sequence");
        cfg.sequence.kind = seqkind_from_string(s.str("kind", "amplitude"));
        cfg.sequence.count = int(s.integer("count", 6));
        if (cfg.sequence.count < 2 || cfg.sequence.count > 20)
            fail("sequence.count = " + fmt_int(cfg.sequence.count) + " violates 2 <= count <= 20");
        cfg.sequence.rate = s.num("rate", 0.5);
        if (!(cfg.sequence.rate > 0.0 && cfg.sequence.rate < 1.0))
            fail("sequence.rate = " + fmt_double(cfg.sequence.rate) + " violates 0 < rate < 1");
        cfg.sequence.scale = s.num("scale", 1.0);
        if (!(cfg.sequence.scale > 0.0))
            fail("sequence.scale = " + fmt_double(cfg.sequence.scale) + " must be positive");
        cfg.sequence.seed = s.uint64("seed", 1);
        s.done();
    }

    cfg.threads = int(top.integer("threads", 1));
    if (cfg.threads < 1 || cfg.threads > 64)
        fail("threads = " + fmt_int(cfg.threads) + " violates 1 <= threads <= 64");

    {
        Taker c(top.obj("converge"), "converge");
        cfg.tail_cut = c.num("tail_cut", -1.0);
        if (cfg.tail_cut != -1.0 && !(cfg.tail_cut > 0.0))
            fail("converge.tail_cut must be positive (or -1 for 3x the support radius)");
        c.done();
    }
    {
        Taker t(top.obj("tail"), "tail");
        cfg.tail_cuts = t.num_array("cuts", {});
        for (std::size_t i = 0; i < cfg.tail_cuts.size(); ++i) {
            if (!(cfg.tail_cuts[i] > 0.0)) fail("tail.cuts must be positive");
            if (i > 0 && !(cfg.tail_cuts[i] > cfg.tail_cuts[i - 1])) fail("tail.cuts must ascend");
        }
        cfg.tail_eps = t.num("eps", 1e-3);
        if (!(cfg.tail_eps > 0.0)) fail("tail.eps = " + fmt_double(cfg.tail_eps) + " must be positive");
        t.done();
    }
    {
        Taker i(top.obj("inequalities"), "inequalities");
        if (i.has("checks")) {
            json arr = i.take("checks");
            if (!arr.is_array()) fail("inequalities.checks must be an array of strings");
            cfg.checks.clear();
            for (const json& e : arr) {
                if (!e.is_string()) fail("inequalities.checks must contain strings");
                cfg.checks.push_back(e.get<std::string>());
            }
        }
        static const std::set<std::string> known{"kinnunen", "ks", "refined",
                                                 "inner",    "geometry", "domination", "uv"};
        for (const std::string& c : cfg.checks)
            if (!known.count(c))
                fail("inequalities.checks entry \"" + c +
                     "\" is not one of kinnunen|ks|refined|inner|geometry|domination|uv");
        cfg.ks_beta = i.num("ks_beta", 1.5);
        bool wants_ks = std::find(cfg.checks.begin(), cfg.checks.end(), "ks") != cfg.checks.end();
        if (wants_ks && !(cfg.ks_beta >= 1.0 && cfg.ks_beta < cfg.d))
            fail("inequalities.ks_beta = " + fmt_double(cfg.ks_beta) +
                 " violates 1 <= ks_beta < d = " + fmt_int(cfg.d));
        std::vector<double> ann = i.num_array("annulus", {});
        if (!ann.empty()) {
            if (ann.size() != 2 || !(ann[0] > 0.0 && ann[1] > ann[0]))
                fail("inequalities.annulus must be [lo, hi] with 0 < lo < hi");
            cfg.annulus_lo = ann[0];
            cfg.annulus_hi = ann[1];
        }
        i.done();
    }
    {
        Taker d(top.obj("derivative"), "derivative");
        cfg.derivative_activity = d.num("activity", 0.05);
        if (!(cfg.derivative_activity > 0.0 && cfg.derivative_activity <= 0.5))
            fail("derivative.activity = " + fmt_double(cfg.derivative_activity) +
                 " violates 0 < activity <= 0.5");
        cfg.derivative_tol = d.num("tol", 0.05);
        if (!(cfg.derivative_tol > 0.0 && cfg.derivative_tol < 1.0))
            fail("derivative.tol = " + fmt_double(cfg.derivative_tol) + " violates 0 < tol < 1");
        d.done();
    }
    {
        Taker p(top.obj("probe"), "probe");
        cfg.probe.seed = p.uint64("seed", 11);
        cfg.probe.corpus = int(p.integer("corpus", 20));
        if (cfg.probe.corpus < 1 || cfg.probe.corpus > 200)
            fail("probe.corpus = " + fmt_int(cfg.probe.corpus) + " violates 1 <= corpus <= 200");
        cfg.probe.betas = p.num_array("betas", {0.3, 0.5, 0.7});
        if (cfg.probe.betas.empty()) fail("probe.betas must not be empty");
        for (double b : cfg.probe.betas)
            if (!(b > 0.0 && b < 1.0))
                fail("probe.betas entry " + fmt_double(b) + " violates 0 < beta < 1");
        cfg.probe.h = p.num("h", 0.01);
        if (!(cfg.probe.h > 0.0 && cfg.probe.h <= 0.25))
            fail("probe.h = " + fmt_double(cfg.probe.h) + " violates 0 < h <= 0.25");
        cfg.probe.half_window = p.num("half_window", 4.0);
        if (!(cfg.probe.half_window >= 2.0))
            fail("probe.half_window = " + fmt_double(cfg.probe.half_window) +
                 " must be >= 2 so the window clears the support");
        p.done();
    }
    {
        Taker o(top.obj("oracle"), "oracle");
        cfg.oracle.h2 = o.num("h2", 0.025);
        if (!(cfg.oracle.h2 > 0.0)) fail("oracle.h2 = " + fmt_double(cfg.oracle.h2) + " must be positive");
        cfg.oracle.L = o.num("L", 3.0);
        if (!(cfg.oracle.L > 0.0)) fail("oracle.L = " + fmt_double(cfg.oracle.L) + " must be positive");
        cfg.oracle.stride = int(o.integer("stride", 2));
        if (cfg.oracle.stride < 1 || cfg.oracle.stride > 8)
            fail("oracle.stride = " + fmt_int(cfg.oracle.stride) + " violates 1 <= stride <= 8");
        cfg.oracle.r_hi = o.num("r_hi", 1.6);
        if (!(cfg.oracle.r_hi >= 2.0 * cfg.oracle.h2))
            fail("oracle.r_hi = " + fmt_double(cfg.oracle.r_hi) + " must be >= 2*h2 = " +
                 fmt_double(2.0 * cfg.oracle.h2));
        cfg.oracle.s_hi = o.num("s_hi", -1.0);
        cfg.oracle.t_cut = o.num("t_cut", 1.2);
        if (!(cfg.oracle.t_cut > 0.0))
            fail("oracle.t_cut = " + fmt_double(cfg.oracle.t_cut) + " must be positive");
        if (cfg.oracle.L < cfg.oracle.t_cut + cfg.oracle.r_hi)
            fail("oracle.L = " + fmt_double(cfg.oracle.L) + " violates L >= t_cut + r_hi = " +
                 fmt_double(cfg.oracle.t_cut + cfg.oracle.r_hi) +
                 " (disc centers must cover every useful ball)");
        cfg.oracle.gap_tol = o.num("gap_tol", 0.02);
        if (!(cfg.oracle.gap_tol > 0.0 && cfg.oracle.gap_tol <= 0.5))
            fail("oracle.gap_tol = " + fmt_double(cfg.oracle.gap_tol) + " violates 0 < gap_tol <= 0.5");
        o.done();
    }

    top.done();
    return cfg;
}

} // namespace

RunConfig parse_config_text(const std::string& json_text, const std::vector<std::string>& overrides) {
    json doc;
    try {
        doc = json_text.empty() ? json::object() : json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("top level must be a JSON object");
    for (const std::string& ov : overrides) apply_override(doc, ov);
    return parse_config_json(std::move(doc));
}

RunConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

std::string config_to_json(const RunConfig& cfg) {
    json doc;
    doc["d"] = cfg.d;
    doc["beta"] = cfg.beta;
    doc["variant"] = {{"kind", variant_name(cfg.variant.kind)},
                      {"trunc_factor", cfg.variant.trunc_factor}};
    doc["grid"] = {{"h", cfg.h}, {"t_max", cfg.t_max}, {"eval_max", cfg.eval_max}};
    doc["search"] = {{"s_step", cfg.search.s_step}, {"r_step", cfg.search.r_step},
                     {"s_max", cfg.search.s_max},   {"r_max", cfg.search.r_max},
                     {"eps_rel", cfg.search.eps_rel}, {"prune", cfg.search.prune}};
    json fn = {{"preset", cfg.function.preset}, {"a", cfg.function.a},
               {"ramp", cfg.function.ramp},     {"n_knots", cfg.function.n_knots}};
    if (cfg.function.has_seed) fn["seed"] = cfg.function.seed;
    if (!cfg.function.bumps.empty()) {
        json arr = json::array();
        for (const Bump& b : cfg.function.bumps)
            arr.push_back({{"center", b.center}, {"width", b.width}, {"height", b.height}});
        fn["bumps"] = arr;
    }
    doc["function"] = fn;
    doc["sequence"] = {{"kind", seqkind_name(cfg.sequence.kind)},
                       {"count", cfg.sequence.count},
                       {"rate", cfg.sequence.rate},
                       {"scale", cfg.sequence.scale},
                       {"seed", cfg.sequence.seed}};
    doc["threads"] = cfg.threads;
    doc["converge"] = {{"tail_cut", cfg.tail_cut}};
    doc["tail"] = {{"cuts", cfg.tail_cuts}, {"eps", cfg.tail_eps}};
    doc["inequalities"] = {{"checks", cfg.checks},
                           {"ks_beta", cfg.ks_beta},
                           {"annulus", std::vector<double>{cfg.annulus_lo, cfg.annulus_hi}}};
    doc["derivative"] = {{"activity", cfg.derivative_activity}, {"tol", cfg.derivative_tol}};
    doc["probe"] = {{"seed", cfg.probe.seed},
                    {"corpus", cfg.probe.corpus},
                    {"betas", cfg.probe.betas},
                    {"h", cfg.probe.h},
                    {"half_window", cfg.probe.half_window}};
    doc["oracle"] = {{"h2", cfg.oracle.h2},   {"L", cfg.oracle.L},
                     {"stride", cfg.oracle.stride}, {"r_hi", cfg.oracle.r_hi},
                     {"s_hi", cfg.oracle.s_hi},     {"t_cut", cfg.oracle.t_cut},
                     {"gap_tol", cfg.oracle.gap_tol}};
    return doc.dump();
}

// ---- drivers -----------------------------------------------------------------

namespace {

RadialProfile build_function(const RunConfig& cfg) {
    return make_profile(cfg.function, cfg.d, cfg.h, cfg.t_max);
}

std::vector<double> build_eval_grid(const RunConfig& cfg) {
    std::size_t n = std::size_t(std::floor(cfg.eval_max / cfg.h + 1e-9)) + 1;
    return uniform_grid(0.0, cfg.h, n);
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

std::string join(const std::string& dir, const std::string& name) { return dir + "/" + name; }

void write_profile_csv(const RadialProfile& f, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"t", "value"});
    for (std::size_t i = 0; i < f.t.size(); ++i) {
        csv.cell(f.t[i]);
        csv.cell(f.v[i]);
        csv.end_row();
    }
}

std::string onoff(bool b) { return b ? "yes" : "no"; }

} // namespace

int run_maximal(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    RadialProfile f = build_function(cfg);
    std::vector<double> grid = build_eval_grid(cfg);
    MaximalResult res = maximal_profile(f, cfg.beta, cfg.variant, grid, cfg.search, cfg.threads);
    res.write_csv(join(out_dir, "maximal.csv"));
    write_profile_csv(f, join(out_dir, "profile.csv"));

    NormReport nr = norm_report(f, 1.0, 1.0);
    double vmax = 0.0;
    for (double v : res.value) vmax = std::max(vmax, v);
    std::cout << "maximal: variant=" << variant_name(cfg.variant.kind) << " beta=" << fmt_double(cfg.beta)
              << " d=" << fmt_int(cfg.d) << " points=" << fmt_int((long long)grid.size()) << "\n";
    std::cout << "  function: l1=" << fmt_double(nr.l1) << " linf=" << fmt_double(nr.linf)
              << " grad_l1=" << fmt_double(nr.grad_l1) << "\n";
    std::cout << "  sup value=" << fmt_double(vmax) << "\n";
    write_manifest(out_dir, config_to_json(cfg), {"maximal.csv", "profile.csv"});
    std::cout << "status: ok\n";
    return 0;
}

int run_derivative_check(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.variant.kind == Variant::truncated)
        throw std::invalid_argument(
            "config: derivative-check needs a variant whose near-argmax radius is interior "
            "(noncentered, centered, inner_only, outer_only)");
    ensure_dir(out_dir);
    RadialProfile f = build_function(cfg);
    std::vector<double> grid = build_eval_grid(cfg);
    MaximalResult res = maximal_profile(f, cfg.beta, cfg.variant, grid, cfg.search, cfg.threads);
    GradientPair gp = gradient_formula_check(f, res, cfg.derivative_activity);
    gp.write_csv(join(out_dir, "gradient.csv"));
    res.write_csv(join(out_dir, "maximal.csv"));

    bool flagged = gp.n_masked == 0 || gp.median_rel_err > cfg.derivative_tol;
    std::cout << "derivative-check: masked=" << fmt_int((long long)gp.n_masked)
              << " median_rel_err=" << fmt_double(gp.median_rel_err)
              << " tol=" << fmt_double(cfg.derivative_tol) << "\n";
    write_manifest(out_dir, config_to_json(cfg), {"gradient.csv", "maximal.csv"});
    std::cout << (flagged ? "status: flagged\n" : "status: ok\n");
    return flagged ? 3 : 0;
}

int run_inequalities(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    RadialProfile f = build_function(cfg);
    std::vector<double> grid = build_eval_grid(cfg);
    double K = support_radius(f);
    bool flagged = false;
    std::vector<std::string> artifacts;

    std::optional<MaximalResult> nc;
    auto noncentered_run = [&]() -> const MaximalResult& {
        if (!nc) {
            VariantSpec v{Variant::noncentered, cfg.variant.trunc_factor};
            nc = maximal_profile(f, cfg.beta, v, grid, cfg.search, cfg.threads);
        }
        return *nc;
    };

    for (const std::string& c : cfg.checks) {
        if (c == "kinnunen") {
            RatioReport rep = check_kinnunen(f, grid, cfg.search, cfg.threads);
            rep.write_csv(join(out_dir, "kinnunen.csv"));
            artifacts.push_back("kinnunen.csv");
            if (rep.n_flagged > 0) flagged = true;
            std::cout << "kinnunen: max_ratio=" << fmt_double(rep.max_ratio)
                      << " flagged_points=" << fmt_int((long long)rep.n_flagged) << "\n";
        } else if (c == "ks") {
            RatioReport rn = check_ks(f, cfg.ks_beta, Variant::noncentered, grid, cfg.search, cfg.threads);
            RatioReport rc = check_ks(f, cfg.ks_beta, Variant::centered, grid, cfg.search, cfg.threads);
            rn.write_csv(join(out_dir, "ks_noncentered.csv"));
            rc.write_csv(join(out_dir, "ks_centered.csv"));
            artifacts.push_back("ks_noncentered.csv");
            artifacts.push_back("ks_centered.csv");
            std::cout << "ks: beta=" << fmt_double(cfg.ks_beta)
                      << " empirical_C_noncentered=" << fmt_double(rn.max_ratio)
                      << " empirical_C_centered=" << fmt_double(rc.max_ratio) << "\n";
        } else if (c == "refined") {
            RatioReport rep = check_refined_ks(f, noncentered_run(), cfg.derivative_activity);
            rep.write_csv(join(out_dir, "refined.csv"));
            artifacts.push_back("refined.csv");
            std::cout << "refined: balls=" << fmt_int((long long)rep.t.size())
                      << " empirical_C=" << fmt_double(rep.max_ratio) << "\n";
        } else if (c == "inner") {
            InnerBallReport rep = check_inner_ball(f, noncentered_run());
            if (rep.n_violations > 0) flagged = true;
            std::cout << "inner: balls=" << fmt_int((long long)rep.n_inner
                      ) << " violations=" << fmt_int((long long)rep.n_violations)
                      << " max_defect=" << fmt_double(rep.max_defect) << "\n";
        } else if (c == "geometry") {
            GeometryReport rep = check_ball_geometry(noncentered_run(), cfg.derivative_activity);
            if (rep.tangency_violations > 0 || rep.onesided_violations > 0) flagged = true;
            std::cout << "geometry: balls=" << fmt_int((long long)rep.n_balls)
                      << " tangency_violations=" << fmt_int((long long)rep.tangency_violations)
                      << " onesided_violations=" << fmt_int((long long)rep.onesided_violations)
                      << " max_tangency_defect=" << fmt_double(rep.max_tangency_defect) << "\n";
        } else if (c == "domination") {
            double lo = cfg.annulus_lo > 0.0 ? cfg.annulus_lo : 0.5 * K;
            double hi = cfg.annulus_hi > 0.0 ? cfg.annulus_hi : 1.5 * K;
            VariantSpec tv{Variant::truncated, cfg.variant.trunc_factor};
            MaximalResult trunc = maximal_profile(f, cfg.beta, tv, grid, cfg.search, cfg.threads);
            DominationReport rep = check_domination(f, cfg.beta, noncentered_run(), trunc, lo, hi);
            rep.write_csv(join(out_dir, "domination.csv"));
            artifacts.push_back("domination.csv");
            std::cout << "domination: annulus=[" << fmt_double(lo) << "," << fmt_double(hi)
                      << "] points=" << fmt_int((long long)rep.n_annulus)
                      << " C_fit=" << fmt_double(rep.c_fit) << "\n";
        } else if (c == "uv") {
            UVReport rep = compute_uv(f, grid);
            CsvWriter csv(join(out_dir, "uv.csv"));
            csv.header({"t", "u", "v"});
            for (std::size_t i = 0; i < rep.t.size(); ++i) {
                csv.cell(rep.t[i]);
                csv.cell(rep.u[i]);
                csv.cell(rep.v[i]);
                csv.end_row();
            }
            csv.close();
            artifacts.push_back("uv.csv");
            if (rep.u_identity_rel_err > 0.01 || rep.v_identity_rel_err > 0.01) flagged = true;
            std::cout << "uv: u_l1=" << fmt_double(rep.u_l1) << " v_l1=" << fmt_double(rep.v_l1)
                      << " u_identity_rel_err=" << fmt_double(rep.u_identity_rel_err)
                      << " v_identity_rel_err=" << fmt_double(rep.v_identity_rel_err) << "\n";
        }
    }

    write_manifest(out_dir, config_to_json(cfg), artifacts);
    std::cout << (flagged ? "status: flagged\n" : "status: ok\n");
    return flagged ? 3 : 0;
}

int run_converge(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    RadialProfile f = build_function(cfg);
    std::vector<double> grid = build_eval_grid(cfg);
    SequenceRun run = compute_sequence_run(f, cfg.beta, cfg.variant, cfg.sequence, grid,
                                           cfg.search, cfg.threads);
    double cut = cfg.tail_cut > 0.0 ? cfg.tail_cut : 3.0 * support_radius(f);
    ConvergenceReport rep = analyze_convergence(run, cut);
    rep.write_csv(join(out_dir, "convergence.csv"));

    std::cout << "converge: kind=" << seqkind_name(cfg.sequence.kind) << " beta=" << fmt_double(cfg.beta)
              << " q=" << fmt_double(rep.q) << " members=" << fmt_int((long long)rep.rows.size()) << "\n";
    std::cout << "  lq_decreasing=" << onoff(rep.lq_decreasing)
              << " final_rel=" << fmt_double(rep.final_rel) << " final_small=" << onoff(rep.final_small)
              << "\n";
    std::cout << "  integral_route=" << onoff(rep.bl_converges)
              << " pointwise_route=" << onoff(rep.pointwise_converges)
              << " consistent=" << onoff(rep.consistent) << "\n";
    bool ok = rep.verdict && rep.consistent;
    write_manifest(out_dir, config_to_json(cfg), {"convergence.csv"});
    std::cout << (ok ? "status: ok\n" : "status: flagged\n");
    return ok ? 0 : 3;
}

int run_tail(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    RadialProfile f = build_function(cfg);
    std::vector<double> grid = build_eval_grid(cfg);
    SequenceRun run = compute_sequence_run(f, cfg.beta, cfg.variant, cfg.sequence, grid,
                                           cfg.search, cfg.threads);
    double K = support_radius(f);
    std::vector<double> cuts = cfg.tail_cuts;
    if (cuts.empty()) cuts = {1.5 * K, 2.0 * K, 3.0 * K};
    TailReport rep = analyze_tail(run, cuts, cfg.tail_eps);
    rep.write_csv(join(out_dir, "tail.csv"));

    std::cout << "tail: cuts=" << fmt_int((long long)cuts.size())
              << " monotone_in_cut=" << onoff(rep.monotone_in_cut)
              << " uniformly_small=" << onoff(rep.uniformly_small)
              << " j_small=" << fmt_int(rep.j_small) << " eps=" << fmt_double(rep.eps) << "\n";
    bool ok = rep.monotone_in_cut && rep.uniformly_small;
    write_manifest(out_dir, config_to_json(cfg), {"tail.csv"});
    std::cout << (ok ? "status: ok\n" : "status: flagged\n");
    return ok ? 0 : 3;
}

int run_uniform(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    RadialProfile f = build_function(cfg);
    std::vector<double> grid = build_eval_grid(cfg);
    SequenceRun run = compute_sequence_run(f, cfg.beta, cfg.variant, cfg.sequence, grid,
                                           cfg.search, cfg.threads);
    UniformReport rep = analyze_uniform(run);
    rep.write_csv(join(out_dir, "uniform.csv"));

    std::cout << "uniform: members=" << fmt_int((long long)rep.sup_dist.size())
              << " violations=" << fmt_int((long long)rep.n_violations)
              << " max_defect=" << fmt_double(rep.max_defect) << "\n";
    write_manifest(out_dir, config_to_json(cfg), {"uniform.csv"});
    bool ok = rep.n_violations == 0;
    std::cout << (ok ? "status: ok\n" : "status: flagged\n");
    return ok ? 0 : 3;
}

int run_probe_1d(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    ProbeReport rep = conjecture_probe_1d(cfg.probe.seed, cfg.probe.corpus, cfg.probe.betas,
                                          cfg.probe.h, cfg.probe.half_window, cfg.threads);
    rep.write_csv(join(out_dir, "probe.csv"));
    std::cout << "probe-1d: corpus=" << fmt_int(cfg.probe.corpus)
              << " rows=" << fmt_int((long long)rep.rows.size())
              << " max_drift=" << fmt_double(rep.max_drift) << " all_finite=" << onoff(rep.all_finite)
              << "\n";
    std::cout << "  note: endpoint ratios are reported as data, not as evidence either way\n";
    write_manifest(out_dir, config_to_json(cfg), {"probe.csv"});
    std::cout << (rep.all_finite ? "status: ok\n" : "status: flagged\n");
    return rep.all_finite ? 0 : 3;
}

int run_oracle_compare(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.d != 2)
        throw std::invalid_argument("config: oracle-compare requires d = 2, got d = " +
                                    std::to_string(cfg.d));
    ensure_dir(out_dir);
    RadialProfile f = build_function(cfg);
    Grid2D g2 = rasterize(f, cfg.oracle.L, cfg.oracle.h2);

    Oracle2DParams par;
    par.stride = cfg.oracle.stride;
    par.s_hi = cfg.oracle.s_hi;
    double rstep = 2.0 * cfg.oracle.h2;
    par.radius_set = uniform_grid(rstep, rstep, std::size_t(std::floor(cfg.oracle.r_hi / rstep + 1e-9)));
    // at beta = 0 the point value competes (shrinking-ball limit), on both sides
    if (cfg.beta == 0.0) par.radius_set.insert(par.radius_set.begin(), 0.0);
    std::vector<double> field = oracle_maximal_2d(g2, cfg.beta, par, cfg.threads);

    std::vector<double> eval =
        uniform_grid(0.0, cfg.oracle.h2, std::size_t(std::floor(cfg.oracle.t_cut / cfg.oracle.h2 + 1e-9)) + 1);
    SearchParams sp = cfg.search;
    // the lattice oracle places centers every stride*h2, so the radial search
    // gets the same center resolution; radii match the disc radius step
    sp.s_step = cfg.oracle.stride * cfg.oracle.h2;
    sp.r_step = rstep;
    sp.r_max = par.radius_set.back();
    VariantSpec nc{Variant::noncentered, cfg.variant.trunc_factor};
    MaximalResult res = maximal_profile(f, cfg.beta, nc, eval, sp, cfg.threads);

    RayCompare cmp = compare_with_radial(g2, field, res, cfg.oracle.t_cut);
    cmp.write_csv(join(out_dir, "oracle_ray.csv"));

    // if the best radius saturates the scan cap the comparison is not honest
    bool capped = false;
    for (std::size_t i = 0; i < res.eval_grid.size(); ++i)
        if (res.eval_grid[i] <= cfg.oracle.t_cut && !res.good[i].balls.empty() &&
            res.good[i].r_max >= par.radius_set.back() - 1e-12)
            capped = true;

    std::cout << "oracle-compare: points=" << fmt_int((long long)cmp.n_points)
              << " max_gap=" << fmt_double(cmp.max_gap) << " median_gap=" << fmt_double(cmp.median_gap)
              << " gap_tol=" << fmt_double(cfg.oracle.gap_tol) << "\n";
    if (capped) std::cout << "  warning: radius cap reached by the radial search; raise oracle.r_hi\n";
    write_manifest(out_dir, config_to_json(cfg), {"oracle_ray.csv"});
    bool ok = !capped && cmp.max_gap <= cfg.oracle.gap_tol;
    std::cout << (ok ? "status: ok\n" : "status: flagged\n");
    return ok ? 0 : 3;
}

} // namespace mfrac
