#pragma once
#include "mfrac/geometry.hpp"
#include "mfrac/radial.hpp"

#include <string>
#include <vector>

// Discrete sup over admissible balls. For a radial function the ball family
// collapses to (s, r) cells; membership of the evaluation point x (|x| = t)
// is |s - t| <= r. Variants restrict the family:
//   noncentered   |s - t| <= r
//   centered      s = t (column computed on demand, never interpolated)
//   truncated     additionally r <= trunc_factor * t
//   inner_only    ball inside B(0, t):  s = t - r (tangent from inside)
//   outer_only    ball outside B(0, t): s = t + r (tangent from outside)
namespace mfrac {

enum class Variant { noncentered, centered, truncated, inner_only, outer_only };

Variant variant_from_string(const std::string& name);
std::string variant_name(Variant v);

struct VariantSpec {
    Variant kind = Variant::noncentered;
    double trunc_factor = 0.25;
};

struct GoodBall {
    double s, r, a;
};

// cells within relative eps of the per-point sup; the near-argmax set
struct GoodBallSet {
    double t = 0.0, value = 0.0;
    std::vector<GoodBall> balls;
    double r_min = 0.0, r_max = 0.0;
    bool empty_admissible = false;
};

struct SearchParams {
    double s_step = 0.0, r_step = 0.0; // 0 -> profile spacing
    double s_max = -1.0, r_max = -1.0; // < 0 -> derived; see derive_grids
    double eps_rel = 1e-6;             // good-ball admission tolerance
    bool prune = true;                 // envelope branch-and-bound (results identical)
};

// upper bounds used for pruning: value(s, r) <= r^beta * min(linf, l1/(omega_d r^d))
struct EnvelopeData {
    double linf = 0.0, l1 = 0.0;
};

struct MaximalResult {
    int d = 1;
    double beta = 0.0;
    VariantSpec variant;
    std::vector<double> eval_grid, value;
    std::vector<GoodBallSet> good;
    SearchParams params;
    uint64_t f_hash = 0;

    void write_csv(const std::string& path) const; // t,value,r_min,r_max,s_best,r_best
};

// one evaluation point against a prebuilt table (noncentered family variants)
GoodBallSet maximal_radial(const AverageTable& tab, double t, const VariantSpec& v,
                           double eps_rel, const EnvelopeData* env = nullptr);

// centered column at s = t over r_grid, computed on demand
GoodBallSet maximal_centered(const CapKernelContext& ctx, const RadialProfile& f_abs, double beta,
                             double t, const std::vector<double>& r_grid, double eps_rel);

// Full pipeline: modulus, table (except centered), per-point search.
// table_out, when given, receives the table for reuse/inspection.
MaximalResult maximal_profile(const RadialProfile& f, double beta, const VariantSpec& v,
                              const std::vector<double>& eval_grid, const SearchParams& sp = {},
                              int threads = 1, AverageTable* table_out = nullptr);

// 1-D pipeline on the line: prefix integrals make every interval average O(1).
struct Max1D {
    double beta = 0.0;
    VariantSpec variant;
    std::vector<double> x, value;
    std::vector<GoodBallSet> good; // s = interval midpoint, r = half-length
};

Max1D maximal_1d(const LineFunction& f, double beta, const VariantSpec& v,
                 double eps_rel = 1e-6, int threads = 1);

struct RadiusStats {
    double r_min = 0.0, r_max = 0.0;
    std::size_t n_points = 0, n_empty = 0;
    std::vector<std::size_t> histogram; // 16 bins over [0, r_max]
    double min_radius_slack = 0.0;      // min over points of r_min - ((value/linf)^(1/beta) - h)
};

RadiusStats good_radius_stats(const MaximalResult& res, const EnvelopeData& env, double h);

} // namespace mfrac
