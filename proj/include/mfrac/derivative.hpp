#pragma once
#include "mfrac/maximal.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Differentiation of the maximal function and the identities that control it.
// The radial derivative of M_beta f at an active point equals
// r^beta * (average of grad|f| over any near-argmax ball), which we evaluate
// through the directional cap moment and compare against finite differences.
namespace mfrac {

// central differences on the grid interior, one-sided at both ends
std::vector<double> fd_gradient(const std::vector<double>& values, const std::vector<double>& grid);

struct GradientPair {
    std::vector<double> t, fd, formula, spread;
    std::vector<uint8_t> mask; // active AND near-argmax ball unique up to grid tolerance
    double activity = 0.05;    // |fd| >= activity * max|fd|
    double median_rel_err = 0.0;
    std::size_t n_masked = 0;

    void write_csv(const std::string& path) const;
};

// formula value per masked point, evaluated for every good ball; the reported
// value is the ball closest to the finite difference, the spread is max-min
GradientPair gradient_formula_check(const RadialProfile& f, const MaximalResult& res,
                                    double activity = 0.05);

struct RatioReport {
    std::vector<double> t, numerator, denominator, ratio;
    std::vector<uint8_t> flag;
    double max_ratio = 0.0, median_ratio = 0.0;
    std::size_t n_flagged = 0;

    void write_csv(const std::string& path) const;
};

RatioReport assemble_ratio_report(const std::vector<double>& t, std::vector<double> num,
                                  std::vector<double> den, double flag_above);

// |grad M_0 f| <= M_0(|grad f|) pointwise (beta = 0, noncentered)
RatioReport check_kinnunen(const RadialProfile& f, const std::vector<double>& eval_grid,
                           const SearchParams& sp, int threads);

// |grad M_beta f| <= C * M_{beta-1} f for beta >= 1; ratios give the empirical C
RatioReport check_ks(const RadialProfile& f, double beta, Variant kind,
                     const std::vector<double>& eval_grid, const SearchParams& sp, int threads);

// per good ball: |r^beta avg_B grad|f|| <= C r^(beta-1) avg_B |f|; for beta = 0
// only points with M_0 f > |f|(t) enter (elsewhere radius 0 is an argmax)
RatioReport check_refined_ks(const RadialProfile& f, const MaximalResult& res, double activity = 0.05);

struct InnerBallReport {
    std::size_t n_inner = 0, n_violations = 0;
    double max_defect = 0.0;    // max over balls of lhs - rhs (<= 0 when clean)
    double max_weight_gap = 0.0; // max of weighted mass minus plain mass (must be <= 0)
};

// inner-tangent balls only: |avg_B grad|f|| <= avg_B |grad f| * (|y|/|x|)
InnerBallReport check_inner_ball(const RadialProfile& f, const MaximalResult& res,
                                 double tol = 1e-9, double activity = 0.05);

struct GeometryReport {
    std::size_t n_points = 0, n_balls = 0;
    std::size_t tangency_violations = 0, onesided_violations = 0;
    double max_tangency_defect = 0.0;
};

// active points of a noncentered run: every good ball is tangent to |x| from
// one side (|s-t| ~ r, and s+r <= t or s-r >= t) within 2 grid steps
GeometryReport check_ball_geometry(const MaximalResult& res, double activity = 0.05);

// u(t) = d w_d int_t^inf |grad|f||/u du,  v(t) = d w_d t^-(d+1) int_0^t |f'| u^d du,
// both exact per segment of the piecewise-constant derivative; the L1 norms
// satisfy ||u||_1 = w_d ||grad|f|||_1 and ||v||_1 = d w_d ||grad f||_1
struct UVReport {
    std::vector<double> t, u, v;
    double u_l1 = 0.0, v_l1 = 0.0;
    double grad_mod_l1 = 0.0, grad_l1_value = 0.0;
    double u_identity_rel_err = 0.0, v_identity_rel_err = 0.0;
};

UVReport compute_uv(const RadialProfile& f, const std::vector<double>& eval_grid);

// |grad M_beta f|^q <= C ( ||grad|f|||_1^(q-1) (u + v) + |grad M^I_beta f|^q )
// on the annulus [a, b]; returns the fitted C and the pointwise pieces
struct DominationReport {
    double q = 0.0, c_fit = 0.0;
    std::size_t n_annulus = 0;
    std::vector<double> t, lhs, rhs;

    void write_csv(const std::string& path) const;
};

DominationReport check_domination(const RadialProfile& f, double beta,
                                  const MaximalResult& full, const MaximalResult& truncated,
                                  double annulus_lo, double annulus_hi);

} // namespace mfrac
