#pragma once
#include "mfrac/maximal.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Sequences f_j -> f in the W^{1,1} distance and the continuity of the maximal
// operator along them: does grad M_beta f_j -> grad M_beta f in L^q, with
// q = d/(d - beta) the scaling-critical exponent?
namespace mfrac {

enum class SeqKind { amplitude, mollify, translate, node_jitter };
SeqKind seqkind_from_string(const std::string& s);
const char* seqkind_name(SeqKind k);

struct SequenceSpec {
    SeqKind kind = SeqKind::amplitude;
    int count = 6;          // members f_1 .. f_count
    double rate = 0.5;      // per-step geometric factor
    double scale = 1.0;     // size of the first perturbation (see each kind)
    std::uint64_t seed = 1; // direction draws for amplitude / node_jitter
};

struct Sequence {
    std::vector<RadialProfile> members;
    std::vector<double> w11; // exact distance of each member to the limit
};

// amplitude:    f + eps_j * g, one fixed unit direction g
// mollify:      moving average of width scale * rate^j, re-linearized
// translate:    profile recentred at delta_j = scale * rate^j
// node_jitter:  f + eps_j * g_j, a fresh coarse unit direction per member
// throws unless every distance is positive and each step contracts by at
// least min(0.999, 1.5 * rate) relative to the one before it
Sequence make_sequence(const RadialProfile& f, const SequenceSpec& spec);

// every member and the limit run through the identical search parameters
struct SequenceRun {
    double beta = 0.0;
    VariantSpec variant;
    RadialProfile f; // the limit function
    Sequence seq;
    MaximalResult limit;
    std::vector<MaximalResult> members;
};

SequenceRun compute_sequence_run(const RadialProfile& f, double beta, const VariantSpec& v,
                                 const SequenceSpec& spec, const std::vector<double>& eval_grid,
                                 const SearchParams& sp, int threads);

struct ConvergenceRow {
    int j = 0;
    double w11_dist = 0, lq_grad_dist = 0, sup_dist = 0, bl_integral = 0, tail_mass = 0;
};

struct ConvergenceReport {
    double beta = 0, q = 0, tail_cut = 0;
    std::vector<ConvergenceRow> rows;
    double grad_lq_limit = 0; // L^q norm of grad(M f) for the limit
    double bl_limit = 0;      // its q-th power
    bool lq_decreasing = false, final_small = false, verdict = false;
    double final_rel = 0; // last lq distance relative to grad_lq_limit
    // an integral-convergence + pointwise route should agree with the direct one
    bool bl_converges = false, pointwise_converges = false, consistent = false;

    void write_csv(const std::string& path) const;
};

ConvergenceReport analyze_convergence(const SequenceRun& run, double tail_cut);

struct TailReport {
    std::vector<double> cuts;
    std::vector<std::vector<double>> mass; // mass[c][j]
    double eps = 0;
    int j_small = -1; // first j with every cut's tail <= eps from there on
    bool monotone_in_cut = false, uniformly_small = false;

    void write_csv(const std::string& path) const;
};

TailReport analyze_tail(const SequenceRun& run, const std::vector<double>& cuts, double eps);

// for beta in (d-1, d): sup |M f_j - M f| <= ||f_j - f||_{d/beta} pointwise
struct UniformReport {
    std::vector<double> sup_dist, bound;
    std::size_t n_violations = 0;
    double max_defect = 0;

    void write_csv(const std::string& path) const;
};

UniformReport analyze_uniform(const SequenceRun& run);

// 1-D endpoint ratios ||(M^c_beta f)'||_q / ||f'||_1 with q = 1/(1-beta):
// a boundedness probe reported as data, never as a pass/fail claim
struct ProbeRow {
    int id = 0;
    double beta = 0, q = 0, ratio_coarse = 0, ratio_fine = 0, drift = 0;
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
    double max_drift = 0;
    bool all_finite = false;

    void write_csv(const std::string& path) const;
};

ProbeReport conjecture_probe_1d(std::uint64_t seed, int corpus, const std::vector<double>& betas,
                                double h, double half_window, int threads);

} // namespace mfrac
