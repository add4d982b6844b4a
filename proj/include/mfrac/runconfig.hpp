#pragma once
#include "mfrac/convergence.hpp"
#include "mfrac/maximal.hpp"
#include "mfrac/radial.hpp"

#include <string>
#include <vector>

// JSON run configuration and the experiment drivers behind the CLI verbs.
// Parsing validates every field and rejects unknown keys; error messages name
// the offending field and the violated bound. Drivers return 0 on success and
// 3 when a checked property came out flagged; validation problems throw
// std::invalid_argument, which the CLI maps to exit code 2.
namespace mfrac {

struct OracleConfig {
    double h2 = 0.025, L = 3.0;
    int stride = 2;
    double r_hi = 1.6, s_hi = -1.0, t_cut = 1.2, gap_tol = 0.02;
};

struct ProbeConfig {
    std::uint64_t seed = 11;
    int corpus = 20;
    std::vector<double> betas{0.3, 0.5, 0.7};
    double h = 0.01, half_window = 4.0;
};

struct RunConfig {
    int d = 2;
    double beta = 0.5;
    VariantSpec variant;
    double h = 0.025, t_max = 2.0, eval_max = 1.5;
    SearchParams search;
    ProfileSpec function;
    SequenceSpec sequence;
    int threads = 1;

    double tail_cut = -1.0;         // converge; < 0: 3 * support radius
    std::vector<double> tail_cuts;  // tail; empty: {1.5, 2, 3} * support radius
    double tail_eps = 1e-3;

    std::vector<std::string> checks{"kinnunen", "ks", "refined", "inner", "geometry",
                                    "domination", "uv"};
    double ks_beta = 1.5;
    double annulus_lo = -1.0, annulus_hi = -1.0; // < 0: [0.5, 1.5] * support radius

    double derivative_activity = 0.05;
    double derivative_tol = 0.05; // flag when the masked median misses by more

    ProbeConfig probe;
    OracleConfig oracle;
};

// parse + validate; overrides are "dot.path=value" applied before validation
RunConfig parse_config_text(const std::string& json_text, const std::vector<std::string>& overrides);
RunConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides);

// canonical resolved form, embedded into every artifact manifest
std::string config_to_json(const RunConfig& cfg);

// experiment drivers; each writes CSV artifacts plus a manifest into out_dir
int run_maximal(const RunConfig& cfg, const std::string& out_dir);
int run_derivative_check(const RunConfig& cfg, const std::string& out_dir);
int run_inequalities(const RunConfig& cfg, const std::string& out_dir);
int run_converge(const RunConfig& cfg, const std::string& out_dir);
int run_tail(const RunConfig& cfg, const std::string& out_dir);
int run_uniform(const RunConfig& cfg, const std::string& out_dir);
int run_probe_1d(const RunConfig& cfg, const std::string& out_dir);
int run_oracle_compare(const RunConfig& cfg, const std::string& out_dir);

} // namespace mfrac
