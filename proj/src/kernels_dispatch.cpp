#include "mfrac/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace mfrac::kern {

namespace scalar {
double reduce_add(const double*, std::size_t);
double reduce_dot(const double*, const double*, std::size_t);
MaxHit max_element(const double*, std::size_t);
MaxHit scaled_diff_max(const double*, const double*, std::size_t, double);
void max_update(double*, std::size_t, double);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double reduce_add(const double*, std::size_t);
double reduce_dot(const double*, const double*, std::size_t);
MaxHit max_element(const double*, std::size_t);
MaxHit scaled_diff_max(const double*, const double*, std::size_t, double);
void max_update(double*, std::size_t, double);
} // namespace avx2
#endif

namespace {

struct Backend {
    const char* name;
    double (*reduce_add)(const double*, std::size_t);
    double (*reduce_dot)(const double*, const double*, std::size_t);
    MaxHit (*max_element)(const double*, std::size_t);
    MaxHit (*scaled_diff_max)(const double*, const double*, std::size_t, double);
    void (*max_update)(double*, std::size_t, double);
};

constexpr Backend kScalar{"scalar", scalar::reduce_add, scalar::reduce_dot,
                          scalar::max_element, scalar::scaled_diff_max, scalar::max_update};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Backend kAvx2{"avx2", avx2::reduce_add, avx2::reduce_dot,
                        avx2::max_element, avx2::scaled_diff_max, avx2::max_update};
bool cpu_has_avx2() { return __builtin_cpu_supports("avx2"); }
#else
bool cpu_has_avx2() { return false; }
#endif

const Backend* pick(const char* request) {
#if defined(__x86_64__) || defined(_M_X64)
    if (request && std::strcmp(request, "avx2") == 0) {
        if (!cpu_has_avx2())
            throw std::invalid_argument("kernels: avx2 requested but not supported by this CPU");
        return &kAvx2;
    }
#endif
    if (request && std::strcmp(request, "scalar") == 0) return &kScalar;
    if (request) throw std::invalid_argument(std::string("kernels: unknown backend '") + request + "'");
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return &kAvx2;
#endif
    return &kScalar;
}

const Backend* active() {
    static const Backend* b = pick(std::getenv("MFRAC_KERNELS"));
    return b;
}

// set by force_backend; overrides the lazy default
const Backend* g_forced = nullptr;

const Backend* cur() { return g_forced ? g_forced : active(); }

} // namespace

double reduce_add(const double* x, std::size_t n) { return cur()->reduce_add(x, n); }
double reduce_dot(const double* x, const double* y, std::size_t n) { return cur()->reduce_dot(x, y, n); }
MaxHit max_element(const double* x, std::size_t n) { return cur()->max_element(x, n); }
MaxHit scaled_diff_max(const double* hi, const double* lo, std::size_t n, double w) {
    return cur()->scaled_diff_max(hi, lo, n, w);
}
void max_update(double* dst, std::size_t n, double c) { cur()->max_update(dst, n, c); }

const char* active_backend() { return cur()->name; }
void force_backend(const char* name) { g_forced = pick(name); }

} // namespace mfrac::kern
