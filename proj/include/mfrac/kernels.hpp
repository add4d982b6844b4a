#pragma once
#include <cstddef>

// Hot inner loops: contiguous reductions and max scans over table rows.
//
// Every backend follows one accumulation contract so results are bitwise
// identical and artifacts do not depend on the machine the run landed on:
//
//   sums:  four accumulator lanes, lane j takes elements i with i % 4 == j
//          (ascending i), combined as (l0 + l2) + (l1 + l3), then the
//          remaining tail elements added sequentially in ascending order;
//   max:   lanewise with max(a, b) = a > b ? a : b (the vmaxpd predicate),
//          combined as max(max(l0, l2), max(l1, l3)) then sequential tail;
//          the winning index is recovered by a scalar first-equality scan,
//          so ties resolve to the lowest index in every backend.
//
// No FMA anywhere: fused rounding would split the backends.
namespace mfrac::kern {

struct MaxHit {
    double value;         // -inf when n == 0
    std::ptrdiff_t index; // -1 when n == 0
};

// sum x[0..n)
double reduce_add(const double* x, std::size_t n);
// sum x[i]*y[i]
double reduce_dot(const double* x, const double* y, std::size_t n);
// max and first argmax of x[0..n)
MaxHit max_element(const double* x, std::size_t n);
// max and first argmax of w*(hi[i]-lo[i])
MaxHit scaled_diff_max(const double* hi, const double* lo, std::size_t n, double w);
// dst[i] = max(dst[i], c)
void max_update(double* dst, std::size_t n, double c);

// Active backend name: "scalar" or "avx2". Chosen once, at first use, from
// CPU capability; the MFRAC_KERNELS environment variable ("scalar"/"avx2")
// overrides. force_backend is the test hook; throws if the name is unknown
// or the CPU lacks it.
const char* active_backend();
void force_backend(const char* name);

} // namespace mfrac::kern
