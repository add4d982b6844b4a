#include "mfrac/kernels.hpp"

#include <limits>

// Reference backend. The lane structure mirrors the vector code exactly; see
// the contract in kernels.hpp before touching the loop shapes.
namespace mfrac::kern::scalar {

static inline double kmax(double a, double b) { return a > b ? a : b; }

double reduce_add(const double* x, std::size_t n) {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        l0 += x[i];
        l1 += x[i + 1];
        l2 += x[i + 2];
        l3 += x[i + 3];
    }
    double acc = (l0 + l2) + (l1 + l3);
    for (std::size_t i = n4; i < n; ++i) acc += x[i];
    return acc;
}

double reduce_dot(const double* x, const double* y, std::size_t n) {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        l0 += x[i] * y[i];
        l1 += x[i + 1] * y[i + 1];
        l2 += x[i + 2] * y[i + 2];
        l3 += x[i + 3] * y[i + 3];
    }
    double acc = (l0 + l2) + (l1 + l3);
    for (std::size_t i = n4; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double max_value(const double* x, std::size_t n) {
    const double ninf = -std::numeric_limits<double>::infinity();
    double l0 = ninf, l1 = ninf, l2 = ninf, l3 = ninf;
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        l0 = kmax(x[i], l0);
        l1 = kmax(x[i + 1], l1);
        l2 = kmax(x[i + 2], l2);
        l3 = kmax(x[i + 3], l3);
    }
    double m = kmax(kmax(l0, l2), kmax(l1, l3));
    for (std::size_t i = n4; i < n; ++i) m = kmax(x[i], m);
    return m;
}

MaxHit max_element(const double* x, std::size_t n) {
    if (n == 0) return {-std::numeric_limits<double>::infinity(), -1};
    double m = max_value(x, n);
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] == m) return {m, std::ptrdiff_t(i)};
    return {m, 0}; // all-NaN input; callers pass finite data
}

MaxHit scaled_diff_max(const double* hi, const double* lo, std::size_t n, double w) {
    if (n == 0) return {-std::numeric_limits<double>::infinity(), -1};
    const double ninf = -std::numeric_limits<double>::infinity();
    double l0 = ninf, l1 = ninf, l2 = ninf, l3 = ninf;
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        l0 = kmax(w * (hi[i] - lo[i]), l0);
        l1 = kmax(w * (hi[i + 1] - lo[i + 1]), l1);
        l2 = kmax(w * (hi[i + 2] - lo[i + 2]), l2);
        l3 = kmax(w * (hi[i + 3] - lo[i + 3]), l3);
    }
    double m = kmax(kmax(l0, l2), kmax(l1, l3));
    for (std::size_t i = n4; i < n; ++i) m = kmax(w * (hi[i] - lo[i]), m);
    for (std::size_t i = 0; i < n; ++i)
        if (w * (hi[i] - lo[i]) == m) return {m, std::ptrdiff_t(i)};
    return {m, 0};
}

void max_update(double* dst, std::size_t n, double c) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = kmax(c, dst[i]);
}

} // namespace mfrac::kern::scalar
