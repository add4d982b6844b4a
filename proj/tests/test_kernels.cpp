#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfrac/kernels.hpp"
#include "mfrac/rng.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

using namespace mfrac;

namespace {

// Reference implementations of the documented accumulation contract, written
// directly from the header comment so a drift in any backend is caught.
double ref_reduce_add(const double* x, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t main = n - n % 4;
    for (std::size_t i = 0; i < main; ++i) lane[i % 4] += x[i];
    double acc = (lane[0] + lane[2]) + (lane[1] + lane[3]);
    for (std::size_t i = main; i < n; ++i) acc += x[i];
    return acc;
}

double ref_reduce_dot(const double* x, const double* y, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t main = n - n % 4;
    for (std::size_t i = 0; i < main; ++i) lane[i % 4] += x[i] * y[i];
    double acc = (lane[0] + lane[2]) + (lane[1] + lane[3]);
    for (std::size_t i = main; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

kern::MaxHit ref_max_element(const double* x, std::size_t n) {
    if (n == 0) return {-std::numeric_limits<double>::infinity(), -1};
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = m > x[i] ? m : x[i];
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] == m) return {m, std::ptrdiff_t(i)};
    return {m, -1};
}

std::vector<double> random_vec(uint64_t seed, std::size_t n, double lo = -1.0, double hi = 1.0) {
    SplitMix64 rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

const std::vector<std::size_t> kSizes{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 15, 16, 17, 64, 1000};

bool avx2_available() {
    try {
        kern::force_backend("avx2");
        kern::force_backend("scalar");
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

TEST_CASE("reduce_add follows the four-lane contract at every size") {
    kern::force_backend("scalar");
    for (std::size_t n : kSizes) {
        auto v = random_vec(101 + n, n);
        double got = kern::reduce_add(v.data(), n);
        double want = ref_reduce_add(v.data(), n);
        CAPTURE(n);
        CHECK(got == want); // bitwise: same contract, same rounding
    }
}

TEST_CASE("reduce_dot follows the four-lane contract at every size") {
    kern::force_backend("scalar");
    for (std::size_t n : kSizes) {
        auto x = random_vec(202 + n, n);
        auto y = random_vec(303 + n, n);
        double got = kern::reduce_dot(x.data(), y.data(), n);
        double want = ref_reduce_dot(x.data(), y.data(), n);
        CAPTURE(n);
        CHECK(got == want);
    }
}

TEST_CASE("reduce_add agrees with a long-double sum to near machine precision") {
    kern::force_backend("scalar");
    auto v = random_vec(7, 1000, 0.0, 1.0);
    long double acc = 0.0L;
    for (double x : v) acc += x;
    double got = kern::reduce_add(v.data(), v.size());
    CHECK(std::abs(got - double(acc)) <= 1e-11 * double(acc));
}

TEST_CASE("max_element finds the maximum and the first index on ties") {
    kern::force_backend("scalar");
    SUBCASE("empty input") {
        kern::MaxHit hit = kern::max_element(nullptr, 0);
        CHECK(hit.value == -std::numeric_limits<double>::infinity());
        CHECK(hit.index == -1);
    }
    SUBCASE("duplicated maximum resolves to the lowest index") {
        std::vector<double> v(32, 0.0);
        v[3] = 5.0;
        v[11] = 5.0;
        v[21] = 5.0;
        kern::MaxHit hit = kern::max_element(v.data(), v.size());
        CHECK(hit.value == 5.0);
        CHECK(hit.index == 3);
    }
    SUBCASE("all-equal array picks index zero") {
        std::vector<double> v(17, 2.5);
        kern::MaxHit hit = kern::max_element(v.data(), v.size());
        CHECK(hit.value == 2.5);
        CHECK(hit.index == 0);
    }
    SUBCASE("random arrays match the reference at every size") {
        for (std::size_t n : kSizes) {
            auto v = random_vec(404 + n, n);
            kern::MaxHit got = kern::max_element(v.data(), n);
            kern::MaxHit want = ref_max_element(v.data(), n);
            CAPTURE(n);
            CHECK(got.value == want.value);
            CHECK(got.index == want.index);
        }
    }
    SUBCASE("negative values only") {
        std::vector<double> v{-3.0, -1.5, -2.0};
        kern::MaxHit hit = kern::max_element(v.data(), v.size());
        CHECK(hit.value == -1.5);
        CHECK(hit.index == 1);
    }
}

TEST_CASE("scaled_diff_max equals max_element of w*(hi-lo)") {
    kern::force_backend("scalar");
    for (std::size_t n : kSizes) {
        auto hi = random_vec(505 + n, n, 0.0, 2.0);
        auto lo = random_vec(606 + n, n, -1.0, 1.0);
        for (double w : {0.7, 1.0, 3.25}) {
            std::vector<double> scaled(n);
            for (std::size_t i = 0; i < n; ++i) scaled[i] = w * (hi[i] - lo[i]);
            kern::MaxHit got = kern::scaled_diff_max(hi.data(), lo.data(), n, w);
            kern::MaxHit want = ref_max_element(scaled.data(), n);
            CAPTURE(n);
            CAPTURE(w);
            CHECK(got.value == want.value);
            CHECK(got.index == want.index);
        }
    }
}

TEST_CASE("max_update raises every entry to at least the constant") {
    kern::force_backend("scalar");
    for (std::size_t n : kSizes) {
        auto v = random_vec(707 + n, n);
        auto want = v;
        for (double& x : want) x = x > 0.25 ? x : 0.25;
        auto got = v;
        kern::max_update(got.data(), n, 0.25);
        CAPTURE(n);
        CHECK(got == want);
    }
}

TEST_CASE("force_backend rejects unknown names") {
    CHECK_THROWS_AS(kern::force_backend("neon"), std::invalid_argument);
    CHECK_THROWS_AS(kern::force_backend(""), std::invalid_argument);
    kern::force_backend("scalar");
    CHECK(std::string(kern::active_backend()) == "scalar");
}

TEST_CASE("avx2 backend is bitwise identical to scalar on every operation") {
    if (!avx2_available()) {
        MESSAGE("avx2 not available on this machine; skipping the equivalence sweep");
        return;
    }
    for (std::size_t n : kSizes) {
        auto x = random_vec(808 + n, n);
        auto y = random_vec(909 + n, n, 0.0, 3.0);

        kern::force_backend("scalar");
        double add_s = kern::reduce_add(x.data(), n);
        double dot_s = kern::reduce_dot(x.data(), y.data(), n);
        kern::MaxHit max_s = kern::max_element(x.data(), n);
        kern::MaxHit sdm_s = kern::scaled_diff_max(y.data(), x.data(), n, 1.75);
        auto upd_s = x;
        kern::max_update(upd_s.data(), n, 0.1);

        kern::force_backend("avx2");
        double add_v = kern::reduce_add(x.data(), n);
        double dot_v = kern::reduce_dot(x.data(), y.data(), n);
        kern::MaxHit max_v = kern::max_element(x.data(), n);
        kern::MaxHit sdm_v = kern::scaled_diff_max(y.data(), x.data(), n, 1.75);
        auto upd_v = x;
        kern::max_update(upd_v.data(), n, 0.1);

        kern::force_backend("scalar");
        CAPTURE(n);
        CHECK(std::memcmp(&add_s, &add_v, 8) == 0);
        CHECK(std::memcmp(&dot_s, &dot_v, 8) == 0);
        CHECK(max_s.value == max_v.value);
        CHECK(max_s.index == max_v.index);
        CHECK(sdm_s.value == sdm_v.value);
        CHECK(sdm_s.index == sdm_v.index);
        CHECK(upd_s == upd_v);
    }
}
