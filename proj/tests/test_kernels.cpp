#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tarp/kernels.hpp"
#include "tarp/rng.hpp"

#include <cmath>
#include <vector>

using namespace tarp;
using namespace tarp::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal() * 3.0 + 1.0;
    return v;
}

// Sizes straddling the vector width and unroll boundaries.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 64, 65, 200, 1001};

}  // namespace

TEST_CASE("scalar reference values") {
    const auto& k = scalar_table();
    const double a[] = {1, 2, 3, 4, 5};
    const double b[] = {2, 0, -1, 1, 0.5};
    CHECK(k.dot(a, b, 5) == 2 - 3 + 4 + 2.5);
    CHECK(k.sum(a, 5) == 15);
    CHECK(k.sum_sq_dev(a, 3.0, 5) == 10);
    double d[] = {1, 1, 1};
    k.add(d, a, 3);
    CHECK(d[2] == 4);
    k.sub(d, b, 3);
    CHECK(d[2] == 5);
    k.scale(d, 0.5, 3);
    CHECK(d[2] == 2.5);
    double s[5];
    k.standardize(s, a, 3.0, 2.0, 5);
    CHECK(s[0] == -1.0);
    CHECK(s[4] == 1.0);
}

TEST_CASE("avx2 kernels match the scalar reference") {
    if (!isa_available(Isa::avx2)) {
        MESSAGE("AVX2 not available on this machine; equivalence test skipped");
        return;
    }
    const auto& ref = table(Isa::scalar);
    const auto& simd = table(Isa::avx2);
    CHECK(simd.isa == Isa::avx2);
    for (std::size_t n : kSizes) {
        CAPTURE(n);
        const auto a = random_vector(n, 100 + n);
        const auto b = random_vector(n, 200 + n);

        // Reductions: same value up to reassociation.
        const double tol = 1e-13 * (1.0 + static_cast<double>(n));
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
        CHECK(std::abs(ref.dot(a.data(), b.data(), n) - simd.dot(a.data(), b.data(), n)) <= tol * (1.0 + mag));
        double absSum = 0.0;
        for (double x : a) absSum += std::abs(x);
        CHECK(std::abs(ref.sum(a.data(), n) - simd.sum(a.data(), n)) <= tol * (1.0 + absSum));
        const double ssRef = ref.sum_sq_dev(a.data(), 0.7, n);
        CHECK(std::abs(ssRef - simd.sum_sq_dev(a.data(), 0.7, n)) <= tol * (1.0 + ssRef));

        // Elementwise: bit-identical.
        auto d1 = a, d2 = a;
        ref.add(d1.data(), b.data(), n);
        simd.add(d2.data(), b.data(), n);
        CHECK(d1 == d2);
        ref.sub(d1.data(), b.data(), n);
        simd.sub(d2.data(), b.data(), n);
        CHECK(d1 == d2);
        ref.scale(d1.data(), 0.37, n);
        simd.scale(d2.data(), 0.37, n);
        CHECK(d1 == d2);
        std::vector<double> s1(n), s2(n);
        ref.standardize(s1.data(), a.data(), 1.25, 2.9, n);
        simd.standardize(s2.data(), a.data(), 1.25, 2.9, n);
        CHECK(s1 == s2);
    }
}

TEST_CASE("unaligned pointers are handled") {
    if (!isa_available(Isa::avx2)) return;
    const auto a = random_vector(70, 1);
    const auto b = random_vector(70, 2);
    const auto& ref = table(Isa::scalar);
    const auto& simd = table(Isa::avx2);
    for (std::size_t off = 1; off < 4; ++off) {
        const std::size_t n = 70 - off;
        CHECK(std::abs(ref.dot(a.data() + off, b.data() + off, n) - simd.dot(a.data() + off, b.data() + off, n)) < 1e-10);
        auto d1 = a, d2 = a;
        ref.add(d1.data() + off, b.data(), n);
        simd.add(d2.data() + off, b.data(), n);
        CHECK(d1 == d2);
    }
}

TEST_CASE("dispatch can be forced to the scalar path") {
    const Isa before = active_isa();
    set_active_isa(Isa::scalar);
    CHECK(active().isa == Isa::scalar);
    const double x[] = {1, 2, 3};
    CHECK(kernels::sum(std::span<const double>(x, 3)) == 6.0);
    if (isa_available(Isa::avx2)) {
        set_active_isa(Isa::avx2);
        CHECK(active().isa == Isa::avx2);
    }
    set_active_isa(before);
    CHECK(to_string(Isa::scalar) == "scalar");
}
