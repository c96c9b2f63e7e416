#pragma once

// Data-parallel inner loops used by screening and projection. Every kernel has a portable
// scalar reference; an AVX2/FMA variant is compiled separately and selected at runtime.
// Elementwise kernels (add, sub, scale, standardize) are bit-identical across variants;
// reductions (dot, sum, sum_sq_dev) differ only by summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace tarp::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*sum_sq_dev)(const double* a, double center, std::size_t n);
    void (*add)(double* dst, const double* src, std::size_t n);
    void (*sub)(double* dst, const double* src, std::size_t n);
    void (*scale)(double* dst, double factor, std::size_t n);
    void (*standardize)(double* dst, const double* src, double center, double scale, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_table() noexcept;

/// Best variant the running CPU supports.
Isa detected_isa() noexcept;
bool isa_available(Isa isa) noexcept;

/// Variant used by the library. Defaults to detected_isa(); `TARP_SIMD=scalar` in the
/// environment forces the reference path.
Isa active_isa() noexcept;
void set_active_isa(Isa isa);
const KernelTable& active() noexcept;
const KernelTable& table(Isa isa);

std::string_view to_string(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline double sum_sq_dev(std::span<const double> a, double center) {
    return active().sum_sq_dev(a.data(), center, a.size());
}

}  // namespace tarp::kernels
