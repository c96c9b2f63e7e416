#include "tarp/kernels.hpp"

namespace tarp::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double sum_sq_dev(const double* a, double center, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - center;
        acc += d * d;
    }
    return acc;
}

void add(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void sub(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] -= src[i];
}

void scale(double* dst, double factor, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] *= factor;
}

void standardize(double* dst, const double* src, double center, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = (src[i] - center) / s;
}

constexpr KernelTable kScalar{Isa::scalar, dot, sum, sum_sq_dev, add, sub, scale, standardize};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace tarp::kernels
