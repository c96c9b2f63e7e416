#include "tarp/error.hpp"
#include "tarp/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace tarp::kernels {

#ifndef TARP_HAVE_AVX2
const KernelTable* avx2_table() noexcept { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(TARP_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() noexcept {
    if (const char* env = std::getenv("TARP_SIMD"); env != nullptr && std::string(env) == "scalar")
        return Isa::scalar;
    return detected_isa();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
    static std::atomic<const KernelTable*> slot{&table(initial_isa())};
    return slot;
}

}  // namespace

Isa detected_isa() noexcept { return cpu_has_avx2() && avx2_table() ? Isa::avx2 : Isa::scalar; }

bool isa_available(Isa isa) noexcept {
    return isa == Isa::scalar || (cpu_has_avx2() && avx2_table() != nullptr);
}

const KernelTable& table(Isa isa) {
    if (isa == Isa::avx2) {
        require(isa_available(Isa::avx2), ErrorKind::parameter, "AVX2 kernels unavailable on this CPU");
        return *avx2_table();
    }
    return scalar_table();
}

Isa active_isa() noexcept { return active_slot().load()->isa; }

void set_active_isa(Isa isa) { active_slot().store(&table(isa)); }

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_relaxed); }

std::string_view to_string(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace tarp::kernels
