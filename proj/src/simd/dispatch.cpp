#include <atomic>
#include <cstdlib>
#include <string>

#include "dwloa/error.hpp"
#include "dwloa/simd.hpp"

namespace dwloa::simd {

#ifndef DWLOA_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace detail
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() {
    // DWLOA_ISA=scalar pins the reference path for a whole process.
    if (const char* env = std::getenv("DWLOA_ISA"); env && std::string(env) == "scalar")
        return Isa::kScalar;
    return detected_isa();
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{&table(initial_isa())};
    return slot;
}

}  // namespace

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::kScalar: return true;
        case Isa::kAvx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    }
    return false;
}

Isa detected_isa() { return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::kScalar: return "scalar";
        case Isa::kAvx2: return "avx2";
    }
    return "unknown";
}

const KernelTable& table(Isa isa) {
    if (!isa_supported(isa))
        throw Error("instruction set not available: " + std::string(isa_name(isa)));
    return isa == Isa::kAvx2 ? *detail::avx2_table() : detail::scalar_table();
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void force_isa(Isa isa) { active_slot().store(&table(isa)); }

}  // namespace dwloa::simd
