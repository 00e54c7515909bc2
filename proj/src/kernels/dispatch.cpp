#include "kernels_impl.hpp"

#include <cassert>
#include <cstdlib>
#include <cstring>

namespace wmnv::kernels {

const KernelTable &scalar_table() noexcept { return detail::kScalarTable; }

const KernelTable *avx2_table() noexcept {
#if defined(WMNV_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &detail::kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable &active() noexcept {
    static const KernelTable &table = []() -> const KernelTable & {
        const char *forced = std::getenv("WEIER_MNV_SIMD");
        if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return scalar_table();
        if (const KernelTable *t = avx2_table()) return *t;
        return scalar_table();
    }();
    return table;
}

const char *isa_name(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

void mul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
    assert(a.size() == b.size() && a.size() == out.size());
    active().mul(a.data(), b.data(), out.data(), out.size());
}

void mul_acc(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
    assert(a.size() == b.size() && a.size() == out.size());
    active().mul_acc(a.data(), b.data(), out.data(), out.size());
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    assert(x.size() == y.size());
    active().axpy(alpha, x.data(), y.data(), y.size());
}

void scale_real(std::span<const double> s, std::span<const cplx> x, std::span<cplx> out) {
    assert(s.size() == x.size() && x.size() == out.size());
    active().scale_real(s.data(), x.data(), out.data(), out.size());
}

cplx sum(std::span<const cplx> x) { return active().sum(x.data(), x.size()); }

double max_abs(std::span<const cplx> x) { return active().max_abs(x.data(), x.size()); }

} // namespace wmnv::kernels
