#pragma once

// Pointwise complex kernels used by every spectral operation. A portable scalar
// reference and an AVX2/FMA variant share one table layout; the variant is
// picked once at startup from CPUID and can be forced with WEIER_MNV_SIMD=scalar.

#include <complex>
#include <cstddef>
#include <span>

namespace wmnv::kernels {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    // out[i] = a[i] * b[i]
    void (*mul)(const cplx *a, const cplx *b, cplx *out, std::size_t n);
    // out[i] += a[i] * b[i]
    void (*mul_acc)(const cplx *a, const cplx *b, cplx *out, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(cplx alpha, const cplx *x, cplx *y, std::size_t n);
    // out[i] = s[i] * x[i], s real
    void (*scale_real)(const double *s, const cplx *x, cplx *out, std::size_t n);
    cplx (*sum)(const cplx *x, std::size_t n);
    double (*max_abs)(const cplx *x, std::size_t n);
};

const KernelTable &scalar_table() noexcept;
/// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable *avx2_table() noexcept;
const KernelTable &active() noexcept;
const char *isa_name(Isa isa) noexcept;

// Span front ends over the active table. Sizes must agree; out may alias a or b.
void mul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void mul_acc(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void scale_real(std::span<const double> s, std::span<const cplx> x, std::span<cplx> out);
cplx sum(std::span<const cplx> x);
double max_abs(std::span<const cplx> x);

} // namespace wmnv::kernels
