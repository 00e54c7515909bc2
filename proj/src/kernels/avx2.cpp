// Compiled with -mavx2 -mfma -ffp-contract=off; only reached after a CPUID check.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace wmnv::kernels::detail {

namespace {

// Two complex numbers per register: [re0, im0, re1, im1].
inline __m256d cmul2(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline const double *dp(const cplx *p) { return reinterpret_cast<const double *>(p); }
inline double *dp(cplx *p) { return reinterpret_cast<double *>(p); }

inline cplx cmul1(cplx a, cplx b) {
    return {std::fma(a.real(), b.real(), -a.imag() * b.imag()),
            std::fma(a.imag(), b.real(), a.real() * b.imag())};
}

void mul_avx2(const cplx *a, const cplx *b, cplx *out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(dp(out + i), cmul2(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i))));
    }
    for (; i < n; ++i) out[i] = cmul1(a[i], b[i]);
}

void mul_acc_avx2(const cplx *a, const cplx *b, cplx *out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d p = cmul2(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i)));
        _mm256_storeu_pd(dp(out + i), _mm256_add_pd(_mm256_loadu_pd(dp(out + i)), p));
    }
    for (; i < n; ++i) out[i] += cmul1(a[i], b[i]);
}

void axpy_avx2(cplx alpha, const cplx *x, cplx *y, std::size_t n) {
    const __m256d al = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d p = cmul2(al, _mm256_loadu_pd(dp(x + i)));
        _mm256_storeu_pd(dp(y + i), _mm256_add_pd(_mm256_loadu_pd(dp(y + i)), p));
    }
    for (; i < n; ++i) y[i] += cmul1(alpha, x[i]);
}

void scale_real_avx2(const double *s, const cplx *x, cplx *out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        // [s0, s0, s1, s1]
        const __m128d s01 = _mm_loadu_pd(s + i);
        const __m256d sv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(s01), 0x50);
        _mm256_storeu_pd(dp(out + i), _mm256_mul_pd(sv, _mm256_loadu_pd(dp(x + i))));
    }
    for (; i < n; ++i) out[i] = {s[i] * x[i].real(), s[i] * x[i].imag()};
}

// Same four-way partial sums and combination order as the scalar reference,
// so the result is bit-identical.
cplx sum_avx2(const cplx *x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(dp(x + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(dp(x + i + 2)));
    }
    alignas(32) double a0[4], a1[4];
    _mm256_store_pd(a0, acc0);
    _mm256_store_pd(a1, acc1);
    double re[4] = {a0[0], a0[2], a1[0], a1[2]};
    double im[4] = {a0[1], a0[3], a1[1], a1[3]};
    for (int l = 0; i < n; ++i, ++l) {
        re[l] += x[i].real();
        im[l] += x[i].imag();
    }
    return {(re[0] + re[2]) + (re[1] + re[3]), (im[0] + im[2]) + (im[1] + im[3])};
}

double max_abs_avx2(const cplx *x, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    __m256d nan_seen = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(dp(x + i));
        const __m256d sq = _mm256_mul_pd(v, v);
        // [re0²+im0², ., re1²+im1², .]
        const __m256d s = _mm256_add_pd(sq, _mm256_permute_pd(sq, 0x5));
        const __m256d a = _mm256_sqrt_pd(s);
        nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(a, a, _CMP_UNORD_Q));
        m = _mm256_max_pd(m, a);
    }
    if (_mm256_movemask_pd(nan_seen) != 0) return std::nan("");
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double best = lanes[0] > lanes[2] ? lanes[0] : lanes[2];
    for (; i < n; ++i) {
        const double a = std::sqrt(x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
        if (std::isnan(a)) return a;
        if (a > best) best = a;
    }
    return best;
}

} // namespace

const KernelTable kAvx2Table{Isa::Avx2, mul_avx2,        mul_acc_avx2, axpy_avx2,
                             scale_real_avx2, sum_avx2, max_abs_avx2};

} // namespace wmnv::kernels::detail
