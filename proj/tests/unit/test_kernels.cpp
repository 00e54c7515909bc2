#include <doctest.h>

#include "weiermnv/kernels.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using wmnv::kernels::cplx;
namespace k = wmnv::kernels;

namespace {

std::vector<cplx> random_vec(std::mt19937_64 &rng, std::size_t n) {
    std::normal_distribution<double> d;
    std::vector<cplx> v(n);
    for (auto &x : v) x = {d(rng), d(rng)};
    return v;
}

double rel_diff(const std::vector<cplx> &a, const std::vector<cplx> &b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(a[i]));
    }
    return den > 0 ? num / den : num;
}

} // namespace

TEST_CASE("active kernel table is one of the known variants") {
    const auto &t = k::active();
    CHECK((t.isa == k::Isa::Scalar || t.isa == k::Isa::Avx2));
    if (t.isa == k::Isa::Avx2) CHECK(k::avx2_table() != nullptr);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    const k::KernelTable *simd = k::avx2_table();
    if (simd == nullptr) {
        MESSAGE("AVX2 variant unavailable on this machine; equivalence not exercised");
        return;
    }
    const k::KernelTable &ref = k::scalar_table();
    std::mt19937_64 rng(20260417);
    // Odd lengths exercise the scalar tails of the vector loops.
    for (std::size_t n : {0u, 1u, 2u, 3u, 5u, 8u, 17u, 64u, 255u, 1024u}) {
        CAPTURE(n);
        const auto a = random_vec(rng, n), b = random_vec(rng, n), y0 = random_vec(rng, n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = std::real(a[i]);

        std::vector<cplx> r1(n), r2(n);
        ref.mul(a.data(), b.data(), r1.data(), n);
        simd->mul(a.data(), b.data(), r2.data(), n);
        CHECK(rel_diff(r1, r2) < 4 * std::numeric_limits<double>::epsilon());

        r1 = y0;
        r2 = y0;
        ref.mul_acc(a.data(), b.data(), r1.data(), n);
        simd->mul_acc(a.data(), b.data(), r2.data(), n);
        CHECK(rel_diff(r1, r2) < 4 * std::numeric_limits<double>::epsilon());

        r1 = y0;
        r2 = y0;
        ref.axpy({0.3, -1.7}, a.data(), r1.data(), n);
        simd->axpy({0.3, -1.7}, a.data(), r2.data(), n);
        CHECK(rel_diff(r1, r2) < 4 * std::numeric_limits<double>::epsilon());

        ref.scale_real(s.data(), b.data(), r1.data(), n);
        simd->scale_real(s.data(), b.data(), r2.data(), n);
        CHECK(r1 == r2);

        // Reductions share the partial-sum layout, so they are bit-identical.
        CHECK(ref.sum(a.data(), n) == simd->sum(a.data(), n));
        CHECK(ref.max_abs(a.data(), n) == simd->max_abs(a.data(), n));
    }
}

TEST_CASE("max_abs propagates NaN in both variants") {
    std::vector<cplx> v(9, cplx{1.0, 1.0});
    v[4] = {std::nan(""), 0.0};
    CHECK(std::isnan(k::scalar_table().max_abs(v.data(), v.size())));
    if (const auto *simd = k::avx2_table()) CHECK(std::isnan(simd->max_abs(v.data(), v.size())));
}

TEST_CASE("span front ends use the active table") {
    std::vector<cplx> a{{1, 2}, {3, 4}, {5, 6}};
    std::vector<cplx> b{{0, 1}, {1, 0}, {2, 0}};
    std::vector<cplx> out(3);
    k::mul(a, b, out);
    CHECK(out[0] == cplx(-2, 1));
    CHECK(out[1] == cplx(3, 4));
    CHECK(out[2] == cplx(10, 12));
    CHECK(k::sum(a) == cplx(9, 12));
    CHECK(k::max_abs(b) == doctest::Approx(2.0));
}
