#include "weiermnv/fft.hpp"

#include <fftw3.h>

#include <cassert>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace wmnv::fft {

namespace {

struct PlanKey {
    int rows, cols, sign;
    auto operator<=>(const PlanKey &) const = default;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto &[key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int rows, int cols, int sign) {
        std::lock_guard lock(mutex_);
        const PlanKey key{rows, cols, sign};
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cplx> scratch_in(static_cast<std::size_t>(rows) * cols);
        std::vector<cplx> scratch_out(scratch_in.size());
        auto *in = reinterpret_cast<fftw_complex *>(scratch_in.data());
        auto *out = reinterpret_cast<fftw_complex *>(scratch_out.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = rows == 1 ? fftw_plan_dft_1d(cols, in, out, sign, flags)
                                   : fftw_plan_dft_2d(rows, cols, in, out, sign, flags);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache &cache() {
    static PlanCache instance;
    return instance;
}

void run(int rows, int cols, int sign, std::span<const cplx> in, std::span<cplx> out) {
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    assert(in.size() == n && out.size() == n);
    fftw_plan plan = cache().get(rows, cols, sign);
    // FFTW does not write through the input pointer for out-of-place complex DFTs.
    auto *src = reinterpret_cast<fftw_complex *>(const_cast<cplx *>(in.data()));
    auto *dst = reinterpret_cast<fftw_complex *>(out.data());
    if (in.data() == out.data()) {
        std::vector<cplx> copy(in.begin(), in.end());
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex *>(copy.data()), dst);
    } else {
        fftw_execute_dft(plan, src, dst);
    }
    if (sign == FFTW_BACKWARD) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto &v : out) v *= inv;
    }
}

} // namespace

void forward_2d(int rows, int cols, std::span<const cplx> in, std::span<cplx> out) {
    run(rows, cols, FFTW_FORWARD, in, out);
}

void inverse_2d(int rows, int cols, std::span<const cplx> in, std::span<cplx> out) {
    run(rows, cols, FFTW_BACKWARD, in, out);
}

void forward_1d(int n, std::span<const cplx> in, std::span<cplx> out) {
    run(1, n, FFTW_FORWARD, in, out);
}

void inverse_1d(int n, std::span<const cplx> in, std::span<cplx> out) {
    run(1, n, FFTW_BACKWARD, in, out);
}

} // namespace wmnv::fft
