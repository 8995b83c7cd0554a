#include "bht/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "bht/errors.hpp"

namespace bht {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan plan_for(std::size_t n, int sign) {
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<cplx> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(int(n), p, p,
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, plan);
    return plan;
}

} // namespace

void fft_inplace(cplx* v, std::size_t n, int sign) {
    if (n == 0 || (n & (n - 1)) != 0) throw parameter_error("fft_inplace: length must be a power of two");
    if (n == 1) return;
    fftw_plan plan = plan_for(n, sign);
    auto* p = reinterpret_cast<fftw_complex*>(v);
    fftw_execute_dft(plan, p, p);
}

void fft_rows(cplx* a, std::size_t N, int sign) {
    for (std::size_t r = 0; r < N; ++r) fft_inplace(a + r * N, N, sign);
}

void fft_cols(cplx* a, std::size_t N, int sign) {
    std::vector<cplx> col(N);
    for (std::size_t c = 0; c < N; ++c) {
        for (std::size_t r = 0; r < N; ++r) col[r] = a[r * N + c];
        fft_inplace(col.data(), N, sign);
        for (std::size_t r = 0; r < N; ++r) a[r * N + c] = col[r];
    }
}

} // namespace bht
