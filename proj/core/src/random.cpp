#include "bht/random.hpp"

namespace bht {

Field2D random_bandlimited2d(int n, double L, int kmax, Rng& rng, bool real) {
    const int N = 1 << n;
    if (kmax >= N / 2) throw parameter_error("random_bandlimited2d: kmax must be < N/2");
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> spec(std::size_t(N) * N, 0.0);
    for (int sy = -kmax; sy <= kmax; ++sy)
        for (int sx = -kmax; sx <= kmax; ++sx) {
            const std::size_t q = std::size_t(freq_bin(sy, N)) * N + freq_bin(sx, N);
            spec[q] = cplx(g(rng), g(rng));
        }
    if (real) {
        auto spec2 = spec;
        for (int sy = -kmax; sy <= kmax; ++sy)
            for (int sx = -kmax; sx <= kmax; ++sx) {
                const std::size_t q = std::size_t(freq_bin(sy, N)) * N + freq_bin(sx, N);
                const std::size_t qc = std::size_t(freq_bin(-sy, N)) * N + freq_bin(-sx, N);
                spec[q] = 0.5 * (spec2[q] + std::conj(spec2[qc]));
            }
    }
    return field2d_from_spectrum(std::move(spec), L);
}

Field1D random_bandlimited1d(int n, double L, int kmax, Rng& rng, bool real) {
    const int N = 1 << n;
    if (kmax >= N / 2) throw parameter_error("random_bandlimited1d: kmax must be < N/2");
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> spec(N, 0.0);
    for (int s = -kmax; s <= kmax; ++s) spec[freq_bin(s, N)] = cplx(g(rng), g(rng));
    if (real) {
        auto spec2 = spec;
        for (int s = -kmax; s <= kmax; ++s)
            spec[freq_bin(s, N)] = 0.5 * (spec2[freq_bin(s, N)] + std::conj(spec2[freq_bin(-s, N)]));
    }
    return field_from_spectrum(std::move(spec), L);
}

Field2D random_bounded2d(int n, double L, int kmax, Rng& rng) {
    Field2D F = random_bandlimited2d(n, L, kmax, rng);
    const double m = lp_norm(F, INFINITY);
    if (m > 0) F = cplx(1.0 / m, 0.0) * F;
    return F;
}

} // namespace bht
