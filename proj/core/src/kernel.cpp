#include "bht/kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bht/multiplier.hpp"

namespace bht {

namespace {
constexpr double PI = std::numbers::pi;
} // namespace

cplx CZKernel::symbol_at_angle(double theta) const {
    cplx acc = 0;
    for (int m = -max_mode; m <= max_mode; ++m)
        acc += coeffs[m + max_mode] * std::polar(1.0, m * theta);
    return acc;
}

cplx CZKernel::symbol(double xi, double eta) const {
    if (xi == 0 && eta == 0) return 0;
    return symbol_at_angle(std::atan2(eta, xi));
}

CZKernel make_kernel(const std::vector<cplx>& profile_samples, int order) {
    const int S = int(profile_samples.size());
    if (S < 8) throw parameter_error("make_kernel: need at least 8 angular samples");
    CZKernel K;
    K.max_mode = S / 2 - 1;
    K.coeffs.assign(2 * K.max_mode + 1, 0.0);
    for (int m = -K.max_mode; m <= K.max_mode; ++m) {
        cplx acc = 0;
        for (int s = 0; s < S; ++s) acc += profile_samples[s] * std::polar(1.0, -m * 2 * PI * s / S);
        K.coeffs[m + K.max_mode] = acc / double(S);
    }
    // high-frequency tail of the sample spectrum
    double total = 0, tail = 0;
    for (int m = -K.max_mode; m <= K.max_mode; ++m) {
        const double e = std::norm(K.coeffs[m + K.max_mode]);
        total += e;
        if (std::abs(m) > S / 4) tail += e;
    }
    K.certification_warning = total > 0 && tail > 1e-20 * total;

    // finite-difference certification on the annulus 1 <= r <= 2
    K.certified_order = order;
    const double h = 0.01;
    double constant = 0;
    for (double r : {1.0, 1.3, 1.6, 2.0}) {
        for (int s = 0; s < 64; ++s) {
            const double th = 2 * PI * s / 64;
            const double x0 = r * std::cos(th), y0 = r * std::sin(th);
            for (int a1 = 0; a1 <= order; ++a1) {
                for (int a2 = 0; a1 + a2 <= order; ++a2) {
                    if (a1 + a2 == 0) {
                        constant = std::max(constant, std::abs(K.symbol(x0, y0)));
                        continue;
                    }
                    // forward differences on an (a1+1) x (a2+1) stencil
                    cplx acc = 0;
                    for (int i = 0; i <= a1; ++i)
                        for (int j = 0; j <= a2; ++j) {
                            const double sign = ((a1 - i) + (a2 - j)) % 2 ? -1.0 : 1.0;
                            double binom = 1;
                            for (int t = 0; t < i; ++t) binom *= double(a1 - t) / (t + 1);
                            for (int t = 0; t < j; ++t) binom *= double(a2 - t) / (t + 1);
                            acc += sign * binom * K.symbol(x0 + i * h, y0 + j * h);
                        }
                        const double est = std::abs(acc) / std::pow(h, a1 + a2);
                    constant = std::max(constant, est * std::pow(r, a1 + a2));
                }
            }
        }
    }
    K.certified_constant = constant;
    return K;
}

std::vector<cplx> profile_cos2theta(int samples) {
    std::vector<cplx> p(samples);
    for (int s = 0; s < samples; ++s) p[s] = std::cos(2 * (2 * PI * s / samples));
    return p;
}

std::vector<cplx> profile_constant(int samples, double value) {
    return std::vector<cplx>(samples, cplx(value, 0));
}

std::vector<cplx> profile_step(int samples) {
    std::vector<cplx> p(samples);
    for (int s = 0; s < samples; ++s) p[s] = (s < samples / 2) ? 1.0 : -1.0;
    return p;
}

std::vector<cplx> profile_sincos(int samples) {
    std::vector<cplx> p(samples);
    for (int s = 0; s < samples; ++s) {
        const double th = 2 * PI * s / samples;
        p[s] = std::sin(th) * std::cos(th);
    }
    return p;
}

double radial_window(double r) {
    auto t = [](double a) { // 1 for a <= 2, 0 for a >= 4
        if (a <= 2) return 1.0;
        if (a >= 4) return 0.0;
        return smooth_step((4 - a) / 2);
    };
    const double rr = 2 * r;
    return t(4 * rr) - t(8 * rr);
}

namespace {
double wrap_angle(double t) {
    while (t > PI) t -= 2 * PI;
    while (t < -PI) t += 2 * PI;
    return t;
}

double raw_window(double theta, double center, double aperture) {
    const double d = wrap_angle(theta - center);
    return cos_pow_bump(d / aperture, 4);
}
} // namespace

double angular_window(double theta, double theta_center, double aperture, int n_cones) {
    double denom = 0;
    for (int c = 0; c < n_cones; ++c) denom += raw_window(theta, 2 * PI * c / n_cones, aperture);
    if (denom <= 0) throw parameter_error("angular_window: cones do not cover the circle");
    return raw_window(theta, theta_center, aperture) / denom;
}

cplx piece_symbol(const ConePiece& p, int ix, int iy) {
    cplx acc = 0;
    for (const auto& t : p.terms) acc += t.psi_hat[ix] * t.phi_hat[iy];
    return acc;
}

cplx piece_target(const CZKernel& K, const ConePiece& p, int ix, int iy) {
    const double xi = p.freq(ix), eta = p.freq(iy);
    const double r = std::hypot(xi, eta);
    if (r == 0) return 0;
    const double rho = radial_window(r);
    if (rho == 0) return 0;
    const double theta = std::atan2(eta, xi);
    return K.symbol_at_angle(theta) * angular_window(theta, p.theta_center, p.aperture, p.n_cones) * rho;
}

std::vector<ConePiece> cone_decompose(const CZKernel& K, int n_cones, double aperture,
                                      int n_terms, int k_min, int k_max, int grid_m) {
    if (aperture > PI / 8 + 1e-12)
        throw parameter_error("cone_decompose: aperture must be <= pi/8");
    if (n_cones * aperture < 2 * PI - 1e-12)
        throw parameter_error("cone_decompose: cones do not cover the circle");
    if (n_terms < 1) throw parameter_error("cone_decompose: n_terms must be >= 1");

    const int M = grid_m;
    std::vector<ConePiece> out;
    out.reserve(n_cones);

    double sup_k = 0;
    for (int s = 0; s < 512; ++s)
        sup_k = std::max(sup_k, std::abs(K.symbol_at_angle(2 * PI * s / 512)));
    if (sup_k == 0) sup_k = 1;

    for (int c = 0; c < n_cones; ++c) {
        ConePiece piece;
        piece.cone_index = c;
        piece.theta_center = 2 * PI * c / n_cones;
        piece.aperture = aperture;
        piece.k_min = k_min;
        piece.k_max = k_max;
        piece.grid_m = M;
        piece.n_cones = n_cones;

        Eigen::MatrixXcd G(M, M);
        for (int ix = 0; ix < M; ++ix) {
            const double xi = piece.freq(ix);
            for (int iy = 0; iy < M; ++iy) {
                const double eta = piece.freq(iy);
                const double r = std::hypot(xi, eta);
                cplx val = 0;
                if (r > 0) {
                    const double rho = radial_window(r);
                    if (rho > 0) {
                        const double theta = std::atan2(eta, xi);
                        val = K.symbol_at_angle(theta) *
                              angular_window(theta, piece.theta_center, aperture, n_cones) * rho;
                    }
                }
                G(ix, iy) = val;
            }
        }

        Eigen::BDCSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& U = svd.matrixU();
        const auto& V = svd.matrixV();
        const auto& sv = svd.singularValues();
        const int R = std::min<int>(n_terms, int(sv.size()));
        for (int r = 0; r < R; ++r) {
            if (sv(r) <= 1e-13 * sv(0)) break; // numerical rank cut
            TensorTerm term;
            term.sigma = sv(r);
            term.psi_hat.resize(M);
            term.phi_hat.resize(M);
            const double s = std::sqrt(sv(r));
            for (int i = 0; i < M; ++i) {
                term.psi_hat[i] = s * U(i, r);
                term.phi_hat[i] = s * std::conj(V(i, r));
            }
            piece.terms.push_back(std::move(term));
        }

        // residual of the truncation on the sampled annulus
        double resid = 0;
        for (int ix = 0; ix < M; ++ix)
            for (int iy = 0; iy < M; ++iy) {
                cplx approx = 0;
                for (const auto& t : piece.terms) approx += t.psi_hat[ix] * t.phi_hat[iy];
                resid = std::max(resid, std::abs(approx - G(ix, iy)));
            }
        piece.truncation_error = resid / sup_k;

        // mean-zero bookkeeping: value of each profile at frequency zero
        const int zero = M / 2;
        double psi0 = 0, phi0 = 0, scale = 0;
        for (const auto& t : piece.terms) {
            psi0 = std::max(psi0, std::abs(t.psi_hat[zero]));
            phi0 = std::max(phi0, std::abs(t.phi_hat[zero]));
            for (int i = 0; i < M; ++i)
                scale = std::max({scale, std::abs(t.psi_hat[i]), std::abs(t.phi_hat[i])});
        }
        if (scale == 0) scale = 1;
        piece.mean_zero_psi = psi0 <= 1e-10 * scale;
        piece.mean_zero_phi = phi0 <= 1e-10 * scale;

        // which punctured axes the angular window avoids
        auto window_hits = [&](double axis_angle) {
            const double d = std::abs(wrap_angle(piece.theta_center - axis_angle));
            return d < aperture / 2;
        };
        piece.avoids_punctured_xi_axis = !window_hits(0.0) && !window_hits(PI);
        piece.avoids_punctured_eta_axis = !window_hits(PI / 2) && !window_hits(-PI / 2);

        out.push_back(std::move(piece));
    }
    return out;
}

cplx SampledProfile::integral() const {
    cplx acc = 0;
    for (const auto& z : values) acc += z;
    return acc * weight;
}

double SampledProfile::l1() const {
    double acc = 0;
    for (const auto& z : values) acc += std::abs(z);
    return acc * weight;
}

SampledProfile spatial_profile(const std::vector<cplx>& hat, int grid_m, int oversample) {
    // Dual grid of the frequency samples (period grid_m, spacing 1/oversample):
    // the quadrature sum of e^{2 pi i xi_i t} over this grid is exactly
    // grid_m * delta_{xi_i = 0}, so discrete integrals reproduce hat(0).
    if (oversample < 1) throw parameter_error("spatial_profile: oversample must be >= 1");
    SampledProfile out;
    const int P = grid_m * oversample;
    out.points.resize(P);
    out.values.resize(P);
    out.weight = 1.0 / oversample;
    const double dxi = 1.0 / grid_m;
    for (int p = 0; p < P; ++p) {
        const double t = double(p) / oversample - grid_m / 2;
        cplx acc = 0;
        for (int i = 0; i < grid_m; ++i) {
            const double xi = (i - grid_m / 2) / double(grid_m);
            acc += hat[i] * std::polar(1.0, 2 * PI * xi * t);
        }
        out.points[p] = t;
        out.values[p] = acc * dxi;
    }
    return out;
}

SampledProfile scale_dilate(const SampledProfile& base, int k, int k_min, int k_max) {
    if (k < k_min || k > k_max) throw scale_range_error("scale_dilate: k outside the piece's scale range");
    SampledProfile out;
    const double s = std::ldexp(1.0, k);
    out.weight = base.weight * s;
    out.points.resize(base.points.size());
    out.values.resize(base.values.size());
    for (std::size_t p = 0; p < base.points.size(); ++p) {
        out.points[p] = base.points[p] * s;
        out.values[p] = base.values[p] / s;
    }
    return out;
}

} // namespace bht
