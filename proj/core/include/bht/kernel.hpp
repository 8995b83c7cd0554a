#pragma once

#include <complex>
#include <vector>

#include "bht/field.hpp"

namespace bht {

/// Degree-0 homogeneous Fourier symbol K-hat(xi, eta) = profile(angle),
/// with the profile held as a finite Fourier series in the angle.
struct CZKernel {
    std::vector<cplx> coeffs;      ///< c_m for m = -M..M, index m + M
    int max_mode = 0;              ///< M
    int certified_order = 0;
    double certified_constant = 0; ///< max |finite-diff d^a K| * r^{|a|} over the annulus
    bool certification_warning = false; ///< non-negligible high-frequency tail in the input

    cplx symbol_at_angle(double theta) const;
    cplx symbol(double xi, double eta) const;
    /// angular mean c_0 (the delta-at-origin part of the spatial kernel)
    cplx mean_mode() const { return coeffs[max_mode]; }
};

/// Build from uniform angular samples on [0, 2pi); certifies derivative
/// bounds by finite differences on the annulus 1 <= |(xi,eta)| <= 2.
CZKernel make_kernel(const std::vector<cplx>& profile_samples, int order = 4);

/// profile(theta) = cos(2 theta), the (xi^2 - eta^2)/|..|^2 symbol.
std::vector<cplx> profile_cos2theta(int samples = 256);
std::vector<cplx> profile_constant(int samples = 256, double value = 1.0);
std::vector<cplx> profile_step(int samples = 256);
/// sin(theta)cos(theta)-type odd profile (used by the 1D reduction).
std::vector<cplx> profile_sincos(int samples = 256);

/// One tensor-product term of a cone piece, sampled on the frequency grid
/// xi_i = (i - M/2)/M over [-1/2, 1/2).
struct TensorTerm {
    std::vector<cplx> psi_hat; ///< xi profile
    std::vector<cplx> phi_hat; ///< eta profile
    double sigma = 0;          ///< singular value of the term
};

struct ConePiece {
    int cone_index = 0;
    double theta_center = 0;
    double aperture = 0;               ///< full angular support width
    std::vector<TensorTerm> terms;
    int k_min = 0, k_max = 0;          ///< scale range of the dilates
    bool mean_zero_psi = false;
    bool mean_zero_phi = false;
    bool avoids_punctured_xi_axis = false; ///< window misses theta in {0, pi}
    bool avoids_punctured_eta_axis = false;
    double truncation_error = 0;       ///< relative sup-norm residual on the annulus
    int grid_m = 0;                    ///< frequency sample count per axis
    int n_cones = 0;                   ///< size of the partition this piece belongs to

    double freq(int i) const { return (i - grid_m / 2) / double(grid_m); }
};

/// Smooth angular partition into n_cones windows of width `aperture`
/// (<= pi/8), tensor-expanded to n_terms per cone via SVD on the annulus
/// piece.  n_cones * aperture must cover the circle.
std::vector<ConePiece> cone_decompose(const CZKernel& K, int n_cones, double aperture,
                                      int n_terms, int k_min = -2, int k_max = 2,
                                      int grid_m = 128);

/// Evaluate the cone piece's truncated symbol at a native grid point.
cplx piece_symbol(const ConePiece& p, int ix, int iy);
/// The exact windowed-annulus symbol the piece approximates.
cplx piece_target(const CZKernel& K, const ConePiece& p, int ix, int iy);

/// Radial partition factor rho(2r): supp in [1/8, 1/2], telescoping
/// sum_k rho(2 * 2^{-k} r) = 1 for r > 0.
double radial_window(double r);
/// Angular window of cone c out of n (normalized partition of unity).
double angular_window(double theta, double theta_center, double aperture,
                      int n_cones);

/// L^1-normalized dilate of a sampled profile: values 2^{-k} f(t/2^k) on the
/// grid 2^k t_j with weights 2^k h, so discrete integrals are k-independent.
struct SampledProfile {
    std::vector<double> points;
    std::vector<cplx> values;
    double weight = 0; ///< uniform quadrature weight
    cplx integral() const;
    double l1() const;
};

/// Spatial profile of a tensor term side on the dual grid [-M/2, M/2)
/// (inverse transform; discrete integral equals hat at frequency zero).
SampledProfile spatial_profile(const std::vector<cplx>& hat, int grid_m, int oversample = 8);
SampledProfile scale_dilate(const SampledProfile& base, int k, int k_min, int k_max);

} // namespace bht
