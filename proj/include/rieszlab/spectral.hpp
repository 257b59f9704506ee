//==============================================================================
// spectral.hpp
// Pseudo-spectral toolbox on the periodic torus: real-to-complex transforms,
// Fourier-multiplier operators (fractional Laplacian |k|^s, Riesz force
// grad |k|^{-sigma}, derivatives), 2/3-rule dealiasing, and Plancherel /
// quadrature norms.
//
// Conventions:
//  - forward() returns coefficients f_hat with f(x) = sum_k f_hat(k) e^{i k x}
//    (i.e. the raw FFTW sum divided by n^d), stored in half-spectrum r2c
//    layout: last axis holds indices 0..n/2, other axes full range with
//    index i meaning mode i <= n/2-1 ? i : i-n.
//  - |k|^s at k = 0 is taken as 0 for s > 0 and for s < 0 (mean projected
//    out before negative powers); s = 0 is the identity.
//  - odd symbols (single factor i k_a) are zeroed on the a-th Nyquist plane
//    to keep the inverse transform real.
//  - dealias() zeroes every mode with 3*|m_a| > n on any axis.
//==============================================================================
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "rieszlab/grid.hpp"

namespace rieszlab {

struct Spectrum {
    Grid grid;
    std::vector<std::complex<double>> c;   // half-spectrum, normalized

    Spectrum() = default;
    explicit Spectrum(const Grid& g);
    std::size_t size() const { return c.size(); }
};

std::size_t half_spectrum_size(const Grid& g);

// visit every stored mode; m is the integer mode vector (length grid.dim)
void for_each_mode(const Grid& g,
                   const std::function<void(std::size_t, const int*)>& fn);

// Hermitian multiplicity of a stored mode (1 on the self-conjugate last-axis
// planes, else 2); needed for Plancherel sums over the half-spectrum.
int mode_weight(const Grid& g, const int* m);

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

// f -> |k|^s f (fractional Laplacian power); s < 0 projects out the mean
ScalarField fractional_laplacian(const ScalarField& f, double s);
void fractional_laplacian_inplace(Spectrum& s, double power);

// f -> grad Lambda^{-sigma} f, the interaction force kernel
VectorField riesz_force(const ScalarField& f, double sigma);
VectorField riesz_force(const Spectrum& s, double sigma);

VectorField gradient(const ScalarField& f);
VectorField gradient(const Spectrum& s);
ScalarField divergence(const VectorField& w);
// second derivative d^2 f / dx_a dx_b
ScalarField second_derivative(const Spectrum& s, int a, int b);

ScalarField dealias(const ScalarField& f);
void dealias_inplace(Spectrum& s);
bool in_dealias_ball(const Grid& g, const int* m);

// homogeneous Sobolev seminorm; ell = 0 recovers the (mean-including) L2 norm
double sobolev_seminorm(const ScalarField& f, double ell);
double sobolev_seminorm(const VectorField& w, double ell);   // root sum of squares

// rectangle-rule L^p norm, p in [1, inf]; pass lp_infinity for the sup norm
inline constexpr double lp_infinity = std::numeric_limits<double>::infinity();
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& w, double p);   // of the pointwise magnitude

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);

}  // namespace rieszlab
