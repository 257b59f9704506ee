//==============================================================================
// diagnostics.hpp
// Monitored functionals along trajectories: physically-scaled Sobolev norms,
// the (1+t)-weighted norm families, the energy aggregates X / Z (with their
// pressured variants), the weighted density functional W(t), the iterated
// velocity functionals W~_k(t), and series-level checks (residual ratio of
// the master differential inequality, decay-envelope dominance).
//
// Scaling: the solver state lives on the rescaled box. A physical norm of
// order ell and integrability p is the rescaled one times e^{(d/p - ell) tau}.
// All weighted quantities below apply their (1+t)-power weights to physical
// norms reconstructed this way.
//==============================================================================
#pragma once

#include <string>
#include <vector>

#include "rieszlab/model.hpp"
#include "rieszlab/spectral.hpp"

namespace rieszlab {

//------------------------------------------------------------------------------
// norms of the rescaled state and the physical reconstruction factor
//------------------------------------------------------------------------------

// ||Lambda^ell f||_{L^p} on the rescaled box; p = 2 uses the Plancherel
// seminorm, other p (including lp_infinity) go through quadrature
double rescaled_norm(const ScalarField& f, double ell, double p);
double rescaled_norm(const VectorField& w, double ell, double p);

double physical_factor(int dim, double ell, double p, double tau);

//------------------------------------------------------------------------------
// scalar diagnostics
//------------------------------------------------------------------------------

// conserved physical L2 mass  e^{(d/2) tau} ||N||_{L2}
double mass(const State& state);

// energy aggregate in physical scaling:
//   pressureless  (||w||^2_{H^{s+sigma/2}} + 4 ||n||^2_{H^s})^{1/2}
//   pressured     (||w||^2_{H^s} + ||n||^2_{H^s})^{1/2}
double compute_X(const State& state, double s, double sigma, SystemKind system);

// (1+t)-weighted norm families; the tilde variant (pressured aggregates)
// drops the sigma/2 in the density weight
double weighted_density_norm(const State& state, double ell, double p,
                             double sigma);
double weighted_velocity_norm(const State& state, double ell, double p);
double weighted_density_norm_tilde(const State& state, double ell, double p);

// weighted aggregate:
//   pressureless  n_2 + w_2 + (w_{s+sigma/2,2}^2 + 4 n_{s,2}^2)^{1/2}
//   pressured     root sum of squares of the tilde family at (0,2) and (s,2)
double compute_Z(const State& state, double s, double sigma, SystemKind system);

// weighted density functional of the pressured analysis, evaluated from the
// rescaled state:  e^{(sigma-2) tau} / gt^2 * int N^{1/gt - 2}
// |Lambda^{s - sigma/2} N|^2 dy  (the change of variables of the physical
// (1+t)^{2(s - d/2 - 1)}-weighted integral); density clamped at zero
double compute_W(const State& state, double s, double sigma,
                 double gamma_tilde);

// iterated velocity functionals, 1 <= k <= k0_index(sigma, s):
//   e^{(k sigma - 2) tau} / gt^{2k} * int N^{k(1/gt-2)} |Lambda^{s-k sigma/2} W|^2 dy
double compute_Wk(const State& state, double s, double sigma,
                  double gamma_tilde, int k);

// smallest integer k with 2(1-sigma)/sigma < k <= 2(s-2)/sigma (and k >= 1);
// throws config_error when that range holds no integer
int k0_index(double sigma, double s);

// envelope decay exponent 1 + min{1, (d - sigma)/2}
double aggregate_decay_exponent(int dim, double sigma);

//------------------------------------------------------------------------------
// recorded series
//------------------------------------------------------------------------------

struct NormRow {
    double tau = 0.0;
    double t = 0.0;            // e^tau - 1
    std::string quantity;      // e.g. "n", "w", "mass", "X", "Z", "W", "Wk"
    double ell = 0.0;          // derivative order (k for "Wk"); 0 for scalars
    double p = 0.0;            // integrability; 0 for scalar diagnostics
    double rescaled = 0.0;
    double physical = 0.0;
};

struct NormSeries {
    std::vector<NormRow> rows;

    // per-quantity tau must strictly increase and values stay finite; a
    // non-finite row is allowed only as the terminal blowup marker
    void validate() const;
};

//------------------------------------------------------------------------------
// series-level checks
//------------------------------------------------------------------------------

// ratio (dZ/dt + C_{d,sigma} Z/(1+t)) / (Z^2 + Z/(1+t)^2) along a recorded
// aggregate series; the derivative uses centered differences in tau
// (dZ/dt = e^{-tau} dZ/dtau), so the output skips the two endpoints
struct ResidualSeries {
    std::vector<double> t;
    std::vector<double> ratio;
};
ResidualSeries residual_ratio_series(const std::vector<double>& tau,
                                     const std::vector<double>& z, int dim,
                                     double sigma);

// decay envelope 2 e^{c0 t/(1+t)} (1+t)^{-C_{d,sigma}} z(0); c0 is fitted as
// the smallest constant that dominates the early part of the series (first
// fit_fraction of the samples), then dominance is checked on the whole run
struct EnvelopeFit {
    double c0 = 0.0;
    bool dominated = false;
    double max_excess = 0.0;   // max over samples of z/envelope - 1
};
double envelope_value(double t, double c0, double cds, double z0);
EnvelopeFit fit_envelope(const std::vector<double>& t,
                         const std::vector<double>& z, int dim, double sigma,
                         double fit_fraction = 0.25);

}  // namespace rieszlab
