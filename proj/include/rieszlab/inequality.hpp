//==============================================================================
// inequality.hpp
// Empirical workbench for the functional inequalities behind the energy
// estimates: fractional Leibniz / commutator bounds, the L^infty
// interpolation bound, and the composition (power-of-field) bound.  Each
// ratio_* routine evaluates LHS / RHS for concrete fields; boundedness of
// the ratio over a random ensemble, stable under grid refinement, is the
// testable surrogate for "the constant is finite and grid-independent".
//
// Conventions:
//  - products that feed a spectral operator (the commutator pipelines, the
//    Leibniz correction, powers ahead of a seminorm) are projected by the
//    2/3 rule first; products appearing only inside a plain quadrature norm
//    are used raw.
//  - the constant (mean) part of the multiplying field commutes exactly
//    with every Fourier multiplier, so commutator pipelines subtract it up
//    front; feeding a constant multiplier therefore returns exactly 0.
//  - a vanishing LHS short-circuits to ratio 0; a vanishing RHS with
//    nonzero LHS is a degenerate input and raises config_error.
//  - L^infty norms are grid maxima; ensembles are band-limited with decay
//    exponent beta >= 2 to keep the sampling bias controlled.
//==============================================================================
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rieszlab/grid.hpp"

namespace rieszlab {

// [f, Lambda^s] g  =  f Lambda^s g - Lambda^s(f g), products dealiased
ScalarField commutator(const ScalarField& f, double s, const ScalarField& g);

// |Lambda^s(fg)|_r  vs  |Lambda^s f|_p1 |g|_q1 + |f|_p2 |Lambda^s g|_q2,
// with the Hoelder scaling 1/r = 1/p1 + 1/q1 = 1/p2 + 1/q2
double ratio_kato_ponce(const ScalarField& f, const ScalarField& g, double s,
                        double r, double p1, double q1, double p2, double q2);

// |[f,Lambda^s]g|_2  vs  |f|_{H^s} |g|_inf + |grad f|_inf |g|_{H^(s-1)}
double ratio_tech1(const ScalarField& f, const ScalarField& g, double s);

// |[f,Lambda^s]g - s grad f . Lambda^(s-2) grad g|_2
//   vs  |f|_{H^s} |g|_inf + |hess f|_inf |g|_{H^(s-2)}
double ratio_tech2(const ScalarField& f, const ScalarField& g, double s);

// |[grad Lambda^(-sigma/2), f] g|_2
//   vs  (|Lambda^(1-sigma) f|_inf + |f|_{H^(d/2+1-sigma)}) |Lambda^(sigma/2) g|_2
double ratio_tech5(const ScalarField& f, const ScalarField& g, double sigma);

// |[Lambda^s,f]g|_2 vs the Moser-type majorant; the range 1 <= s < 2 uses
// the three-term bound |Lambda f|_inf |Lambda^(s-1) g|_2
// + |grad f|_inf |Lambda^(s-1) g|_2 + |g Lambda^s f|_2, while 0 < s < 1
// uses the small-order branch |Lambda^(s/2) f|_inf |Lambda^(s/2) g|_2
// + |g Lambda^s f|_2
double ratio_moser(const ScalarField& f, const ScalarField& g, double s);

// |Lambda^s f|_inf  vs  |f|^(1/2)_{H^(d/2+s+eps)} |f|^(1/2)_{H^(d/2+s-eps)}
double ratio_linfty_interp(const ScalarField& f, double s, double eps);

// ||f|^alpha|_{H^s}  vs  |f|_inf^(alpha-1) |f|_{H^s}
double ratio_composition(const ScalarField& f, double alpha, double s);

// Band limit shared by every ensemble resolution: the largest band inside
// the n = 128 dealias ball, so refining the grid re-samples the *same*
// continuum fields and ratio drift isolates pure discretization effects.
inline constexpr int kEnsembleBand = 42;

struct FieldEnsemble {
    Grid grid;
    int count = 0;
    std::uint64_t seed = 0;
    double beta = 2.5;      // spectral decay: coefficients ~ |k|^(-beta)
    int band = kEnsembleBand;
    std::vector<ScalarField> fields;
};

// deterministic under (seed, beta, band, count) with per-mode hashed
// phases, so the member fields agree across grid resolutions; every field
// is real, mean-zero, band-limited and has unit L^2 norm
FieldEnsemble make_ensemble(const Grid& g, int count, std::uint64_t seed,
                            double beta = 2.5, int band = kEnsembleBand);

enum class Inequality {
    kKatoPonce,
    kTech1,
    kTech2,
    kTech5,
    kMoser,
    kInterp,
    kComposition,
};

inline constexpr std::array<Inequality, 7> kAllInequalities{
    Inequality::kKatoPonce, Inequality::kTech1,  Inequality::kTech2,
    Inequality::kTech5,     Inequality::kMoser,  Inequality::kInterp,
    Inequality::kComposition,
};

const char* inequality_name(Inequality q);

struct EnsembleReport {
    std::vector<double> ratios;   // one per member, in member order
    double max_ratio = 0.0;
    double p95 = 0.0;
};

// Evaluates one inequality over the ensemble at its representative
// parameters (order 1.5 for the commutator family, sigma = 0.5 for the
// force kernel, the alpha sweep {1.3, 2, 2.5} for composition).  Members
// are independent and evaluated in parallel; RIESZ_LAB_THREADS caps the
// worker count.
EnsembleReport run_ensemble(Inequality q, const Grid& g, int count,
                            std::uint64_t seed, double beta = 2.5,
                            int band = kEnsembleBand);

}  // namespace rieszlab
