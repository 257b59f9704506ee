//==============================================================================
// decay.hpp
// Decay-rate analysis: the predicted temporal exponent tables for both
// systems, least-squares rate fitting on recorded norm series, and the
// pass/fail report comparing fitted rates against predictions.
//
// Exponent conventions: "physical" is the exponent of (1+t) bounding the
// physical-space norm; "rescaled" is the decay rate in tau of the matching
// rescaled-box norm, rescaled = (d/p - ell) - physical. Predictions are
// upper bounds, so the report gates one-sidedly: fitted >= predicted - tol.
//==============================================================================
#pragma once

#include <string>
#include <vector>

#include "rieszlab/diagnostics.hpp"
#include "rieszlab/model.hpp"

namespace rieszlab {

//------------------------------------------------------------------------------
// predicted exponents
//------------------------------------------------------------------------------

struct Exponents {
    double physical = 0.0;
    double rescaled = 0.0;
};

// Predicted exponent for ||.||_{W^{ell,p}} of the density ('n') or velocity
// ('w') under the admissible theory for (system, lambda, sigma, gamma).
// p != 2 requires ell = 0 (interpolated sup/L^p rates exist only there) and,
// for the density without pressure, the regularity index s. Inadmissible
// parameters throw config_error naming the failed hypothesis.
Exponents theorem_exponent(SystemKind system, int lambda, int dim,
                           double sigma, double gamma, double ell,
                           char quantity, double p = 2.0, double s = 0.0);

// Mass-interpolated improvement of the pressureless density exponent,
// (1+t)^{-ell - min{(ell/s)(1 - (d-sigma)/2), 0}}; genuinely stronger than
// the plain table when d > sigma + 2. Returns the physical exponent.
double improved_density_exponent(int dim, double sigma, double ell, double s);

// Smallest slack among the strict admissibility inequalities (sigma range,
// gamma bounds); rows fitted near a boundary are flagged, never gated.
double admissibility_margin(SystemKind system, int lambda, int dim,
                            double sigma, double gamma);

//------------------------------------------------------------------------------
// rate fitting
//------------------------------------------------------------------------------

struct FitResult {
    double rate = 0.0;   // decay rate (tau mode) or signed exponent (t mode)
    double r2 = 0.0;
};

// Least squares of -log(value) against tau over the trailing window_fraction
// of the tau range. Needs >= 8 samples and positive values in the window.
FitResult fit_exponent(const std::vector<double>& tau,
                       const std::vector<double>& value,
                       double window_fraction = 0.5);

// Log-log fit against (1+t): returns the signed exponent of (1+t).
FitResult fit_physical_exponent(const std::vector<double>& t,
                                const std::vector<double>& value,
                                double window_fraction = 0.5);

//------------------------------------------------------------------------------
// report
//------------------------------------------------------------------------------

struct DecayRow {
    std::string quantity;          // "n" or "w"
    double ell = 0.0;
    double p = 2.0;
    bool has_prediction = false;
    Exponents predicted;
    bool exact_law = false;        // pressureless density L2: exact mass rate
    bool fitted_ok = false;
    double fitted_rate = 0.0;
    double r2 = 0.0;
    double sharpness = 0.0;        // fitted - predicted rescaled, unfitted = 0
    bool near_boundary = false;
    std::string verdict;           // "pass", "fail", or an annotation
};

struct DecayReport {
    std::vector<DecayRow> rows;
    double window_fraction = 0.5;
    std::string config_echo;
    bool all_pass = false;         // no row carries a "fail" verdict
};

// Fits every (n/w, ell, p) series present in the recorded norms and compares
// with the exponent table. The pressureless density (ell = 0, p = 2) row is
// gated two-sidedly at mass_tol around the exact rate d/2 in tau. Fit
// failures and missing predictions annotate rows instead of aborting.
DecayReport decay_report(const NormSeries& series, const ModelParams& params,
                         int dim, double s, double tol = 0.1,
                         double window_fraction = 0.5,
                         double mass_tol = 1e-3);

}  // namespace rieszlab
