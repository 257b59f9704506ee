//==============================================================================
// gronwall.hpp
// Numerical certification of the Gronwall-type decay lemma: worst-case ODE
// integration (the differential inequality taken as an equality), the decay
// envelope 2 e^{C* t/(1+t)} (1+t)^{-a} Y0, smallness-threshold bisection,
// and the proof's bootstrap smallness constant.
//
// Certifying the equality trajectory certifies every Y satisfying the
// inequality: scalar trajectories cannot cross, so the equality solution
// dominates pointwise.
//==============================================================================
#pragma once

#include <cstddef>
#include <vector>

namespace rieszlab {

struct GronwallParams {
    double a = 2.0;                // linear decay strength, must exceed 1
    double c_star = 1.0;           // nonlinearity scale, >= 0 (0 = linear case)
    std::vector<double> b;         // nonlinear powers, each > 0
    std::vector<double> c;         // weight offsets, each < a * b_i
    int c_p = 1;                   // 0 or 1, switches the power sum on/off

    void validate() const;
};

struct GronwallSeries {
    std::vector<double> t;         // log-spaced, t[0] = 0
    std::vector<double> y;
    bool blowup = false;
    double blowup_time = 0.0;      // meaningful when blowup is set
};

// dY/dt = -a Y/(1+t) + C*(Y^2 + Y/(1+t)^2 + c_P sum Y^{b_i+1}/(1+t)^{1-c_i}),
// adaptive integration at relative tolerance 1e-10 with log-spaced output
GronwallSeries integrate_inequality(const GronwallParams& p, double y0,
                                    double t_end, std::size_t samples = 400);

double envelope(const GronwallParams& p, double y0, double t);

// true iff the trajectory stays below the envelope pointwise on [0, t_end]
// (absolute slack for integrator error); blowup counts as failure
bool verify_lemma(const GronwallParams& p, double y0, double t_end = 1e4,
                  double slack = 1e-9);

struct ThresholdResult {
    double m = 0.0;
    bool unbounded_at_scale = false;   // doubling never found a violation
};

// largest certified Y0, located by doubling + bisection to the requested
// relative resolution
ThresholdResult find_threshold_M(const GronwallParams& p, double t_end = 1e4,
                                 double resolution = 1e-3);

// the proof's smallness constant 4C*e^{C*}/(a-1) Z0 +
// c_P sum 2^{b_i+1} C* e^{C* b_i}/(a b_i - c_i) Z0^{b_i}; the argument
// Z0 is certified analytically whenever this stays below 1
double bootstrap_margin(const GronwallParams& p, double z0);

// root of bootstrap_margin == 1 (the analytic sufficient threshold);
// infinity when c_star = 0
double sufficient_threshold(const GronwallParams& p);

// log-log slope of the trajectory over the trailing decade of t; certified
// runs approach -a
double asymptotic_slope(const GronwallSeries& s);

}  // namespace rieszlab
