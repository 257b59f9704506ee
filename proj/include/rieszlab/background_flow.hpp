//==============================================================================
// background_flow.hpp
// Expanding background velocity fields built from an initial flow
// v0(a) = a + eps*phi(a) with periodic perturbation phi. The flow at time t
// is transported along characteristics a + t*v0(a) = x (damped Newton), and
// its gradient splits as grad v = I/(1+t) + K/(1+t)^2. The deviation part
// psi(x) = v(x) - x/(1+t) is (1+t)L-periodic, so K-norms and second
// derivatives are computed spectrally on the expanded box.
//==============================================================================
#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rieszlab/grid.hpp"
#include "rieszlab/spectral.hpp"

namespace rieszlab {

struct InitialFlow {
    int dim = 1;
    double epsilon = 0.0;
    double period = 2.0 * M_PI;   // per-axis period of phi
    std::function<void(const double*, double*)> phi;    // perturbation value
    std::function<void(const double*, double*)> dphi;   // row-major Jacobian

    void v0(const double* a, double* out) const;
    void dv0(const double* a, double* out) const;   // I + eps * dphi

    static InitialFlow identity(int dim);
    // 1-D: phi = sin(a); 2-D: (sin a2, sin a1); 3-D: (sin a2, sin a3, sin a1)
    static InitialFlow sine(int dim, double epsilon);
    static InitialFlow preset(const std::string& name, int dim, double epsilon);
};

// distance of the spectrum of a (row-major) d x d matrix from (-inf, 0]
double spectral_distance(const double* A, int dim);

// min over a sample lattice of spectral_distance(Dv0); <= 0 means inadmissible
double check_dispersive_condition(const InitialFlow& flow, int samples_per_axis);

struct BurgersPoint {
    std::array<double, kMaxDim> alpha{};   // characteristic foot point
    std::array<double, kMaxDim> v{};       // v(x, t) = v0(alpha)
    std::array<double, kMaxDim * kMaxDim> grad_v{};   // row-major
    int newton_iterations = 0;
};

// solve a + t*v0(a) = x; throws blowup_error on fold points / non-convergence
BurgersPoint burgers_evaluate(const InitialFlow& flow, const double* x, double t);

struct FlowSample {
    double t = 0.0;
    Grid grid;            // box (1+t)*period per axis
    VectorField v;        // v(x, t) at the grid nodes
    VectorField psi;      // periodic deviation v - x/(1+t)
    MatrixField grad_v;
    MatrixField K;        // (1+t)^2 (grad_v - I/(1+t))
};

FlowSample compute_K(const InitialFlow& flow, int n, double t);

struct SeriesVerdict {
    std::string name;
    double growth = 0.0;   // relative growth over the trailing decade of t
    bool bounded = true;
};

struct BackgroundReport {
    std::vector<double> times;
    std::vector<std::string> names;   // series emission order
    std::map<std::string, std::vector<double>> series;
    double max_grad_residual = 0.0;   // grad_v - I/(1+t) - K/(1+t)^2
    double max_div_residual = 0.0;    // spectral div v vs d/(1+t) + trK/(1+t)^2
    std::vector<SeriesVerdict> verdicts;
    bool all_bounded = true;
};

// normalized boundedness study: sup|K|, (1+t)^{l-d/2} ||K||_{H^l},
// (1+t)^3 sup|grad^2 v|; each series must grow less than growth_tol over
// the last decade of the sampled horizon
BackgroundReport verify_background(const InitialFlow& flow, int n,
                                   const std::vector<double>& times,
                                   const std::vector<double>& ells,
                                   double growth_tol = 0.05);

}  // namespace rieszlab
