//==============================================================================
// model.hpp
// Model parameters and state for the rescaled interacting-gas systems on the
// torus. Two closures: "pressureless" evolves the density amplitude N = n
// with half-divergence coupling and interaction exponent sigma; "pressured"
// evolves the sound-speed variable N with gamma_tilde = (gamma-1)/2 coupling.
// State lives in rescaled variables (y, tau) with t = e^tau - 1.
//==============================================================================
#pragma once

#include <cstdint>
#include <string>

#include "rieszlab/grid.hpp"

namespace rieszlab {

enum class SystemKind { pressureless, pressured };

std::string to_string(SystemKind k);
SystemKind system_from_string(const std::string& s);

struct ModelParams {
    SystemKind system = SystemKind::pressureless;
    int lambda = -1;        // interaction sign: -1 repulsive, +1 attractive
    double sigma = 0.5;     // interaction order, in (0, min(dim, 2))
    double gamma = 1.5;     // adiabatic exponent (pressured only)

    double gamma_tilde() const { return 0.5 * (gamma - 1.0); }
    void validate(int dim) const;
};

struct State {
    ScalarField N;
    VectorField W;
    double tau = 0.0;

    State() = default;
    explicit State(const Grid& g) : N(g), W(g) {}
    const Grid& grid() const { return N.grid; }
};

// compactly supported mollified plateau for N, optional odd windowed sine for
// W, optional seeded band-limited noise; everything dealiased on synthesis
struct InitialDataSpec {
    double n_amplitude = 0.01;
    double w_amplitude = 0.0;
    double support_fraction = 0.5;   // bump diameter as a fraction of L
    double plateau_fraction = 0.5;   // flat core radius as a fraction of R
    double noise_amplitude = 0.0;
    int noise_band = 8;
    std::uint64_t seed = 0;

    void validate() const;
};

State make_initial_state(const Grid& g, const InitialDataSpec& spec);

// the smooth cutoff profile itself (1 on [0, q0], 0 outside [0, 1])
double plateau_profile(double q, double q0);

}  // namespace rieszlab
