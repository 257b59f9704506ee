//==============================================================================
// solver.hpp
// Time integration of the rescaled systems with classical fixed-step RK4 and
// 2/3-dealiased pseudo-spectral products. In rescaled time tau:
//   pressureless:  dN = -W.grad N - N div W / 2 - (d/2) N
//                  dW = -W.grad W - W + lambda e^{sigma tau} F[N^2]
//   pressured:     dN = -W.grad N - gt N div W - gt d N
//                  dW = -W.grad W - W - gt N grad N
//                       + lambda e^{sigma tau} F[max(N,0)^{1/gt}]
// with F the Riesz force and gt = (gamma-1)/2. A CFL guard and per-step
// finiteness checks turn breakdown into a reported outcome, not UB.
//==============================================================================
#pragma once

#include <functional>
#include <string>

#include "rieszlab/model.hpp"
#include "rieszlab/spectral.hpp"

namespace rieszlab {

struct StepStats {
    std::size_t clamped_points = 0;   // N below -clamp_tol before the power
    double min_N = 0.0;
    double max_W = 0.0;
};

// time derivative of the state; stats (if given) accumulate clamp counts
State rhs(const ModelParams& p, const State& s, StepStats* stats = nullptr,
          double clamp_tol = 1e-8);

struct SolverConfig {
    double dtau = 0.01;
    double tau_end = 3.0;
    double cfl_limit = 0.5;
    double clamp_tol = 1e-8;   // absolute N threshold counted as clamped
};

// one RK4 step; throws blowup_error on CFL violation or non-finite fields
void step_rk4(const ModelParams& p, State& s, double dtau,
              const SolverConfig& cfg, StepStats* stats = nullptr);

enum class RunOutcome { completed, blowup, step_error };

struct RunResult {
    RunOutcome outcome = RunOutcome::completed;
    double breakdown_tau = 0.0;
    std::string breakdown_reason;
    std::size_t steps = 0;
    double max_clamp_fraction = 0.0;
    bool clamp_warning = false;   // clamp fraction exceeded 1% at some step
};

// integrate to tau_end; observer runs on the initial state and after every
// step. Breakdown is captured in the result, other errors propagate.
RunResult simulate(const ModelParams& p, State& s, const SolverConfig& cfg,
                   const std::function<void(const State&, std::size_t)>& observer = {});

}  // namespace rieszlab
