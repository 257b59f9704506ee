#include "rieszlab/solver.hpp"

#include <cmath>

namespace rieszlab {

namespace {

// dealias a pointwise-assembled product sum and subtract it from `into`
void subtract_dealiased(const ScalarField& product_sum, ScalarField& into) {
    ScalarField clean = dealias(product_sum);
    axpy(-1.0, clean, into);
}

}  // namespace

State rhs(const ModelParams& p, const State& s, StepStats* stats,
          double clamp_tol) {
    const Grid& g = s.grid();
    const int d = g.dim;
    const double t_factor = std::exp(p.sigma * s.tau);
    State out(g);
    out.tau = s.tau;

    Spectrum sN = forward(s.N);
    VectorField gradN = gradient(sN);
    std::vector<Spectrum> sW;
    sW.reserve(std::size_t(d));
    for (int a = 0; a < d; ++a) sW.push_back(forward(s.W[a]));

    // velocity Jacobian and its trace
    ScalarField divW(g);
    std::vector<ScalarField> dW;   // dW[a*d+b] = d W_a / d y_b
    dW.reserve(std::size_t(d) * d);
    for (int a = 0; a < d; ++a) {
        VectorField ga = gradient(sW[std::size_t(a)]);
        for (int b = 0; b < d; ++b) dW.push_back(std::move(ga[b]));
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        double acc = 0.0;
        for (int a = 0; a < d; ++a) acc += dW[std::size_t(a) * d + a][i];
        divW[i] = acc;
    }

    const bool pless = p.system == SystemKind::pressureless;
    const double gt = p.gamma_tilde();
    const double div_coupling = pless ? 0.5 : gt;
    const double damping = pless ? 0.5 * d : gt * d;

    // density equation: -dealias(W.grad N + c N div W) - damping N
    {
        ScalarField prod(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double adv = 0.0;
            for (int b = 0; b < d; ++b) adv += s.W[b][i] * gradN[b][i];
            prod[i] = adv + div_coupling * s.N[i] * divW[i];
        }
        subtract_dealiased(prod, out.N);
        axpy(-damping, s.N, out.N);
    }

    // interaction force source
    ScalarField source(g);
    if (pless) {
        for (std::size_t i = 0; i < g.size(); ++i) source[i] = s.N[i] * s.N[i];
    } else {
        const double expo = 1.0 / gt;
        std::size_t clamped = 0;
        double minN = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double n = s.N[i];
            minN = std::min(minN, n);
            if (n < -clamp_tol) ++clamped;
            source[i] = n > 0.0 ? std::pow(n, expo) : 0.0;
        }
        if (stats) {
            stats->clamped_points = std::max(stats->clamped_points, clamped);
            stats->min_N = std::min(stats->min_N, minN);
        }
    }
    Spectrum sSource = forward(source);
    dealias_inplace(sSource);
    VectorField force = riesz_force(sSource, p.sigma);

    // velocity equation
    for (int a = 0; a < d; ++a) {
        ScalarField prod(g);
        if (pless) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                double adv = 0.0;
                for (int b = 0; b < d; ++b)
                    adv += s.W[b][i] * dW[std::size_t(a) * d + b][i];
                prod[i] = adv;
            }
        } else {
            for (std::size_t i = 0; i < g.size(); ++i) {
                double adv = 0.0;
                for (int b = 0; b < d; ++b)
                    adv += s.W[b][i] * dW[std::size_t(a) * d + b][i];
                prod[i] = adv + gt * s.N[i] * gradN[a][i];
            }
        }
        subtract_dealiased(prod, out.W[a]);
        axpy(-1.0, s.W[a], out.W[a]);
        axpy(double(p.lambda) * t_factor, force[a], out.W[a]);
    }

    if (stats) stats->max_W = std::max(stats->max_W, max_abs(s.W));
    return out;
}

void step_rk4(const ModelParams& p, State& s, double dtau,
              const SolverConfig& cfg, StepStats* stats) {
    const Grid& g = s.grid();
    double wmax = max_abs(s.W);
    double cfl = dtau * wmax / g.spacing();
    if (cfl > cfg.cfl_limit)
        throw blowup_error("CFL guard tripped (dtau * max|W| / dy = " +
                               std::to_string(cfl) + ")",
                           s.tau);

    auto shifted = [&](const State& base, double h, const State& k) {
        State t = base;
        axpy(h, k.N, t.N);
        axpy(h, k.W, t.W);
        t.tau = base.tau + h;   // stages see the shifted time
        return t;
    };

    State k1 = rhs(p, s, stats, cfg.clamp_tol);
    State k2 = rhs(p, shifted(s, 0.5 * dtau, k1), stats, cfg.clamp_tol);
    State k3 = rhs(p, shifted(s, 0.5 * dtau, k2), stats, cfg.clamp_tol);
    State k4 = rhs(p, shifted(s, dtau, k3), stats, cfg.clamp_tol);

    double w = dtau / 6.0;
    axpy(w, k1.N, s.N);
    axpy(2.0 * w, k2.N, s.N);
    axpy(2.0 * w, k3.N, s.N);
    axpy(w, k4.N, s.N);
    axpy(w, k1.W, s.W);
    axpy(2.0 * w, k2.W, s.W);
    axpy(2.0 * w, k3.W, s.W);
    axpy(w, k4.W, s.W);
    s.tau += dtau;

    if (!all_finite(s.N) || !all_finite(s.W))
        throw blowup_error("non-finite state after step", s.tau);
}

RunResult simulate(const ModelParams& p, State& s, const SolverConfig& cfg,
                   const std::function<void(const State&, std::size_t)>& observer) {
    p.validate(s.grid().dim);
    if (!(cfg.dtau > 0.0) || !(cfg.tau_end >= 0.0))
        throw config_error("dtau must be positive and tau_end nonnegative");

    RunResult res;
    std::size_t nsteps = std::size_t(std::llround(cfg.tau_end / cfg.dtau));
    if (observer) observer(s, 0);
    for (std::size_t step = 1; step <= nsteps; ++step) {
        StepStats stats;
        try {
            step_rk4(p, s, cfg.dtau, cfg, &stats);
        } catch (const blowup_error& e) {
            bool cfl = std::string(e.what()).find("CFL") != std::string::npos;
            res.outcome = cfl ? RunOutcome::step_error : RunOutcome::blowup;
            res.breakdown_tau = e.when;
            res.breakdown_reason = e.what();
            return res;
        }
        double frac = double(stats.clamped_points) / double(s.grid().size());
        res.max_clamp_fraction = std::max(res.max_clamp_fraction, frac);
        if (frac > 0.01) res.clamp_warning = true;
        res.steps = step;
        if (observer) observer(s, step);
    }
    return res;
}

}  // namespace rieszlab
