//==============================================================================
// diagnostics.cpp
// Monitored functionals: weighted norms, energy aggregates, density/velocity
// functionals, and series-level residual / envelope checks.
//==============================================================================
#include "rieszlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "rieszlab/errors.hpp"

namespace rieszlab {

namespace {

// e^tau - 1 without cancellation for small tau
double t_of_tau(double tau) { return std::expm1(tau); }

}  // namespace

double rescaled_norm(const ScalarField& f, double ell, double p) {
    if (p == 2.0) return sobolev_seminorm(f, ell);
    if (ell == 0.0) return lp_norm(f, p);
    return lp_norm(fractional_laplacian(f, ell), p);
}

double rescaled_norm(const VectorField& w, double ell, double p) {
    if (p == 2.0) return sobolev_seminorm(w, ell);
    if (ell == 0.0) return lp_norm(w, p);
    VectorField lam(w.grid);
    for (int a = 0; a < w.dim(); ++a)
        lam[a] = fractional_laplacian(w[a], ell);
    return lp_norm(lam, p);
}

double physical_factor(int dim, double ell, double p, double tau) {
    return std::exp((static_cast<double>(dim) / p - ell) * tau);
}

double mass(const State& state) {
    return physical_factor(state.grid().dim, 0.0, 2.0, state.tau) *
           sobolev_seminorm(state.N, 0.0);
}

double compute_X(const State& state, double s, double sigma,
                 SystemKind system) {
    if (!(s > 0.0)) throw config_error("compute_X: regularity s must be > 0");
    int d = state.grid().dim;
    double tau = state.tau;
    if (system == SystemKind::pressureless) {
        double wn = physical_factor(d, s + 0.5 * sigma, 2.0, tau) *
                    sobolev_seminorm(state.W, s + 0.5 * sigma);
        double nn = physical_factor(d, s, 2.0, tau) *
                    sobolev_seminorm(state.N, s);
        return std::sqrt(wn * wn + 4.0 * nn * nn);
    }
    double wn = physical_factor(d, s, 2.0, tau) * sobolev_seminorm(state.W, s);
    double nn = physical_factor(d, s, 2.0, tau) * sobolev_seminorm(state.N, s);
    return std::sqrt(wn * wn + nn * nn);
}

double weighted_density_norm(const State& state, double ell, double p,
                             double sigma) {
    int d = state.grid().dim;
    double t = t_of_tau(state.tau);
    double physical = physical_factor(d, ell, p, state.tau) *
                      rescaled_norm(state.N, ell, p);
    return std::pow(1.0 + t, ell + 0.5 * sigma - static_cast<double>(d) / p - 1.0) *
           physical;
}

double weighted_velocity_norm(const State& state, double ell, double p) {
    int d = state.grid().dim;
    double t = t_of_tau(state.tau);
    double physical = physical_factor(d, ell, p, state.tau) *
                      rescaled_norm(state.W, ell, p);
    return std::pow(1.0 + t, ell - static_cast<double>(d) / p - 1.0) * physical;
}

double weighted_density_norm_tilde(const State& state, double ell, double p) {
    int d = state.grid().dim;
    double t = t_of_tau(state.tau);
    double physical = physical_factor(d, ell, p, state.tau) *
                      rescaled_norm(state.N, ell, p);
    return std::pow(1.0 + t, ell - static_cast<double>(d) / p - 1.0) * physical;
}

double compute_Z(const State& state, double s, double sigma,
                 SystemKind system) {
    if (!(s > 0.0)) throw config_error("compute_Z: regularity s must be > 0");
    if (system == SystemKind::pressureless) {
        double n2 = weighted_density_norm(state, 0.0, 2.0, sigma);
        double w2 = weighted_velocity_norm(state, 0.0, 2.0);
        double ns = weighted_density_norm(state, s, 2.0, sigma);
        double ws = weighted_velocity_norm(state, s + 0.5 * sigma, 2.0);
        return n2 + w2 + std::sqrt(ws * ws + 4.0 * ns * ns);
    }
    double n2 = weighted_density_norm_tilde(state, 0.0, 2.0);
    double w2 = weighted_velocity_norm(state, 0.0, 2.0);
    double ns = weighted_density_norm_tilde(state, s, 2.0);
    double ws = weighted_velocity_norm(state, s, 2.0);
    return std::sqrt(n2 * n2 + w2 * w2 + ns * ns + ws * ws);
}

namespace {

// quadrature of N_clamped^exponent * q over the rescaled box; q >= 0
double weighted_quadrature(const ScalarField& n, double exponent,
                           const std::vector<double>& q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        double nc = std::max(n[i], 0.0);
        if (exponent < 0.0 && nc == 0.0)
            throw numeric_error(
                "density functional: nonpositive density with negative power");
        acc += std::pow(nc, exponent) * q[i];
    }
    return acc * n.grid.cell_volume();
}

}  // namespace

double compute_W(const State& state, double s, double sigma,
                 double gamma_tilde) {
    if (!(gamma_tilde > 0.0))
        throw config_error("compute_W: gamma_tilde must be positive");
    double exponent = 1.0 / gamma_tilde - 2.0;
    ScalarField clamped = state.N;
    for (auto& v : clamped.v) v = std::max(v, 0.0);
    ScalarField lam = fractional_laplacian(clamped, s - 0.5 * sigma);
    std::vector<double> q(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) q[i] = lam[i] * lam[i];
    double integral = weighted_quadrature(clamped, exponent, q);
    return std::exp((sigma - 2.0) * state.tau) /
           (gamma_tilde * gamma_tilde) * integral;
}

double compute_Wk(const State& state, double s, double sigma,
                  double gamma_tilde, int k) {
    if (!(gamma_tilde > 0.0))
        throw config_error("compute_Wk: gamma_tilde must be positive");
    int kmax = k0_index(sigma, s);
    if (k < 1 || k > kmax)
        throw config_error("compute_Wk: k out of range [1, k0]");
    double exponent = k * (1.0 / gamma_tilde - 2.0);
    ScalarField clamped = state.N;
    for (auto& v : clamped.v) v = std::max(v, 0.0);
    std::vector<double> q(state.grid().size(), 0.0);
    for (int a = 0; a < state.grid().dim; ++a) {
        ScalarField lam = fractional_laplacian(state.W[a], s - 0.5 * k * sigma);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += lam[i] * lam[i];
    }
    double integral = weighted_quadrature(clamped, exponent, q);
    return std::exp((k * sigma - 2.0) * state.tau) /
           std::pow(gamma_tilde, 2.0 * k) * integral;
}

int k0_index(double sigma, double s) {
    if (!(sigma > 0.0) || !(s > 2.0))
        throw config_error("k0_index requires sigma > 0 and s > 2");
    double lower = 2.0 * (1.0 - sigma) / sigma;   // exclusive
    double upper = 2.0 * (s - 2.0) / sigma;       // inclusive
    int k = std::max(1, static_cast<int>(std::floor(lower)) + 1);
    if (static_cast<double>(k) <= lower) ++k;     // guard the exact-integer edge
    if (static_cast<double>(k) > upper)
        throw config_error("k0_index: no admissible iteration count");
    return k;
}

double aggregate_decay_exponent(int dim, double sigma) {
    return 1.0 + std::min(1.0, 0.5 * (dim - sigma));
}

void NormSeries::validate() const {
    // key: (quantity, ell, p); track last tau and whether a marker was seen
    std::map<std::tuple<std::string, double, double>,
             std::pair<double, bool>> last;
    for (const NormRow& r : rows) {
        if (!std::isfinite(r.tau) || !std::isfinite(r.t))
            throw numeric_error("norm series: non-finite time column");
        auto key = std::make_tuple(r.quantity, r.ell, r.p);
        auto it = last.find(key);
        if (it != last.end()) {
            if (it->second.second)
                throw numeric_error(
                    "norm series: rows after a blowup marker for " + r.quantity);
            if (!(r.tau > it->second.first))
                throw numeric_error(
                    "norm series: tau not strictly increasing for " + r.quantity);
        }
        bool finite = std::isfinite(r.rescaled) && std::isfinite(r.physical);
        last[key] = {r.tau, !finite};
    }
}

ResidualSeries residual_ratio_series(const std::vector<double>& tau,
                                     const std::vector<double>& z, int dim,
                                     double sigma) {
    if (tau.size() != z.size())
        throw config_error("residual series: mismatched lengths");
    if (tau.size() < 3)
        throw config_error("residual series: need at least three samples");
    double cds = aggregate_decay_exponent(dim, sigma);
    ResidualSeries out;
    for (std::size_t i = 1; i + 1 < tau.size(); ++i) {
        double h1 = tau[i] - tau[i - 1];
        double h2 = tau[i + 1] - tau[i];
        if (!(h1 > 0.0) || !(h2 > 0.0))
            throw config_error("residual series: tau must increase");
        // second-order centered difference on a possibly nonuniform grid
        double dzdtau = (h1 * h1 * z[i + 1] + (h2 * h2 - h1 * h1) * z[i] -
                         h2 * h2 * z[i - 1]) /
                        (h1 * h2 * (h1 + h2));
        double t = t_of_tau(tau[i]);
        double dzdt = std::exp(-tau[i]) * dzdtau;
        double numer = dzdt + cds * z[i] / (1.0 + t);
        double denom = z[i] * z[i] + z[i] / ((1.0 + t) * (1.0 + t));
        out.t.push_back(t);
        out.ratio.push_back(denom > 0.0 ? numer / denom : 0.0);
    }
    return out;
}

double envelope_value(double t, double c0, double cds, double z0) {
    return 2.0 * std::exp(c0 * t / (1.0 + t)) * std::pow(1.0 + t, -cds) * z0;
}

EnvelopeFit fit_envelope(const std::vector<double>& t,
                         const std::vector<double>& z, int dim, double sigma,
                         double fit_fraction) {
    if (t.size() != z.size() || t.size() < 3)
        throw config_error("envelope fit: need matched series, >= 3 samples");
    if (!(fit_fraction > 0.0 && fit_fraction <= 1.0))
        throw config_error("envelope fit: fit_fraction in (0, 1]");
    double cds = aggregate_decay_exponent(dim, sigma);
    double z0 = z.front();
    EnvelopeFit fit;
    if (!(z0 > 0.0)) {
        bool all_zero = std::all_of(z.begin(), z.end(),
                                    [](double v) { return v == 0.0; });
        fit.dominated = all_zero;
        return fit;
    }
    std::size_t window =
        std::max<std::size_t>(2, static_cast<std::size_t>(
                                     std::ceil(fit_fraction * t.size())));
    window = std::min(window, t.size());
    for (std::size_t i = 1; i < window; ++i) {
        if (!(t[i] > 0.0)) continue;
        double need = (1.0 + t[i]) / t[i] *
                      std::log(z[i] * std::pow(1.0 + t[i], cds) / (2.0 * z0));
        fit.c0 = std::max(fit.c0, need);
    }
    fit.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        double env = envelope_value(t[i], fit.c0, cds, z0);
        if (env > 0.0) fit.max_excess = std::max(fit.max_excess, z[i] / env - 1.0);
    }
    fit.dominated = fit.max_excess <= 1e-9;
    return fit;
}

}  // namespace rieszlab
