//==============================================================================
// inequality.cpp
// Ratio evaluations for the commutator / interpolation / composition bounds
// plus the deterministic random-field ensembles they are exercised on.
//==============================================================================
#include "rieszlab/inequality.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "rieszlab/errors.hpp"
#include "rieszlab/spectral.hpp"

namespace rieszlab {

namespace {

void require_same_grid(const ScalarField& f, const ScalarField& g) {
    if (f.grid != g.grid)
        throw config_error("inequality inputs must share one grid");
}

// pairwise reduction: on the power-of-two sample counts every partial sum
// of a constant field doubles exactly, so its mean is bit-exact and the
// structural-zero cases below stay bit-exact too
double pairwise_sum(const double* p, std::size_t n) {
    if (n == 1) return p[0];
    if (n == 2) return p[0] + p[1];
    std::size_t h = n / 2;
    return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

double mean_of(const ScalarField& f) {
    return pairwise_sum(f.v.data(), f.size()) / double(f.size());
}

// multiplier part of f: the mean is removed because constants commute
// exactly with every multiplier, which keeps degenerate cases bit-exact
ScalarField fluctuation(const ScalarField& f) {
    ScalarField out = f;
    double m = mean_of(f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= m;
    return out;
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
    return dealias(pointwise_product(a, b));
}

// ratio with the vanishing-LHS short circuit shared by every bound
double guarded_ratio(double lhs, double rhs) {
    if (lhs == 0.0) return 0.0;
    if (rhs == 0.0)
        throw config_error("degenerate inequality input: majorant vanishes");
    return lhs / rhs;
}

double holder_inverse(double p) { return p == lp_infinity ? 0.0 : 1.0 / p; }

void require_exponent(double p, const char* name) {
    if (!(p > 1.0))
        throw config_error(std::string(name) + " must lie in (1, inf]");
}

}  // namespace

ScalarField commutator(const ScalarField& f, double s, const ScalarField& g) {
    require_same_grid(f, g);
    ScalarField fp = fluctuation(f);
    ScalarField lam_g = fractional_laplacian(g, s);
    ScalarField left = dealiased_product(fp, lam_g);
    ScalarField right = fractional_laplacian(dealiased_product(fp, g), s);
    for (std::size_t i = 0; i < left.size(); ++i) left[i] -= right[i];
    return left;
}

double ratio_kato_ponce(const ScalarField& f, const ScalarField& g, double s,
                        double r, double p1, double q1, double p2, double q2) {
    require_same_grid(f, g);
    if (!(s > 0.0)) throw config_error("product rule order s must be positive");
    if (!(r > 1.0) || r == lp_infinity)
        throw config_error("product norm exponent r must lie in (1, inf)");
    require_exponent(p1, "p1");
    require_exponent(q1, "q1");
    require_exponent(p2, "p2");
    require_exponent(q2, "q2");
    double inv_r = 1.0 / r;
    if (std::abs(inv_r - holder_inverse(p1) - holder_inverse(q1)) > 1e-9 ||
        std::abs(inv_r - holder_inverse(p2) - holder_inverse(q2)) > 1e-9)
        throw config_error("exponents must satisfy 1/r = 1/p1+1/q1 = 1/p2+1/q2");

    double lhs = lp_norm(fractional_laplacian(dealiased_product(f, g), s), r);
    double rhs = lp_norm(fractional_laplacian(f, s), p1) * lp_norm(g, q1) +
                 lp_norm(f, p2) * lp_norm(fractional_laplacian(g, s), q2);
    return guarded_ratio(lhs, rhs);
}

double ratio_tech1(const ScalarField& f, const ScalarField& g, double s) {
    require_same_grid(f, g);
    if (!(s > 0.0)) throw config_error("commutator order s must be positive");
    ScalarField fp = fluctuation(f);
    double lhs = lp_norm(commutator(f, s, g), 2.0);
    double rhs = sobolev_seminorm(fp, s) * lp_norm(g, lp_infinity) +
                 lp_norm(gradient(fp), lp_infinity) * sobolev_seminorm(g, s - 1.0);
    return guarded_ratio(lhs, rhs);
}

double ratio_tech2(const ScalarField& f, const ScalarField& g, double s) {
    require_same_grid(f, g);
    if (!(s > 1.0))
        throw config_error("corrected commutator needs order s > 1");
    ScalarField fp = fluctuation(f);
    const Grid& grid = f.grid;

    ScalarField lhs_field = commutator(f, s, g);
    VectorField grad_f = gradient(fp);
    VectorField grad_g = gradient(g);
    for (int a = 0; a < grid.dim; ++a) {
        ScalarField term =
            dealiased_product(grad_f[a], fractional_laplacian(grad_g[a], s - 2.0));
        for (std::size_t i = 0; i < lhs_field.size(); ++i)
            lhs_field[i] -= s * term[i];
    }
    double lhs = lp_norm(lhs_field, 2.0);

    // sup of the pointwise Frobenius norm of the Hessian
    Spectrum sf = forward(fp);
    std::vector<double> hess2(grid.size(), 0.0);
    for (int a = 0; a < grid.dim; ++a)
        for (int b = 0; b < grid.dim; ++b) {
            ScalarField h = second_derivative(sf, a, b);
            for (std::size_t i = 0; i < h.size(); ++i) hess2[i] += h[i] * h[i];
        }
    double hess_sup = 0.0;
    for (double v : hess2) hess_sup = std::max(hess_sup, v);
    hess_sup = std::sqrt(hess_sup);

    double rhs = sobolev_seminorm(fp, s) * lp_norm(g, lp_infinity) +
                 hess_sup * sobolev_seminorm(g, s - 2.0);
    return guarded_ratio(lhs, rhs);
}

double ratio_tech5(const ScalarField& f, const ScalarField& g, double sigma) {
    require_same_grid(f, g);
    if (!(sigma > 0.0 && sigma < 1.0))
        throw config_error("force-kernel commutator needs sigma in (0, 1)");
    ScalarField fp = fluctuation(f);
    const Grid& grid = f.grid;
    const int d = grid.dim;

    VectorField inner = riesz_force(dealiased_product(fp, g), 0.5 * sigma);
    VectorField outer = riesz_force(g, 0.5 * sigma);
    double acc = 0.0;
    for (int a = 0; a < d; ++a) {
        ScalarField comp = dealiased_product(fp, outer[a]);
        for (std::size_t i = 0; i < comp.size(); ++i)
            comp[i] = inner[a][i] - comp[i];
        double nrm = lp_norm(comp, 2.0);
        acc += nrm * nrm;
    }
    double lhs = std::sqrt(acc);

    double g_half = sobolev_seminorm(g, 0.5 * sigma);
    double rhs =
        lp_norm(fractional_laplacian(fp, 1.0 - sigma), lp_infinity) * g_half +
        sobolev_seminorm(fp, 0.5 * d + 1.0 - sigma) * g_half;
    return guarded_ratio(lhs, rhs);
}

double ratio_moser(const ScalarField& f, const ScalarField& g, double s) {
    require_same_grid(f, g);
    if (!(s > 0.0 && s < 2.0))
        throw config_error("Moser commutator needs order s in (0, 2)");
    ScalarField fp = fluctuation(f);
    double lhs = lp_norm(commutator(f, s, g), 2.0);
    // majorant-only product: evaluated raw under the quadrature norm
    double tail = lp_norm(pointwise_product(g, fractional_laplacian(fp, s)), 2.0);
    double rhs;
    if (s >= 1.0) {
        double g_low = sobolev_seminorm(g, s - 1.0);
        rhs = lp_norm(fractional_laplacian(fp, 1.0), lp_infinity) * g_low +
              lp_norm(gradient(fp), lp_infinity) * g_low + tail;
    } else {
        // small-order branch, representative split s1 = s/2
        rhs = lp_norm(fractional_laplacian(fp, 0.5 * s), lp_infinity) *
                  sobolev_seminorm(g, 0.5 * s) +
              tail;
    }
    return guarded_ratio(lhs, rhs);
}

double ratio_linfty_interp(const ScalarField& f, double s, double eps) {
    if (!(s > 0.0)) throw config_error("interpolation order s must be positive");
    double half_d = 0.5 * f.grid.dim;
    if (!(eps > 0.0 && eps < half_d))
        throw config_error("interpolation offset eps must lie in (0, d/2)");
    ScalarField fp = fluctuation(f);
    double lhs = lp_norm(fractional_laplacian(fp, s), lp_infinity);
    double rhs = std::sqrt(sobolev_seminorm(fp, half_d + s + eps) *
                           sobolev_seminorm(fp, half_d + s - eps));
    return guarded_ratio(lhs, rhs);
}

double ratio_composition(const ScalarField& f, double alpha, double s) {
    if (!(alpha >= 1.0)) throw config_error("power alpha must be at least 1");
    if (!(s >= 0.0 && s < alpha + 0.5))
        throw config_error("composition order s must lie in [0, alpha + 1/2)");
    ScalarField power(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i)
        power[i] = std::pow(std::abs(f[i]), alpha);
    double lhs = sobolev_seminorm(dealias(power), s);
    double rhs = std::pow(lp_norm(f, lp_infinity), alpha - 1.0) *
                 sobolev_seminorm(f, s);
    return guarded_ratio(lhs, rhs);
}

//------------------------------------------------------------------------------
// ensembles
//------------------------------------------------------------------------------

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double hashed_phase(std::uint64_t seed, int member, const int* m, int dim) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ std::uint64_t(std::uint32_t(member)));
    for (int a = 0; a < dim; ++a)
        h = mix64(h ^ std::uint64_t(std::int64_t(m[a])));
    return 2.0 * M_PI * double(h >> 11) * 0x1.0p-53;
}

ScalarField ensemble_field(const Grid& g, std::uint64_t seed, int member,
                           double beta, int band) {
    Spectrum sp(g);
    double norm2 = 0.0;
    for_each_mode(g, [&](std::size_t i, const int* m) {
        bool zero = true, inside = true;
        for (int a = 0; a < g.dim; ++a) {
            if (m[a] != 0) zero = false;
            if (std::abs(m[a]) > band) inside = false;
        }
        if (zero || !inside) return;

        // On the self-conjugate last-axis planes both halves of a +-m pair
        // are stored, so hash a sign-canonical key and conjugate the flip
        // to keep the coefficient set Hermitian (d = 1 stores no such pair).
        int key[kMaxDim];
        bool flip = false;
        if (mode_weight(g, m) == 1 && g.dim > 1) {
            for (int a = 0; a < g.dim - 1; ++a)
                if (m[a] != 0) {
                    flip = m[a] < 0;
                    break;
                }
        }
        for (int a = 0; a < g.dim; ++a)
            key[a] = (flip && a < g.dim - 1) ? -m[a] : m[a];

        double k2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double ka = g.dk() * m[a];
            k2 += ka * ka;
        }
        double amp = std::pow(std::sqrt(k2), -beta);
        double phase = hashed_phase(seed, member, key, g.dim);
        if (flip) phase = -phase;
        sp.c[i] = std::polar(amp, phase);
        norm2 += mode_weight(g, m) * amp * amp;
    });
    double scale = 1.0 / std::sqrt(norm2 * g.volume());
    for (auto& c : sp.c) c *= scale;
    return inverse(sp);
}

int worker_count(int jobs) {
    int hw = int(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("RIESZ_LAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return std::min(hw, jobs);
}

}  // namespace

FieldEnsemble make_ensemble(const Grid& g, int count, std::uint64_t seed,
                            double beta, int band) {
    g.validate();
    if (count < 1) throw config_error("ensemble count must be at least 1");
    if (!(beta >= 2.0))
        throw config_error("ensemble decay exponent beta must be at least 2");
    if (band < 1 || 3 * band > g.n)
        throw config_error("ensemble band must fit the dealias ball");
    FieldEnsemble e;
    e.grid = g;
    e.count = count;
    e.seed = seed;
    e.beta = beta;
    e.band = band;
    e.fields.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i)
        e.fields.push_back(ensemble_field(g, seed, i, beta, band));
    return e;
}

const char* inequality_name(Inequality q) {
    switch (q) {
        case Inequality::kKatoPonce: return "kato_ponce";
        case Inequality::kTech1: return "tech1";
        case Inequality::kTech2: return "tech2";
        case Inequality::kTech5: return "tech5";
        case Inequality::kMoser: return "moser";
        case Inequality::kInterp: return "linfty_interp";
        case Inequality::kComposition: return "composition";
    }
    throw config_error("unknown inequality kind");
}

EnsembleReport run_ensemble(Inequality q, const Grid& g, int count,
                            std::uint64_t seed, double beta, int band) {
    FieldEnsemble fs = make_ensemble(g, count, seed, beta, band);
    bool pair = q == Inequality::kKatoPonce || q == Inequality::kTech1 ||
                q == Inequality::kTech2 || q == Inequality::kTech5 ||
                q == Inequality::kMoser;
    FieldEnsemble gs;
    if (pair)
        gs = make_ensemble(g, count, mix64(seed ^ 0x5bf03f3cull), beta, band);

    const double sigma = 0.5;   // representative force-kernel order
    const double s = 1.5;       // representative commutator order
    const int d = g.dim;
    auto evaluate = [&](int i) -> double {
        const ScalarField& f = fs.fields[std::size_t(i)];
        switch (q) {
            case Inequality::kKatoPonce:
                // mixed-norm pair from the force-kernel estimates:
                // p1 = 2d/sigma with its Hoelder dual, plus (inf, 2)
                return ratio_kato_ponce(f, gs.fields[std::size_t(i)], s, 2.0,
                                        2.0 * d / sigma, 2.0 * d / (d - sigma),
                                        lp_infinity, 2.0);
            case Inequality::kTech1:
                return ratio_tech1(f, gs.fields[std::size_t(i)], s);
            case Inequality::kTech2:
                return ratio_tech2(f, gs.fields[std::size_t(i)], s);
            case Inequality::kTech5:
                return ratio_tech5(f, gs.fields[std::size_t(i)], sigma);
            case Inequality::kMoser:
                return ratio_moser(f, gs.fields[std::size_t(i)], s);
            case Inequality::kInterp:
                return ratio_linfty_interp(f, 1.0, 0.25);
            case Inequality::kComposition: {
                double worst = 0.0;
                for (double alpha : {1.3, 2.0, 2.5})
                    worst = std::max(worst, ratio_composition(f, alpha, 1.2));
                return worst;
            }
        }
        throw config_error("unknown inequality kind");
    };

    EnsembleReport rep;
    rep.ratios.assign(std::size_t(count), 0.0);
    int workers = worker_count(count);
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto drain = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                rep.ratios[std::size_t(i)] = evaluate(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<double> sorted = rep.ratios;
    std::sort(sorted.begin(), sorted.end());
    rep.max_ratio = sorted.back();
    std::size_t idx =
        std::size_t(std::ceil(0.95 * count)) == 0
            ? 0
            : std::size_t(std::ceil(0.95 * count)) - 1;
    rep.p95 = sorted[std::min(idx, sorted.size() - 1)];
    return rep;
}

}  // namespace rieszlab
