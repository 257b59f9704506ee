#include "rieszlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

namespace rieszlab {
namespace {

// One r2c/c2r plan pair per (dim, n), planned once with FFTW_UNALIGNED so the
// new-array execute interface accepts ordinary vector storage. Plan creation
// is serialized (FFTW requirement); execution is thread-safe.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

class PlanCache {
  public:
    static PlanPair& get(const Grid& g) {
        static PlanCache cache;
        std::lock_guard<std::mutex> lock(cache.mu_);
        auto key = std::make_pair(g.dim, g.n);
        auto it = cache.plans_.find(key);
        if (it != cache.plans_.end()) return it->second;

        std::vector<int> dims(std::size_t(g.dim), g.n);
        std::vector<double> real(g.size());
        std::vector<std::complex<double>> cplx(half_spectrum_size(g));
        PlanPair p;
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        p.r2c = fftw_plan_dft_r2c(g.dim, dims.data(), real.data(),
                                  reinterpret_cast<fftw_complex*>(cplx.data()),
                                  flags);
        p.c2r = fftw_plan_dft_c2r(g.dim, dims.data(),
                                  reinterpret_cast<fftw_complex*>(cplx.data()),
                                  real.data(), flags);
        if (!p.r2c || !p.c2r) throw numeric_error("fftw plan creation failed");
        return cache.plans_.emplace(key, p).first->second;
    }

  private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [k, p] : plans_) {
            fftw_destroy_plan(p.r2c);
            fftw_destroy_plan(p.c2r);
        }
    }
    std::mutex mu_;
    std::map<std::pair<int, int>, PlanPair> plans_;
};

double mode_k2(const Grid& g, const int* m) {
    double dk = g.dk(), k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        double ka = dk * m[a];
        k2 += ka * ka;
    }
    return k2;
}

}  // namespace

Spectrum::Spectrum(const Grid& g) : grid(g), c(half_spectrum_size(g)) {}

std::size_t half_spectrum_size(const Grid& g) {
    std::size_t s = std::size_t(g.n) / 2 + 1;
    for (int a = 0; a < g.dim - 1; ++a) s *= std::size_t(g.n);
    return s;
}

void for_each_mode(const Grid& g,
                   const std::function<void(std::size_t, const int*)>& fn) {
    const int n = g.n, nh = g.n / 2 + 1;
    int m[kMaxDim] = {0, 0, 0};
    std::size_t idx = 0;
    if (g.dim == 1) {
        for (int i = 0; i < nh; ++i) {
            m[0] = i;
            fn(idx++, m);
        }
        return;
    }
    if (g.dim == 2) {
        for (int i0 = 0; i0 < n; ++i0) {
            m[0] = i0 <= n / 2 - 1 ? i0 : i0 - n;
            for (int i1 = 0; i1 < nh; ++i1) {
                m[1] = i1;
                fn(idx++, m);
            }
        }
        return;
    }
    for (int i0 = 0; i0 < n; ++i0) {
        m[0] = i0 <= n / 2 - 1 ? i0 : i0 - n;
        for (int i1 = 0; i1 < n; ++i1) {
            m[1] = i1 <= n / 2 - 1 ? i1 : i1 - n;
            for (int i2 = 0; i2 < nh; ++i2) {
                m[2] = i2;
                fn(idx++, m);
            }
        }
    }
}

int mode_weight(const Grid& g, const int* m) {
    int last = m[g.dim - 1];
    return (last == 0 || last == g.n / 2) ? 1 : 2;
}

Spectrum forward(const ScalarField& f) {
    if (!all_finite(f)) throw blowup_error("non-finite field entering transform");
    PlanPair& p = PlanCache::get(f.grid);
    Spectrum s(f.grid);
    std::vector<double> in(f.v);   // r2c may scribble on its input
    fftw_execute_dft_r2c(p.r2c, in.data(),
                         reinterpret_cast<fftw_complex*>(s.c.data()));
    const double inv = 1.0 / double(f.grid.size());
    for (auto& z : s.c) z *= inv;
    return s;
}

ScalarField inverse(const Spectrum& s) {
    PlanPair& p = PlanCache::get(s.grid);
    std::vector<std::complex<double>> scratch(s.c);   // c2r destroys its input
    ScalarField f(s.grid);
    fftw_execute_dft_c2r(p.c2r,
                         reinterpret_cast<fftw_complex*>(scratch.data()),
                         f.v.data());
    return f;
}

void fractional_laplacian_inplace(Spectrum& s, double power) {
    if (power == 0.0) return;
    for_each_mode(s.grid, [&](std::size_t i, const int* m) {
        double k2 = mode_k2(s.grid, m);
        s.c[i] *= (k2 == 0.0) ? 0.0 : std::pow(k2, 0.5 * power);
    });
}

ScalarField fractional_laplacian(const ScalarField& f, double s) {
    Spectrum sp = forward(f);
    fractional_laplacian_inplace(sp, s);
    return inverse(sp);
}

namespace {

// gradient-type symbol i*k_a applied to `base`, Nyquist plane of axis a zeroed
Spectrum derivative_spectrum(const Spectrum& base, int axis, double extra_power) {
    Spectrum out(base.grid);
    const double dk = base.grid.dk();
    const int nyq = -base.grid.n / 2;
    for_each_mode(base.grid, [&](std::size_t i, const int* m) {
        int ma = m[axis];
        bool on_nyquist = (ma == nyq) || (ma == base.grid.n / 2);
        double k2 = mode_k2(base.grid, m);
        if (on_nyquist || k2 == 0.0) {
            out.c[i] = 0.0;
            return;
        }
        double mag = dk * ma;
        if (extra_power != 0.0) mag *= std::pow(k2, 0.5 * extra_power);
        out.c[i] = std::complex<double>(0.0, mag) * base.c[i];
    });
    return out;
}

}  // namespace

VectorField riesz_force(const Spectrum& s, double sigma) {
    VectorField out(s.grid);
    for (int a = 0; a < s.grid.dim; ++a)
        out[a] = inverse(derivative_spectrum(s, a, -sigma));
    return out;
}

VectorField riesz_force(const ScalarField& f, double sigma) {
    Spectrum s = forward(f);
    return riesz_force(s, sigma);
}

VectorField gradient(const Spectrum& s) {
    VectorField out(s.grid);
    for (int a = 0; a < s.grid.dim; ++a)
        out[a] = inverse(derivative_spectrum(s, a, 0.0));
    return out;
}

VectorField gradient(const ScalarField& f) { return gradient(forward(f)); }

ScalarField divergence(const VectorField& w) {
    Spectrum acc(w.grid);
    for (int a = 0; a < w.grid.dim; ++a) {
        Spectrum d = derivative_spectrum(forward(w[a]), a, 0.0);
        for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += d.c[i];
    }
    return inverse(acc);
}

ScalarField second_derivative(const Spectrum& s, int a, int b) {
    Spectrum out(s.grid);
    const double dk = s.grid.dk();
    const int n = s.grid.n;
    for_each_mode(s.grid, [&](std::size_t i, const int* m) {
        bool nyq = false;
        for (int ax : {a, b})
            if (m[ax] == -n / 2 || m[ax] == n / 2) nyq = true;
        out.c[i] = nyq ? 0.0 : -(dk * m[a]) * (dk * m[b]) * s.c[i];
    });
    return inverse(out);
}

bool in_dealias_ball(const Grid& g, const int* m) {
    for (int a = 0; a < g.dim; ++a)
        if (3 * std::abs(m[a]) > g.n) return false;
    return true;
}

void dealias_inplace(Spectrum& s) {
    for_each_mode(s.grid, [&](std::size_t i, const int* m) {
        if (!in_dealias_ball(s.grid, m)) s.c[i] = 0.0;
    });
}

ScalarField dealias(const ScalarField& f) {
    Spectrum s = forward(f);
    dealias_inplace(s);
    return inverse(s);
}

double sobolev_seminorm(const ScalarField& f, double ell) {
    Spectrum s = forward(f);
    double acc = 0.0;
    for_each_mode(s.grid, [&](std::size_t i, const int* m) {
        double k2 = mode_k2(s.grid, m);
        if (k2 == 0.0) {
            if (ell == 0.0) acc += std::norm(s.c[i]);
            return;
        }
        acc += mode_weight(s.grid, m) * std::pow(k2, ell) * std::norm(s.c[i]);
    });
    return std::sqrt(acc * f.grid.volume());
}

double sobolev_seminorm(const VectorField& w, double ell) {
    double acc = 0.0;
    for (int a = 0; a < w.dim(); ++a) {
        double s = sobolev_seminorm(w[a], ell);
        acc += s * s;
    }
    return std::sqrt(acc);
}

double lp_norm(const ScalarField& f, double p) {
    if (p == lp_infinity) return max_abs(f);
    if (!(p >= 1.0)) throw config_error("lp_norm requires p >= 1");
    double acc = 0.0;
    for (double t : f.v) acc += std::pow(std::abs(t), p);
    return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

double lp_norm(const VectorField& w, double p) {
    if (p == lp_infinity) return max_abs(w);
    if (!(p >= 1.0)) throw config_error("lp_norm requires p >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < w.grid.size(); ++i) {
        double s = 0.0;
        for (int a = 0; a < w.dim(); ++a) s += w[a][i] * w[a][i];
        acc += std::pow(s, 0.5 * p);
    }
    return std::pow(acc * w.grid.cell_volume(), 1.0 / p);
}

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

}  // namespace rieszlab
