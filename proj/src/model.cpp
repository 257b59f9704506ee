#include "rieszlab/model.hpp"

#include <cmath>
#include <random>

#include "rieszlab/spectral.hpp"

namespace rieszlab {

std::string to_string(SystemKind k) {
    return k == SystemKind::pressureless ? "pressureless" : "pressured";
}

SystemKind system_from_string(const std::string& s) {
    if (s == "pressureless") return SystemKind::pressureless;
    if (s == "pressured") return SystemKind::pressured;
    throw config_error("unknown system: " + s);
}

void ModelParams::validate(int dim) const {
    if (lambda != -1 && lambda != 1)
        throw config_error("lambda must be -1 or +1");
    double cap = std::min(double(dim), 2.0);
    if (!(sigma > 0.0) || !(sigma < cap))
        throw config_error("sigma must lie in (0, min(dim, 2))");
    if (system == SystemKind::pressureless && lambda != -1)
        throw config_error("the pressureless closure is repulsive (lambda = -1)");
    if (system == SystemKind::pressured && !(gamma > 1.0))
        throw config_error("gamma must exceed 1 for the pressured closure");
}

void InitialDataSpec::validate() const {
    if (!(support_fraction > 0.0) || !(support_fraction <= 1.0))
        throw config_error("support_fraction must lie in (0, 1]");
    if (!(plateau_fraction >= 0.0) || !(plateau_fraction < 1.0))
        throw config_error("plateau_fraction must lie in [0, 1)");
    if (noise_band < 1) throw config_error("noise_band must be >= 1");
    if (!std::isfinite(n_amplitude) || !std::isfinite(w_amplitude) ||
        !std::isfinite(noise_amplitude))
        throw config_error("initial amplitudes must be finite");
}

double plateau_profile(double q, double q0) {
    auto ramp = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
    if (q <= q0) return 1.0;
    if (q >= 1.0) return 0.0;
    double u = (1.0 - q) / (1.0 - q0);   // 1 at the plateau edge, 0 at support edge
    double a = ramp(u), b = ramp(1.0 - u);
    return a / (a + b);
}

State make_initial_state(const Grid& g, const InitialDataSpec& spec) {
    spec.validate();
    State st(g);
    const int d = g.dim;
    const double c = 0.5 * g.L;               // bump center: box midpoint
    const double R = 0.5 * spec.support_fraction * g.L;

    std::vector<double> mask(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.point(i);
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += (x[a] - c) * (x[a] - c);
        mask[i] = plateau_profile(std::sqrt(r2) / R, spec.plateau_fraction);
    }

    for (std::size_t i = 0; i < g.size(); ++i)
        st.N[i] = spec.n_amplitude * mask[i];

    if (spec.w_amplitude != 0.0) {
        for (int a = 0; a < d; ++a)
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto x = g.point(i);
                st.W[a][i] = spec.w_amplitude * mask[i] *
                             std::sin(g.dk() * (x[a] - c));
            }
    }

    if (spec.noise_amplitude != 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
        int B = spec.noise_band;
        std::vector<std::array<int, kMaxDim>> modes;
        // fixed lexicographic mode order keeps the draw deterministic
        int lo = d > 1 ? -B : 1;
        for (int m0 = lo > 0 ? 1 : lo; m0 <= B; ++m0)
            for (int m1 = d > 1 ? -B : 0; m1 <= (d > 1 ? B : 0); ++m1)
                for (int m2 = d > 2 ? -B : 0; m2 <= (d > 2 ? B : 0); ++m2) {
                    if (m0 == 0 && m1 == 0 && m2 == 0) continue;
                    modes.push_back({m0, m1, m2});
                }
        std::vector<double> noise(g.size(), 0.0);
        double scale = spec.noise_amplitude / double(modes.size());
        for (const auto& m : modes) {
            double amp = uni(rng) * scale, phase = ph(rng);
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto x = g.point(i);
                double arg = phase;
                for (int a = 0; a < d; ++a) arg += g.dk() * m[std::size_t(a)] * x[a];
                noise[i] += amp * std::cos(arg);
            }
        }
        for (std::size_t i = 0; i < g.size(); ++i) st.N[i] += mask[i] * noise[i];
    }

    st.N = dealias(st.N);
    for (int a = 0; a < d; ++a) st.W[a] = dealias(st.W[a]);
    st.tau = 0.0;
    return st;
}

}  // namespace rieszlab
