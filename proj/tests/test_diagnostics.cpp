#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rieszlab/diagnostics.hpp"

using namespace rieszlab;

namespace {

State random_state(const Grid& g, unsigned seed, double amp, double floor_n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    State s(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.N[i] = floor_n + amp * u(rng);
        for (int a = 0; a < g.dim; ++a) s.W[a][i] = amp * u(rng);
    }
    s.N = dealias(s.N);
    for (int a = 0; a < g.dim; ++a) s.W[a] = dealias(s.W[a]);
    // keep the density positive after dealiasing so powers are well-defined
    for (auto& v : s.N.v) v = std::abs(v) + 0.1;
    return s;
}

ScalarField roll(const ScalarField& f, const int* shift) {
    ScalarField out(f.grid);
    int d = f.grid.dim, n = f.grid.n;
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::size_t rem = i, src = 0;
        for (int a = d - 1; a >= 0; --a) {
            int ia = static_cast<int>(rem % n);
            rem /= n;
            int ja = (ia + shift[a]) % n;
            std::size_t stride = 1;
            for (int b = a + 1; b < d; ++b) stride *= n;
            src += static_cast<std::size_t>(ja) * stride;
        }
        out[i] = f[src];
    }
    return out;
}

}  // namespace

TEST_CASE("zero state maps to zero for every diagnostic") {
    Grid g(1, 64, 2.0 * M_PI);
    State s(g);
    s.tau = 0.3;
    CHECK(mass(s) == 0.0);
    CHECK(compute_X(s, 3.1, 0.5, SystemKind::pressureless) == 0.0);
    CHECK(compute_X(s, 3.1, 0.5, SystemKind::pressured) == 0.0);
    CHECK(compute_Z(s, 3.1, 0.5, SystemKind::pressureless) == 0.0);
    CHECK(compute_Z(s, 3.1, 0.5, SystemKind::pressured) == 0.0);
    // gamma = 1.5 -> positive density exponent, so 0^positive = 0
    CHECK(compute_W(s, 3.1, 0.5, 0.25) == 0.0);
    CHECK(compute_Wk(s, 3.1, 0.5, 0.25, 1) == 0.0);
}

TEST_CASE("mass of a constant density") {
    Grid g(2, 16, 3.0);
    State s(g);
    for (auto& v : s.N.v) v = 0.7;
    s.tau = 0.4;
    double want = 0.7 * std::exp(0.4) * std::sqrt(g.volume());
    CHECK(mass(s) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("single-mode energy aggregate closed form") {
    Grid g(1, 64, 2.0 * M_PI);
    double a = 0.37, s_reg = 3.1;
    int k = 3;
    for (double tau : {0.0, 0.8}) {
        State st(g);
        st.tau = tau;
        for (std::size_t i = 0; i < g.size(); ++i)
            st.N[i] = a * std::sin(k * g.point(i)[0]);
        double want = 2.0 * std::exp((0.5 - s_reg) * tau) *
                      std::pow(k, s_reg) * a * std::sqrt(g.volume() / 2.0);
        double got = compute_X(st, s_reg, 0.5, SystemKind::pressureless);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
    // pressured with N = 0 reduces to the plain velocity seminorm
    State st(g);
    st.tau = 0.5;
    for (std::size_t i = 0; i < g.size(); ++i)
        st.W[0][i] = a * std::cos(2.0 * g.point(i)[0]);
    double want = std::exp((0.5 - s_reg) * 0.5) *
                  std::pow(2.0, s_reg) * a * std::sqrt(g.volume() / 2.0);
    CHECK(compute_X(st, s_reg, 0.5, SystemKind::pressured) ==
          doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("weighted aggregate at t = 0 equals the raw-norm assembly") {
    Grid g(1, 64, 2.0 * M_PI);
    State s = random_state(g, 7, 0.05, 0.0);
    double sr = 3.1, sigma = 0.5;
    double n0 = sobolev_seminorm(s.N, 0.0);
    double w0 = sobolev_seminorm(s.W, 0.0);
    double ns = sobolev_seminorm(s.N, sr);
    double ws = sobolev_seminorm(s.W, sr + 0.5 * sigma);
    double want = n0 + w0 + std::sqrt(ws * ws + 4.0 * ns * ns);
    CHECK(compute_Z(s, sr, sigma, SystemKind::pressureless) ==
          doctest::Approx(want).epsilon(1e-12));

    double nst = sobolev_seminorm(s.N, sr);
    double wst = sobolev_seminorm(s.W, sr);
    double want_t = std::sqrt(n0 * n0 + w0 * w0 + nst * nst + wst * wst);
    CHECK(compute_Z(s, sr, sigma, SystemKind::pressured) ==
          doctest::Approx(want_t).epsilon(1e-12));
}

TEST_CASE("density functional: gamma = 2 reduction and tilted invariances") {
    Grid g(1, 64, 2.0 * M_PI);
    State s = random_state(g, 11, 0.05, 0.2);
    s.tau = 0.6;
    double sr = 3.1, sigma = 0.5;
    // gamma = 2 -> gamma_tilde = 1/2, density power drops out
    double sem = sobolev_seminorm(s.N, sr - 0.5 * sigma);
    double want = std::exp((sigma - 2.0) * s.tau) * 4.0 * sem * sem;
    CHECK(compute_W(s, sr, sigma, 0.5) == doctest::Approx(want).epsilon(1e-12));
    // same reduction through the physical-weight route
    double t = std::expm1(s.tau);
    double phys = physical_factor(1, sr - 0.5 * sigma, 2.0, s.tau) * sem;
    double want_phys =
        std::pow(1.0 + t, 2.0 * (sr - 0.5 - 1.0)) * 4.0 * phys * phys;
    CHECK(compute_W(s, sr, sigma, 0.5) ==
          doctest::Approx(want_phys).epsilon(1e-10));
    // constant density has zero seminorm content
    State c(g);
    for (auto& v : c.N.v) v = 0.8;
    CHECK(compute_W(c, sr, sigma, 0.5) <= 1e-24);
}

TEST_CASE("iterated velocity functional: gamma = 2, k = 1 reduction") {
    Grid g(2, 16, 2.0 * M_PI);
    State s = random_state(g, 13, 0.05, 0.2);
    s.tau = 0.4;
    double sr = 3.1, sigma = 0.5;
    double acc = 0.0;
    for (int a = 0; a < 2; ++a) {
        double sem = sobolev_seminorm(s.W[a], sr - 0.5 * sigma);
        acc += sem * sem;
    }
    double want = std::exp((sigma - 2.0) * s.tau) * 4.0 * acc;
    CHECK(compute_Wk(s, sr, sigma, 0.5, 1) ==
          doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS(compute_Wk(s, sr, sigma, 0.5, 0), config_error);
    CHECK_THROWS_AS(compute_Wk(s, sr, sigma, 0.5, 99), config_error);
}

TEST_CASE("iteration count and envelope exponent") {
    CHECK(k0_index(0.5, 3.1) == 3);     // smallest integer above 2(1-σ)/σ = 2
    CHECK(k0_index(1.2, 3.0) == 1);     // negative lower bound clamps to 1
    CHECK_THROWS_AS(k0_index(0.5, 2.4), config_error);   // upper bound 1.6 < 3
    CHECK_THROWS_AS(k0_index(1.9, 2.05), config_error);  // upper bound < 1
    CHECK(aggregate_decay_exponent(1, 0.5) == doctest::Approx(1.25));
    CHECK(aggregate_decay_exponent(3, 0.5) == doctest::Approx(2.0));
    CHECK(aggregate_decay_exponent(2, 1.2) == doctest::Approx(1.4));
}

TEST_CASE("density / velocity functionals are translation invariant") {
    Grid g(2, 16, 2.0 * M_PI);
    State s = random_state(g, 17, 0.05, 0.2);
    s.tau = 0.3;
    int shift[2] = {5, 11};
    State moved(g);
    moved.tau = s.tau;
    moved.N = roll(s.N, shift);
    for (int a = 0; a < 2; ++a) moved.W[a] = roll(s.W[a], shift);
    double w1 = compute_W(s, 3.1, 0.5, 1.0 / 3.0);
    double w2 = compute_W(moved, 3.1, 0.5, 1.0 / 3.0);
    CHECK(std::abs(w1 - w2) <= 1e-12 * std::max(1.0, std::abs(w1)));
    double k1 = compute_Wk(s, 3.1, 0.5, 1.0 / 3.0, 2);
    double k2 = compute_Wk(moved, 3.1, 0.5, 1.0 / 3.0, 2);
    CHECK(std::abs(k1 - k2) <= 1e-12 * std::max(1.0, std::abs(k1)));
}

TEST_CASE("diagnostics are nonnegative on random states") {
    Grid g(1, 128, 2.0 * M_PI);
    for (unsigned seed : {1u, 2u, 3u}) {
        State s = random_state(g, seed, 0.3, 0.0);
        s.tau = 0.2 * seed;
        CHECK(mass(s) >= 0.0);
        CHECK(compute_X(s, 3.1, 0.5, SystemKind::pressureless) >= 0.0);
        CHECK(compute_Z(s, 3.1, 0.5, SystemKind::pressured) >= 0.0);
        CHECK(compute_W(s, 3.1, 0.5, 0.25) >= 0.0);
        CHECK(compute_Wk(s, 3.1, 0.5, 0.25, 3) >= 0.0);
    }
}

TEST_CASE("negative density with a negative power raises a domain error") {
    Grid g(1, 64, 2.0 * M_PI);
    State s(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        s.N[i] = 0.1 * std::sin(g.point(i)[0]);
    // gamma_tilde = 1 -> exponent 1/gt - 2 = -1 on a clamped-to-zero region
    CHECK_THROWS_AS(compute_W(s, 3.1, 0.5, 1.0), numeric_error);
}

TEST_CASE("residual ratio series matches an analytic trajectory") {
    int dim = 1;
    double sigma = 0.5;
    double cds = aggregate_decay_exponent(dim, sigma);   // 1.25
    // Z(t) = (1+t)^{-cds} (2 - 1/(1+t)) gives residual numerator (1+t)^{-cds-2}
    std::vector<double> tau, z;
    for (int i = 0; i <= 200; ++i) {
        double tv = 0.02 * i;
        double t = std::expm1(tv);
        tau.push_back(tv);
        z.push_back(std::pow(1.0 + t, -cds) * (2.0 - 1.0 / (1.0 + t)));
    }
    ResidualSeries r = residual_ratio_series(tau, z, dim, sigma);
    REQUIRE(r.t.size() == tau.size() - 2);
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        double t = r.t[i];
        double zi = std::pow(1.0 + t, -cds) * (2.0 - 1.0 / (1.0 + t));
        double numer = std::pow(1.0 + t, -cds - 2.0);
        double denom = zi * zi + zi / ((1.0 + t) * (1.0 + t));
        CHECK(r.ratio[i] == doctest::Approx(numer / denom).epsilon(2e-3));
    }
}

TEST_CASE("envelope fit dominates clean decay and flags late growth") {
    int dim = 1;
    double sigma = 0.5;
    double cds = aggregate_decay_exponent(dim, sigma);
    std::vector<double> t, z, zslow;
    for (int i = 0; i <= 100; ++i) {
        double tv = std::expm1(0.05 * i);
        t.push_back(tv);
        z.push_back(0.3 * std::pow(1.0 + tv, -cds));
        zslow.push_back(0.3 * std::pow(1.0 + tv, -cds + 0.4));
    }
    EnvelopeFit good = fit_envelope(t, z, dim, sigma);
    CHECK(good.dominated);
    CHECK(good.c0 == doctest::Approx(0.0));
    EnvelopeFit bad = fit_envelope(t, zslow, dim, sigma);
    CHECK_FALSE(bad.dominated);
    CHECK(bad.max_excess > 0.1);
}

TEST_CASE("norm series validation") {
    NormSeries ok;
    ok.rows.push_back({0.0, 0.0, "n", 0.0, 2.0, 1.0, 1.0});
    ok.rows.push_back({0.0, 0.0, "w", 0.0, 2.0, 2.0, 2.0});
    ok.rows.push_back({0.5, std::expm1(0.5), "n", 0.0, 2.0, 0.9, 1.1});
    ok.rows.push_back({0.5, std::expm1(0.5), "w", 0.0, 2.0, 1.9, 2.1});
    CHECK_NOTHROW(ok.validate());

    NormSeries marker = ok;
    double nan = std::nan("");
    marker.rows.push_back({1.0, std::expm1(1.0), "n", 0.0, 2.0, nan, nan});
    CHECK_NOTHROW(marker.validate());
    marker.rows.push_back({1.5, std::expm1(1.5), "n", 0.0, 2.0, 1.0, 1.0});
    CHECK_THROWS_AS(marker.validate(), numeric_error);

    NormSeries bad = ok;
    bad.rows.push_back({0.5, std::expm1(0.5), "n", 0.0, 2.0, 0.8, 1.0});
    CHECK_THROWS_AS(bad.validate(), numeric_error);
}

TEST_CASE("weighted norm helpers expose the advertised powers") {
    Grid g(1, 64, 2.0 * M_PI);
    State s = random_state(g, 23, 0.05, 0.0);
    s.tau = 0.9;
    double t = std::expm1(s.tau);
    double sigma = 0.5;
    double ell = 1.0, p = 2.0;
    double physical = physical_factor(1, ell, p, s.tau) *
                      rescaled_norm(s.N, ell, p);
    double want = std::pow(1.0 + t, ell + 0.5 * sigma - 1.0 / p - 1.0) * physical;
    CHECK(weighted_density_norm(s, ell, p, sigma) ==
          doctest::Approx(want).epsilon(1e-12));
    // sup norm: d/p = 0 in the factor
    double winf = physical_factor(1, 0.0, lp_infinity, s.tau) *
                  rescaled_norm(s.W, 0.0, lp_infinity);
    CHECK(physical_factor(1, 0.0, lp_infinity, s.tau) == 1.0);
    CHECK(weighted_velocity_norm(s, 0.0, lp_infinity) ==
          doctest::Approx(std::pow(1.0 + t, -1.0) * winf).epsilon(1e-12));
}
