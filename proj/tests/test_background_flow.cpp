#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rieszlab/background_flow.hpp"

using namespace rieszlab;

TEST_CASE("identity flow transports exactly") {
    InitialFlow flow = InitialFlow::identity(2);
    double x[2] = {1.3, -0.4};
    for (double t : {0.0, 1.0, 7.5}) {
        BurgersPoint p = burgers_evaluate(flow, x, t);
        for (int a = 0; a < 2; ++a) {
            CHECK(p.alpha[std::size_t(a)] ==
                  doctest::Approx(x[a] / (1.0 + t)).epsilon(1e-14));
            CHECK(p.v[std::size_t(a)] ==
                  doctest::Approx(x[a] / (1.0 + t)).epsilon(1e-14));
        }
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                double want = r == c ? 1.0 / (1.0 + t) : 0.0;
                CHECK(std::abs(p.grad_v[std::size_t(r) * kMaxDim + c] - want) <=
                      1e-14);
            }
    }
    FlowSample s = compute_K(flow, 16, 3.0);
    for (const auto& e : s.K.entry) CHECK(max_abs(e) <= 1e-12);
}

TEST_CASE("1-D sine flow matches the implicit-differentiation closed form") {
    const double eps = 0.2;
    InitialFlow flow = InitialFlow::sine(1, eps);
    for (double t : {0.0, 0.5, 2.0, 10.0, 100.0}) {
        Grid g(1, 64, (1.0 + t) * flow.period);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double x = g.point(i)[0];
            BurgersPoint p = burgers_evaluate(flow, &x, t);
            double a = p.alpha[0];
            // inversion identity
            CHECK(std::abs(a + t * (a + eps * std::sin(a)) - x) <= 1e-11);
            double gp = 1.0 + eps * std::cos(a);
            double want_grad = gp / (1.0 + t * gp);
            CHECK(std::abs(p.grad_v[0] - want_grad) <= 1e-10);
            double K = (1.0 + t) * (1.0 + t) * (want_grad - 1.0 / (1.0 + t));
            double closed =
                (1.0 + t) * eps * std::cos(a) / (1.0 + t * (1.0 + eps * std::cos(a)));
            CHECK(std::abs(K - closed) <= 1e-8);
        }
        FlowSample s = compute_K(flow, 64, t);
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            double a = 0.0;
            {
                double x = s.grid.point(i)[0];
                a = burgers_evaluate(flow, &x, t).alpha[0];
            }
            double closed =
                (1.0 + t) * eps * std::cos(a) / (1.0 + t * (1.0 + eps * std::cos(a)));
            CHECK(std::abs(s.K.at(0, 0)[i] - closed) <= 1e-8);
        }
    }
}

TEST_CASE("grad_v matches centered finite differences of v") {
    InitialFlow flow = InitialFlow::sine(2, 0.15);
    double t = 1.7;
    double x0[2] = {1.1, 2.6};
    BurgersPoint p = burgers_evaluate(flow, x0, t);
    double prev_err = 0.0;
    for (double h : {1e-2, 5e-3}) {
        double err = 0.0;
        for (int c = 0; c < 2; ++c) {
            double xp[2] = {x0[0], x0[1]}, xm[2] = {x0[0], x0[1]};
            xp[c] += h;
            xm[c] -= h;
            BurgersPoint pp = burgers_evaluate(flow, xp, t);
            BurgersPoint pm = burgers_evaluate(flow, xm, t);
            for (int r = 0; r < 2; ++r) {
                double fd =
                    (pp.v[std::size_t(r)] - pm.v[std::size_t(r)]) / (2.0 * h);
                err = std::max(
                    err, std::abs(fd - p.grad_v[std::size_t(r) * kMaxDim + c]));
            }
        }
        CHECK(err <= 2.0 * h * h);
        if (prev_err > 0.0) CHECK(err <= prev_err / 3.0);
        prev_err = err;
    }
}

TEST_CASE("spectral distance closed forms") {
    {
        double A[4] = {2.0, 0.0, 0.0, -3.0};
        CHECK(spectral_distance(A, 2) == doctest::Approx(0.0).epsilon(1e-12));
    }
    {
        double A[4] = {0.0, -1.0, 1.0, 0.0};   // eigenvalues +-i
        CHECK(spectral_distance(A, 2) == doctest::Approx(1.0).epsilon(1e-12));
    }
    {
        double A[4] = {1.0, -2.0, 2.0, 1.0};   // 1 +- 2i
        CHECK(spectral_distance(A, 2) ==
              doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    }
    {
        double A[1] = {0.8};
        CHECK(spectral_distance(A, 1) == doctest::Approx(0.8).epsilon(1e-12));
    }
}

TEST_CASE("dispersive condition margins") {
    CHECK(check_dispersive_condition(InitialFlow::sine(1, 0.2), 256) ==
          doctest::Approx(0.8).epsilon(1e-10));
    CHECK(check_dispersive_condition(InitialFlow::identity(3), 4) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // eigenvalue set touches the negative real axis: margin collapses to 0
    CHECK(check_dispersive_condition(InitialFlow::sine(1, 1.5), 256) <= 1e-12);
    CHECK(check_dispersive_condition(InitialFlow::sine(2, 0.2), 64) ==
          doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("fold point raises a characteristic error") {
    InitialFlow flow = InitialFlow::sine(1, 1.5);
    double x = 3.0 * M_PI;   // at t=2 the Jacobian 1+t(1+eps cos a) vanishes
    CHECK_THROWS_AS(burgers_evaluate(flow, &x, 2.0), blowup_error);
}

TEST_CASE("second derivatives match the closed form pointwise") {
    const double eps = 0.2;
    InitialFlow flow = InitialFlow::sine(1, eps);
    for (double t : {0.0, 1.0, 10.0}) {
        FlowSample s = compute_K(flow, 256, t);
        Spectrum sp = forward(s.psi[0]);
        ScalarField hess = second_derivative(sp, 0, 0);
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            double x = s.grid.point(i)[0];
            double a = burgers_evaluate(flow, &x, t).alpha[0];
            double gp = 1.0 + eps * std::cos(a);
            double want = -eps * std::sin(a) / std::pow(1.0 + t * gp, 3.0);
            CHECK(std::abs(hess[i] - want) <= 1e-8);
        }
    }
}

TEST_CASE("normalized K and Hessian series stay bounded for an admissible flow") {
    InitialFlow flow = InitialFlow::sine(1, 0.2);
    BackgroundReport rep =
        verify_background(flow, 256, {0.0, 1.0, 10.0, 100.0}, {0.0, 1.0, 2.0});
    CHECK(rep.all_bounded);
    for (const auto& v : rep.verdicts) CHECK(v.growth < 0.05);
    CHECK(rep.max_grad_residual <= 1e-13);
    CHECK(rep.max_div_residual <= 1e-10);
    // closed-form large-time limits: sup|K| -> eps/(1-eps) from below
    const auto& supK = rep.series.at("sup_K");
    CHECK(supK.back() <= 0.2 / 0.8 + 1e-6);
    CHECK(supK.back() >= 0.2);
}

TEST_CASE("identity flow yields all-zero normalized series") {
    BackgroundReport rep = verify_background(InitialFlow::identity(1), 64,
                                             {0.0, 1.0, 10.0, 100.0}, {0.0, 1.0});
    CHECK(rep.all_bounded);
    for (const auto& [name, s] : rep.series)
        for (double v : s) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("verification input validation") {
    InitialFlow flow = InitialFlow::sine(1, 0.1);
    CHECK_THROWS_AS(verify_background(flow, 64, {0.0, 1.0, 2.0}, {0.0}),
                    config_error);
    CHECK_THROWS_AS(verify_background(flow, 64, {0.0, 2.0, 1.0, 3.0}, {0.0}),
                    config_error);
}
