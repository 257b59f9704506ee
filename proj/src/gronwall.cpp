//==============================================================================
// gronwall.cpp
// Worst-case ODE integration and threshold search for the decay lemma.
//==============================================================================
#include "rieszlab/gronwall.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "rieszlab/errors.hpp"

namespace rieszlab {

namespace {

constexpr double kBlowupCap = 1e8;

struct Rhs {
    const GronwallParams& p;

    void operator()(const std::array<double, 1>& y,
                    std::array<double, 1>& dydt, double t) const {
        double Y = y[0];
        if (!std::isfinite(Y) || Y > kBlowupCap)
            throw blowup_error("gronwall trajectory escaped", t);
        double opt = 1.0 + t;
        double v = -p.a * Y / opt + p.c_star * (Y * Y + Y / (opt * opt));
        if (p.c_p == 1) {
            double Yc = std::max(Y, 0.0);   // adaptive probes may undershoot 0
            for (std::size_t i = 0; i < p.b.size(); ++i)
                v += p.c_star * std::pow(Yc, p.b[i] + 1.0) /
                     std::pow(opt, 1.0 - p.c[i]);
        }
        dydt[0] = v;
    }
};

}  // namespace

void GronwallParams::validate() const {
    if (!(a > 1.0))
        throw config_error("gronwall hypothesis a > 1 violated");
    if (!(c_star >= 0.0) || !std::isfinite(c_star))
        throw config_error("gronwall nonlinearity scale must be >= 0");
    if (b.size() != c.size())
        throw config_error("gronwall powers and offsets must pair up");
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(b[i] > 0.0))
            throw config_error("gronwall hypothesis b_i > 0 violated");
        if (!(c[i] < a * b[i]))
            throw config_error("gronwall hypothesis c_i < a*b_i violated");
    }
    if (c_p != 0 && c_p != 1)
        throw config_error("gronwall pressure switch must be 0 or 1");
}

GronwallSeries integrate_inequality(const GronwallParams& p, double y0,
                                    double t_end, std::size_t samples) {
    p.validate();
    if (!(y0 >= 0.0)) throw config_error("gronwall data must be >= 0");
    if (!(t_end > 0.0)) throw config_error("gronwall horizon must be positive");
    if (samples < 2) throw config_error("gronwall output needs >= 2 samples");

    std::vector<double> times(samples);
    double span = std::log1p(t_end);
    for (std::size_t k = 0; k < samples; ++k)
        times[k] = std::expm1(span * static_cast<double>(k) /
                              static_cast<double>(samples - 1));
    times.front() = 0.0;
    times.back() = t_end;

    GronwallSeries out;
    namespace ode = boost::numeric::odeint;
    // eighth-order embedded pair: per-step relative error 1e-13 keeps the
    // drift accumulated over the decade-spanning horizon below 1e-9, which
    // the closed-form cross-checks rely on.  The tiny absolute floor only
    // matters for the identically-zero trajectory.
    auto stepper = ode::make_controlled<
        ode::runge_kutta_fehlberg78<std::array<double, 1>>>(1e-25, 1e-13);
    std::array<double, 1> y{y0};
    try {
        ode::integrate_times(stepper, Rhs{p}, y, times.begin(), times.end(),
                             1e-6,
                             [&out](const std::array<double, 1>& s, double t) {
                                 out.t.push_back(t);
                                 out.y.push_back(s[0]);
                             });
    } catch (const blowup_error&) {
        out.blowup = true;
        out.blowup_time =
            out.t.empty() ? 0.0 : times[std::min(out.t.size(), samples - 1)];
    }
    return out;
}

double envelope(const GronwallParams& p, double y0, double t) {
    return 2.0 * std::exp(p.c_star * t / (1.0 + t)) * std::pow(1.0 + t, -p.a) *
           y0;
}

bool verify_lemma(const GronwallParams& p, double y0, double t_end,
                  double slack) {
    GronwallSeries s = integrate_inequality(p, y0, t_end);
    if (s.blowup) return false;
    for (std::size_t i = 0; i < s.t.size(); ++i)
        if (s.y[i] > envelope(p, y0, s.t[i]) + slack) return false;
    return true;
}

ThresholdResult find_threshold_M(const GronwallParams& p, double t_end,
                                 double resolution) {
    p.validate();
    if (!(resolution > 0.0 && resolution < 1.0))
        throw config_error("gronwall threshold resolution must be in (0, 1)");
    constexpr double kScaleCap = 1e9;
    double lo = 0.0, hi = 1e-3;
    if (verify_lemma(p, hi, t_end)) {
        while (verify_lemma(p, 2.0 * hi, t_end)) {
            hi *= 2.0;
            if (hi > kScaleCap) return {hi, true};
        }
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 80 && hi - lo > resolution * hi; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (verify_lemma(p, mid, t_end))
            lo = mid;
        else
            hi = mid;
    }
    return {lo, false};
}

double bootstrap_margin(const GronwallParams& p, double z0) {
    p.validate();
    if (!(z0 >= 0.0)) throw config_error("gronwall margin needs z0 >= 0");
    double m = 4.0 * p.c_star * std::exp(p.c_star) / (p.a - 1.0) * z0;
    if (p.c_p == 1)
        for (std::size_t i = 0; i < p.b.size(); ++i)
            m += std::pow(2.0, p.b[i] + 1.0) * p.c_star *
                 std::exp(p.c_star * p.b[i]) / (p.a * p.b[i] - p.c[i]) *
                 std::pow(z0, p.b[i]);
    return m;
}

double sufficient_threshold(const GronwallParams& p) {
    p.validate();
    if (p.c_star == 0.0) return std::numeric_limits<double>::infinity();
    // the margin is continuous, strictly increasing, 0 at 0, unbounded
    double hi = 1.0;
    while (bootstrap_margin(p, hi) < 1.0) hi *= 2.0;
    double lo = 0.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
        double mid = 0.5 * (lo + hi);
        (bootstrap_margin(p, mid) < 1.0 ? lo : hi) = mid;
    }
    return lo;
}

double asymptotic_slope(const GronwallSeries& s) {
    if (s.blowup) throw numeric_error("gronwall slope: trajectory blew up");
    if (s.t.size() < 8) throw config_error("gronwall slope: too few samples");
    double cut = s.t.back() / 10.0;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] < cut) continue;
        if (!(s.y[i] > 0.0))
            throw numeric_error("gronwall slope: nonpositive trajectory");
        xs.push_back(std::log1p(s.t[i]));
        ys.push_back(std::log(s.y[i]));
    }
    if (xs.size() < 4) throw config_error("gronwall slope: window too small");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
}

}  // namespace rieszlab
