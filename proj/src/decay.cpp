//==============================================================================
// decay.cpp
// Exponent tables, least-squares rate fits, and the decay report.
//==============================================================================
#include "rieszlab/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "rieszlab/errors.hpp"

namespace rieszlab {

namespace {

double min3(double a, double b, double c) {
    return std::min(a, std::min(b, c));
}

bool is_near_integer(double x) {
    return std::abs(x - std::llround(x)) <= 1e-9;
}

// shared hypothesis checks for the pressured theory; s = 0 skips the
// s-dependent conditions
void check_pressured(int lambda, int dim, double sigma, double gamma,
                     double s) {
    if (!(gamma > 1.0))
        throw config_error("pressured theory needs an adiabatic index > 1");
    if (s > 0.0 && !is_near_integer(2.0 / (gamma - 1.0)) &&
        !(s < 2.0 / (gamma - 1.0) + sigma - 0.5))
        throw config_error(
            "pressured theory with non-integer 2/(gamma-1) needs "
            "s < 2/(gamma-1) + sigma - 1/2");
    if (sigma >= 1.0) {
        // sub-Manev range: both force signs, but only in dimension >= 2
        if (dim < 2)
            throw config_error(
                "sub-Manev interaction (sigma >= 1) needs dimension >= 2");
    } else if (lambda == -1) {
        // repulsive super-Manev range
        if (!(gamma <= 2.0))
            throw config_error("repulsive super-Manev theory needs gamma <= 2");
        if (dim <= 2 && !(gamma < 1.0 + 2.0 * (dim - sigma) / (dim + sigma)))
            throw config_error(
                "repulsive super-Manev theory in dimension <= 2 needs "
                "gamma < 1 + 2(d-sigma)/(d+sigma)");
    } else {
        // attractive super-Manev range
        if (!(gamma <= 2.0 - sigma / dim))
            throw config_error(
                "attractive super-Manev theory needs gamma <= 2 - sigma/d");
        if (dim >= 3 && !(gamma < 1.0 + 2.0 / (sigma + 2.0)))
            throw config_error(
                "attractive super-Manev theory in dimension >= 3 needs "
                "gamma < 1 + 2/(sigma+2)");
    }
}

// decay rate (the min{...} block) of the admissible pressured theorem
double pressured_rate(int lambda, int dim, double sigma, double gamma) {
    double dg = 0.5 * dim * (gamma - 1.0);
    if (sigma >= 1.0) return std::min(1.0, dg);
    if (lambda == -1) return min3(1.0, dg, 0.5 * (dim - sigma));
    return std::min(1.0, dg);
}

// smallest admissible p for the interpolated L^p rates
double pressured_min_p(int lambda, int dim, double sigma, double gamma) {
    double p = std::max(static_cast<double>(dim), 2.0 / (gamma - 1.0));
    if (sigma < 1.0 && lambda == -1)
        p = std::max(p, 2.0 * dim / (dim - sigma));
    return p;
}

struct LinearFit {
    double slope = 0.0;
    double r2 = 0.0;
};

LinearFit least_squares(const std::vector<double>& x,
                        const std::vector<double>& y) {
    std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw config_error("rate fit: degenerate abscissa");
    LinearFit f;
    f.slope = sxy / sxx;
    double ss_res = syy - f.slope * sxy;   // residual sum of squares
    f.r2 = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return f;
}

// trailing window of the abscissa range; returns the first included index
std::size_t window_start(const std::vector<double>& x, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw config_error("rate fit: window fraction must lie in (0, 1]");
    double cut = x.back() - fraction * (x.back() - x.front());
    std::size_t i = 0;
    while (i < x.size() && x[i] < cut) ++i;
    return i;
}

FitResult fit_log_linear(const std::vector<double>& abscissa,
                         const std::vector<double>& value,
                         double window_fraction, bool negate) {
    if (abscissa.size() != value.size())
        throw config_error("rate fit: mismatched series lengths");
    if (abscissa.size() < 2) throw config_error("rate fit: too few samples");
    std::size_t start = window_start(abscissa, window_fraction);
    if (abscissa.size() - start < 8)
        throw config_error("rate fit: fewer than 8 samples in the window");
    std::vector<double> xs, ys;
    for (std::size_t i = start; i < abscissa.size(); ++i) {
        if (!(value[i] > 0.0))
            throw numeric_error(
                "rate fit: nonpositive value in window (blowup or underflow)");
        xs.push_back(abscissa[i]);
        ys.push_back(std::log(value[i]));
    }
    LinearFit lf = least_squares(xs, ys);
    FitResult out;
    out.rate = negate ? -lf.slope : lf.slope;
    out.r2 = lf.r2;
    return out;
}

}  // namespace

Exponents theorem_exponent(SystemKind system, int lambda, int dim,
                           double sigma, double gamma, double ell,
                           char quantity, double p, double s) {
    if (quantity != 'n' && quantity != 'w')
        throw config_error("theorem_exponent: quantity must be 'n' or 'w'");
    if (dim < 1 || dim > kMaxDim)
        throw config_error("theorem_exponent: unsupported dimension");
    if (!(ell >= 0.0)) throw config_error("theorem_exponent: ell must be >= 0");
    if (!(p >= 2.0)) throw config_error("theorem_exponent: p must be >= 2");
    if (p != 2.0 && ell != 0.0)
        throw config_error(
            "theorem_exponent: L^p rates are only available at ell = 0");

    double d = dim;
    Exponents out;
    if (system == SystemKind::pressureless) {
        if (lambda != -1)
            throw config_error(
                "pressureless theory covers the repulsive sign only");
        if (!(sigma > 0.0 && sigma < std::min(d, 2.0)))
            throw config_error(
                "pressureless theory needs sigma in (0, min(d, 2))");
        double r = std::min(1.0, 0.5 * (d - sigma));
        if (p == 2.0) {
            if (s > 0.0) {
                double cap = quantity == 'n' ? s : s + 0.5 * sigma;
                if (ell > cap + 1e-12)
                    throw config_error(
                        "theorem_exponent: ell beyond the covered range");
            }
            out.physical = quantity == 'n' ? 0.5 * d - ell - 0.5 * sigma - r
                                           : 0.5 * d - ell - r;
        } else if (quantity == 'w') {
            out.physical = d / p - r;
        } else {
            if (!(s > 0.0))
                throw config_error(
                    "theorem_exponent: density L^p rate needs the regularity "
                    "index s");
            double gap = 0.5 * d - d / p;
            out.physical =
                -gap - std::min(gap / s * (1.0 - 0.5 * (d - sigma)), 0.0);
        }
    } else {
        if (lambda != -1 && lambda != 1)
            throw config_error("theorem_exponent: lambda must be +1 or -1");
        if (!(sigma > 0.0 && sigma < 2.0))
            throw config_error("pressured theory needs sigma in (0, 2)");
        check_pressured(lambda, dim, sigma, gamma, s);
        double r = pressured_rate(lambda, dim, sigma, gamma);
        if (p == 2.0) {
            if (s > 0.0 && ell > s + 1e-12)
                throw config_error(
                    "theorem_exponent: ell beyond the covered range");
            out.physical = 0.5 * d - ell - r;
        } else {
            double pmin = pressured_min_p(lambda, dim, sigma, gamma);
            if (p < pmin - 1e-12)
                throw config_error(
                    "theorem_exponent: no L^p prediction below the "
                    "interpolation threshold");
            out.physical = d / p - r;
        }
    }
    out.rescaled = (d / p - ell) - out.physical;
    return out;
}

double improved_density_exponent(int dim, double sigma, double ell, double s) {
    if (!(s > 0.0))
        throw config_error("improved exponent needs the regularity index s");
    if (!(ell >= 0.0 && ell <= s + 1e-12))
        throw config_error("improved exponent needs ell in [0, s]");
    if (!(sigma > 0.0 && sigma < std::min<double>(dim, 2.0)))
        throw config_error("pressureless theory needs sigma in (0, min(d, 2))");
    double d = dim;
    return -ell - std::min(ell / s * (1.0 - 0.5 * (d - sigma)), 0.0);
}

double admissibility_margin(SystemKind system, int lambda, int dim,
                            double sigma, double gamma) {
    double d = dim;
    double margin = std::numeric_limits<double>::infinity();
    auto upd = [&](double m) { margin = std::min(margin, m); };
    if (system == SystemKind::pressureless) {
        upd(sigma);
        upd(std::min(d, 2.0) - sigma);
        return margin;
    }
    upd(gamma - 1.0);
    if (sigma >= 1.0) {
        upd(sigma - 1.0);
        upd(2.0 - sigma);
    } else if (lambda == -1) {
        upd(sigma);
        upd(1.0 - sigma);
        upd(2.0 - gamma);
        if (dim <= 2) upd(1.0 + 2.0 * (d - sigma) / (d + sigma) - gamma);
    } else {
        upd(sigma);
        upd(1.0 - sigma);
        upd(2.0 - sigma / d - gamma);
        if (dim >= 3) upd(1.0 + 2.0 / (sigma + 2.0) - gamma);
    }
    return margin;
}

FitResult fit_exponent(const std::vector<double>& tau,
                       const std::vector<double>& value,
                       double window_fraction) {
    return fit_log_linear(tau, value, window_fraction, /*negate=*/true);
}

FitResult fit_physical_exponent(const std::vector<double>& t,
                                const std::vector<double>& value,
                                double window_fraction) {
    std::vector<double> logt(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > -1.0))
            throw config_error("physical fit: t must exceed -1");
        logt[i] = std::log1p(t[i]);
    }
    return fit_log_linear(logt, value, window_fraction, /*negate=*/false);
}

DecayReport decay_report(const NormSeries& series, const ModelParams& params,
                         int dim, double s, double tol, double window_fraction,
                         double mass_tol) {
    series.validate();
    DecayReport report;
    report.window_fraction = window_fraction;
    {
        std::ostringstream os;
        os << to_string(params.system) << " lambda=" << params.lambda
           << " d=" << dim << " sigma=" << params.sigma;
        if (params.system == SystemKind::pressured)
            os << " gamma=" << params.gamma;
        os << " s=" << s << " tol=" << tol << " window=" << window_fraction;
        report.config_echo = os.str();
    }

    // collect the per-(quantity, ell, p) time series, dropping marker rows
    std::map<std::tuple<std::string, double, double>,
             std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const NormRow& r : series.rows) {
        if (r.quantity != "n" && r.quantity != "w") continue;
        if (!std::isfinite(r.rescaled)) continue;
        auto& g = groups[{r.quantity, r.ell, r.p}];
        g.first.push_back(r.tau);
        g.second.push_back(r.rescaled);
    }

    double margin = admissibility_margin(params.system, params.lambda, dim,
                                         params.sigma, params.gamma);
    bool any_fail = false;
    for (auto& [key, data] : groups) {
        DecayRow row;
        row.quantity = std::get<0>(key);
        row.ell = std::get<1>(key);
        row.p = std::get<2>(key);
        row.near_boundary = margin < 0.05;

        bool mass_row = params.system == SystemKind::pressureless &&
                        row.quantity == "n" && row.ell == 0.0 && row.p == 2.0;
        try {
            row.predicted = theorem_exponent(params.system, params.lambda, dim,
                                             params.sigma, params.gamma,
                                             row.ell, row.quantity[0], row.p, s);
            row.has_prediction = true;
        } catch (const config_error& e) {
            row.verdict = std::string("no prediction: ") + e.what();
        }
        if (mass_row) {
            // exact conservation: physical exponent 0, rescaled rate d/2
            row.exact_law = true;
            row.predicted.physical = 0.0;
            row.predicted.rescaled = 0.5 * dim;
            row.has_prediction = true;
        }

        bool all_zero = std::all_of(data.second.begin(), data.second.end(),
                                    [](double v) { return v == 0.0; });
        if (all_zero) {
            row.verdict = "degenerate: zero signal";
        } else {
            try {
                FitResult fit =
                    fit_exponent(data.first, data.second, window_fraction);
                row.fitted_ok = true;
                row.fitted_rate = fit.rate;
                row.r2 = fit.r2;
            } catch (const std::exception& e) {
                row.verdict = std::string("fit error: ") + e.what();
            }
        }
        if (row.fitted_ok && row.has_prediction) {
            row.sharpness = row.fitted_rate - row.predicted.rescaled;
            bool pass = row.exact_law
                            ? std::abs(row.fitted_rate - row.predicted.rescaled) <=
                                  mass_tol
                            : row.fitted_rate >= row.predicted.rescaled - tol;
            row.verdict = pass ? "pass" : "fail";
            if (!pass) any_fail = true;
        }
        report.rows.push_back(std::move(row));
    }
    report.all_pass = !any_fail;
    return report;
}

}  // namespace rieszlab
