#include "rieszlab/background_flow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rieszlab {

namespace {
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
}  // namespace

void InitialFlow::v0(const double* a, double* out) const {
    double p[kMaxDim] = {0, 0, 0};
    if (epsilon != 0.0) phi(a, p);
    for (int i = 0; i < dim; ++i) out[i] = a[i] + epsilon * p[i];
}

void InitialFlow::dv0(const double* a, double* out) const {
    double j[kMaxDim * kMaxDim] = {0};
    if (epsilon != 0.0) dphi(a, j);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            out[r * dim + c] = (r == c ? 1.0 : 0.0) + epsilon * j[r * dim + c];
}

InitialFlow InitialFlow::identity(int dim) {
    InitialFlow f;
    f.dim = dim;
    f.epsilon = 0.0;
    f.phi = [dim](const double*, double* out) {
        for (int i = 0; i < dim; ++i) out[i] = 0.0;
    };
    f.dphi = [dim](const double*, double* out) {
        for (int i = 0; i < dim * dim; ++i) out[i] = 0.0;
    };
    return f;
}

InitialFlow InitialFlow::sine(int dim, double epsilon) {
    InitialFlow f;
    f.dim = dim;
    f.epsilon = epsilon;
    // component i perturbs with the sine of the "next" coordinate so the
    // Jacobian picks up off-diagonal coupling in d >= 2
    f.phi = [dim](const double* a, double* out) {
        for (int i = 0; i < dim; ++i) out[i] = std::sin(a[(i + 1) % dim]);
    };
    f.dphi = [dim](const double* a, double* out) {
        for (int i = 0; i < dim * dim; ++i) out[i] = 0.0;
        for (int i = 0; i < dim; ++i)
            out[i * dim + (i + 1) % dim] = std::cos(a[(i + 1) % dim]);
    };
    if (dim == 1) {   // (i+1)%1 == 0: plain a + eps*sin(a)
        f.phi = [](const double* a, double* out) { out[0] = std::sin(a[0]); };
        f.dphi = [](const double* a, double* out) { out[0] = std::cos(a[0]); };
    }
    return f;
}

InitialFlow InitialFlow::preset(const std::string& name, int dim, double epsilon) {
    if (name == "identity") return identity(dim);
    if (name == "sine") return sine(dim, epsilon);
    throw config_error("unknown flow preset: " + name);
}

double spectral_distance(const double* A, int dim) {
    Mat m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = A[r * dim + c];
    Eigen::EigenSolver<Mat> es(m, false);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) {
        std::complex<double> z = es.eigenvalues()[i];
        double d = z.real() <= 0.0 ? std::abs(z.imag()) : std::abs(z);
        best = std::min(best, d);
    }
    return best;
}

double check_dispersive_condition(const InitialFlow& flow, int samples_per_axis) {
    if (samples_per_axis < 2) throw config_error("need >= 2 samples per axis");
    const int d = flow.dim;
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= std::size_t(samples_per_axis);
    double h = flow.period / samples_per_axis;
    double best = std::numeric_limits<double>::infinity();
    double x[kMaxDim], J[kMaxDim * kMaxDim];
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t r = idx;
        for (int a = d - 1; a >= 0; --a) {
            x[a] = double(r % std::size_t(samples_per_axis)) * h;
            r /= std::size_t(samples_per_axis);
        }
        flow.dv0(x, J);
        best = std::min(best, spectral_distance(J, d));
    }
    return best;
}

BurgersPoint burgers_evaluate(const InitialFlow& flow, const double* x, double t) {
    if (t < 0.0) throw config_error("burgers_evaluate requires t >= 0");
    const int d = flow.dim;
    const double tol = 1e-12;
    const int max_iters = 50;

    Vec alpha(d), xv(d);
    for (int i = 0; i < d; ++i) xv[i] = x[i];
    alpha = xv / (1.0 + t);

    auto residual = [&](const Vec& a, Vec& F) {
        double av[kMaxDim], vv[kMaxDim];
        for (int i = 0; i < d; ++i) av[i] = a[i];
        flow.v0(av, vv);
        for (int i = 0; i < d; ++i) F[i] = a[i] + t * vv[i] - x[i];
    };

    Vec F(d), Ft(d);
    residual(alpha, F);
    double fnorm = F.lpNorm<Eigen::Infinity>();
    int iter = 0;
    while (fnorm > tol) {
        if (++iter > max_iters)
            throw blowup_error("characteristic solve did not converge", t);
        double av[kMaxDim], Jm[kMaxDim * kMaxDim];
        for (int i = 0; i < d; ++i) av[i] = alpha[i];
        flow.dv0(av, Jm);
        Mat J(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                J(r, c) = (r == c ? 1.0 : 0.0) + t * Jm[r * d + c];
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible())
            throw blowup_error("characteristic map fold (singular Jacobian)", t);
        Vec step = lu.solve(-F);
        // halve the step while the residual fails to decrease
        double damp = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
            Vec trial = alpha + damp * step;
            residual(trial, Ft);
            double tn = Ft.lpNorm<Eigen::Infinity>();
            if (std::isfinite(tn) && tn < fnorm) {
                alpha = trial;
                F = Ft;
                fnorm = tn;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        if (!accepted)
            throw blowup_error("characteristic solve stalled", t);
    }

    BurgersPoint out;
    out.newton_iterations = iter;
    double av[kMaxDim], vv[kMaxDim], Jm[kMaxDim * kMaxDim];
    for (int i = 0; i < d; ++i) av[i] = alpha[i];
    flow.v0(av, vv);
    flow.dv0(av, Jm);
    Mat D(d, d), J(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            D(r, c) = Jm[r * d + c];
            J(r, c) = (r == c ? 1.0 : 0.0) + t * Jm[r * d + c];
        }
    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible())
        throw blowup_error("characteristic map fold (singular Jacobian)", t);
    Mat G = D * lu.inverse();   // Dv0(a) (I + t Dv0(a))^{-1}
    for (int i = 0; i < d; ++i) {
        out.alpha[std::size_t(i)] = alpha[i];
        out.v[std::size_t(i)] = vv[i];
    }
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            out.grad_v[std::size_t(r) * kMaxDim + c] = G(r, c);
    return out;
}

FlowSample compute_K(const InitialFlow& flow, int n, double t) {
    const int d = flow.dim;
    FlowSample s;
    s.t = t;
    s.grid = Grid(d, n, (1.0 + t) * flow.period);
    s.v = VectorField(s.grid);
    s.psi = VectorField(s.grid);
    s.grad_v = MatrixField(s.grid);
    s.K = MatrixField(s.grid);
    const double w = (1.0 + t) * (1.0 + t);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        auto x = s.grid.point(i);
        BurgersPoint p = burgers_evaluate(flow, x.data(), t);
        for (int a = 0; a < d; ++a) {
            s.v[a][i] = p.v[std::size_t(a)];
            s.psi[a][i] = p.v[std::size_t(a)] - x[std::size_t(a)] / (1.0 + t);
            for (int b = 0; b < d; ++b) {
                double g = p.grad_v[std::size_t(a) * kMaxDim + b];
                s.grad_v.at(a, b)[i] = g;
                s.K.at(a, b)[i] = w * (g - (a == b ? 1.0 / (1.0 + t) : 0.0));
            }
        }
    }
    return s;
}

BackgroundReport verify_background(const InitialFlow& flow, int n,
                                   const std::vector<double>& times,
                                   const std::vector<double>& ells,
                                   double growth_tol) {
    if (times.size() < 4)
        throw config_error("background verification needs >= 4 sample times");
    if (!(growth_tol > 0.0))
        throw config_error("growth tolerance must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]) || times[i - 1] < 0.0)
            throw config_error("times must be nonnegative and increasing");

    const int d = flow.dim;
    BackgroundReport rep;
    rep.times = times;
    rep.names.push_back("sup_K");
    for (double ell : ells) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "K_seminorm_l%g_scaled", ell);
        rep.names.push_back(buf);
    }
    rep.names.push_back("hess_v_scaled");
    for (const auto& name : rep.names) rep.series[name] = {};

    for (double t : times) {
        FlowSample s = compute_K(flow, n, t);

        double supK = 0.0;
        for (const auto& e : s.K.entry) supK = std::max(supK, max_abs(e));
        rep.series["sup_K"].push_back(supK);

        std::size_t li = 0;
        for (double ell : ells) {
            double acc = 0.0;
            for (const auto& e : s.K.entry) {
                double sn = sobolev_seminorm(e, ell);
                acc += sn * sn;
            }
            double norm = std::sqrt(acc) * std::pow(1.0 + t, ell - 0.5 * d);
            rep.series[rep.names[1 + li++]].push_back(norm);
        }

        // second derivatives of v from the periodic deviation part
        double hess = 0.0;
        {
            std::vector<ScalarField> parts;
            for (int a = 0; a < d; ++a) {
                Spectrum sp = forward(s.psi[a]);
                for (int r = 0; r < d; ++r)
                    for (int c = r; c < d; ++c)
                        parts.push_back(second_derivative(sp, r, c));
            }
            for (std::size_t i = 0; i < s.grid.size(); ++i) {
                double q = 0.0;
                for (const auto& p : parts) q += p[i] * p[i];
                hess = std::max(hess, std::sqrt(q));
            }
        }
        rep.series["hess_v_scaled"].push_back(hess * std::pow(1.0 + t, 3.0));

        // reconstruction identity (algebraic, machine precision)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (std::size_t i = 0; i < s.grid.size(); ++i) {
                    double r = s.grad_v.at(a, b)[i] -
                               (a == b ? 1.0 / (1.0 + t) : 0.0) -
                               s.K.at(a, b)[i] / ((1.0 + t) * (1.0 + t));
                    rep.max_grad_residual =
                        std::max(rep.max_grad_residual, std::abs(r));
                }

        // independent spectral divergence against d/(1+t) + tr K/(1+t)^2
        ScalarField div_psi = divergence(s.psi);
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            double trK = 0.0;
            for (int a = 0; a < d; ++a) trK += s.K.at(a, a)[i];
            double r = div_psi[i] - trK / ((1.0 + t) * (1.0 + t));
            rep.max_div_residual = std::max(rep.max_div_residual, std::abs(r));
        }
    }

    // boundedness: growth over the trailing decade of t must stay under the
    // configured tolerance
    double t_last = times.back();
    std::size_t start = 0;
    while (start + 1 < times.size() && times[start] < t_last / 10.0) ++start;
    for (const auto& name : rep.names) {
        const auto& s = rep.series[name];
        double ref = s[start], last = s.back();
        double growth = (std::abs(ref) <= 1e-14 && std::abs(last) <= 1e-14)
                            ? 0.0
                            : last / ref - 1.0;
        bool ok = growth < growth_tol;
        rep.verdicts.push_back({name, growth, ok});
        rep.all_bounded = rep.all_bounded && ok;
    }
    return rep;
}

}  // namespace rieszlab
