//==============================================================================
// module.cpp
// Python bindings for the core library. A thin veneer: grids and fields
// cross the boundary as numpy copies, reports come back as bound structs,
// and the exception taxonomy maps onto python exception types. The heavy
// lifting stays in the C++ core; nothing here adds semantics.
//==============================================================================
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <sstream>
#include <vector>

#include "rieszlab/background_flow.hpp"
#include "rieszlab/decay.hpp"
#include "rieszlab/diagnostics.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/gronwall.hpp"
#include "rieszlab/inequality.hpp"
#include "rieszlab/model.hpp"
#include "rieszlab/run.hpp"
#include "rieszlab/solver.hpp"
#include "rieszlab/spectral.hpp"

namespace py = pybind11;
using namespace rieszlab;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// samples as a dim-dimensional numpy array (axis 0 slowest, matching the
// flattened row-major layout)
py::array_t<double> scalar_values(const ScalarField& f) {
    std::vector<py::ssize_t> shape(std::size_t(f.grid.dim), f.grid.n);
    py::array_t<double> out(shape);
    std::copy(f.v.begin(), f.v.end(), out.mutable_data());
    return out;
}

void set_scalar_values(ScalarField& f, const DoubleArray& a) {
    if (std::size_t(a.size()) != f.grid.size())
        throw config_error("sample array size does not match the grid");
    std::copy(a.data(), a.data() + a.size(), f.v.begin());
}

ScalarField scalar_from_array(const Grid& g, const DoubleArray& a) {
    ScalarField f(g);
    set_scalar_values(f, a);
    return f;
}

// components stacked along a leading axis: shape (dim, n, ..., n)
py::array_t<double> vector_values(const VectorField& w) {
    std::vector<py::ssize_t> shape{w.grid.dim};
    for (int a = 0; a < w.grid.dim; ++a) shape.push_back(w.grid.n);
    py::array_t<double> out(shape);
    double* dst = out.mutable_data();
    for (int a = 0; a < w.grid.dim; ++a) {
        std::copy(w[a].v.begin(), w[a].v.end(), dst);
        dst += w.grid.size();
    }
    return out;
}

void set_vector_values(VectorField& w, const DoubleArray& a) {
    if (std::size_t(a.size()) != w.grid.size() * std::size_t(w.grid.dim))
        throw config_error("sample array size does not match dim * grid size");
    const double* src = a.data();
    for (int c = 0; c < w.grid.dim; ++c) {
        std::copy(src, src + w.grid.size(), w[c].v.begin());
        src += w.grid.size();
    }
}

py::tuple point_tuple(const Grid& g, std::size_t idx) {
    auto x = g.point(idx);
    py::tuple out(g.dim);
    for (int a = 0; a < g.dim; ++a) out[a] = x[std::size_t(a)];
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "pseudo-spectral workbench core: rescaled expanding-gas "
              "solvers, trajectory diagnostics, decay-rate reports, envelope "
              "certification and inequality ensembles on the periodic torus";
    m.attr("__version__") = tool_version();
    m.attr("lp_infinity") = lp_infinity;
    m.attr("ensemble_band") = kEnsembleBand;

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<blowup_error>(m, "BlowupError", PyExc_RuntimeError);
    py::register_exception<numeric_error>(m, "NumericError",
                                          PyExc_ArithmeticError);

    //--------------------------------------------------------------------------
    // grids and fields
    //--------------------------------------------------------------------------
    py::class_<Grid>(m, "Grid")
        .def(py::init<int, int, double>(), py::arg("dim"), py::arg("n"),
             py::arg("L") = 2.0 * M_PI)
        .def_readonly("dim", &Grid::dim)
        .def_readonly("n", &Grid::n)
        .def_readonly("L", &Grid::L)
        .def("size", &Grid::size)
        .def("spacing", &Grid::spacing)
        .def("cell_volume", &Grid::cell_volume)
        .def("volume", &Grid::volume)
        .def("dk", &Grid::dk)
        .def("point", &point_tuple, py::arg("idx"),
             "coordinates of a flattened sample index")
        .def(py::self == py::self)
        .def(py::self != py::self)
        .def("__repr__", [](const Grid& g) {
            std::ostringstream os;
            os << "Grid(dim=" << g.dim << ", n=" << g.n << ", L=" << g.L << ")";
            return os.str();
        });

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init<const Grid&>(), py::arg("grid"))
        .def(py::init(&scalar_from_array), py::arg("grid"), py::arg("values"))
        .def_readonly("grid", &ScalarField::grid)
        .def_property("values", &scalar_values, &set_scalar_values,
                      "samples as a dim-dimensional array (copied)")
        .def("__len__", &ScalarField::size);

    py::class_<VectorField>(m, "VectorField")
        .def(py::init<const Grid&>(), py::arg("grid"))
        .def_readonly("grid", &VectorField::grid)
        .def_property("values", &vector_values, &set_vector_values,
                      "components stacked on a leading axis (copied)")
        .def("component",
             [](const VectorField& w, int a) {
                 if (a < 0 || a >= w.dim())
                     throw config_error("component index out of range");
                 return w[a];
             },
             py::arg("a"))
        .def("set_component",
             [](VectorField& w, int a, const ScalarField& f) {
                 if (a < 0 || a >= w.dim())
                     throw config_error("component index out of range");
                 check_same_grid(w.grid, f.grid);
                 w[a] = f;
             },
             py::arg("a"), py::arg("field"))
        .def("__len__", &VectorField::dim);

    py::class_<MatrixField>(m, "MatrixField")
        .def_readonly("grid", &MatrixField::grid)
        .def("entry",
             [](const MatrixField& mf, int r, int c) -> ScalarField {
                 if (r < 0 || r >= mf.grid.dim || c < 0 || c >= mf.grid.dim)
                     throw config_error("matrix entry index out of range");
                 return mf.at(r, c);
             },
             py::arg("row"), py::arg("col"));

    m.def("max_abs", py::overload_cast<const ScalarField&>(&max_abs));
    m.def("max_abs", py::overload_cast<const VectorField&>(&max_abs));
    m.def("all_finite", py::overload_cast<const ScalarField&>(&all_finite));
    m.def("all_finite", py::overload_cast<const VectorField&>(&all_finite));

    //--------------------------------------------------------------------------
    // spectral operators
    //--------------------------------------------------------------------------
    m.def("fractional_laplacian", &fractional_laplacian, py::arg("f"),
          py::arg("s"), "|k|^s Fourier multiplier (mean dropped for s != 0)");
    m.def("riesz_force",
          py::overload_cast<const ScalarField&, double>(&riesz_force),
          py::arg("f"), py::arg("sigma"), "grad Lambda^{-sigma} f");
    m.def("gradient", py::overload_cast<const ScalarField&>(&gradient),
          py::arg("f"));
    m.def("divergence", &divergence, py::arg("w"));
    m.def("dealias", &dealias, py::arg("f"), "2/3-rule spectral truncation");
    m.def("pointwise_product", &pointwise_product, py::arg("a"), py::arg("b"));
    m.def("sobolev_seminorm",
          py::overload_cast<const ScalarField&, double>(&sobolev_seminorm),
          py::arg("f"), py::arg("ell"));
    m.def("sobolev_seminorm",
          py::overload_cast<const VectorField&, double>(&sobolev_seminorm),
          py::arg("w"), py::arg("ell"));
    m.def("lp_norm", py::overload_cast<const ScalarField&, double>(&lp_norm),
          py::arg("f"), py::arg("p"));
    m.def("lp_norm", py::overload_cast<const VectorField&, double>(&lp_norm),
          py::arg("w"), py::arg("p"));

    //--------------------------------------------------------------------------
    // model and solver
    //--------------------------------------------------------------------------
    py::enum_<SystemKind>(m, "SystemKind")
        .value("pressureless", SystemKind::pressureless)
        .value("pressured", SystemKind::pressured);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](SystemKind system, int lambda_, double sigma,
                         double gamma) {
                 ModelParams p;
                 p.system = system;
                 p.lambda = lambda_;
                 p.sigma = sigma;
                 p.gamma = gamma;
                 return p;
             }),
             py::arg("system") = SystemKind::pressureless,
             py::arg("lambda_") = -1, py::arg("sigma") = 0.5,
             py::arg("gamma") = 1.5)
        .def_readwrite("system", &ModelParams::system)
        .def_readwrite("lambda_", &ModelParams::lambda,
                       "interaction sign: -1 repulsive, +1 attractive")
        .def_readwrite("sigma", &ModelParams::sigma)
        .def_readwrite("gamma", &ModelParams::gamma)
        .def("gamma_tilde", &ModelParams::gamma_tilde)
        .def("validate", &ModelParams::validate, py::arg("dim"));

    py::class_<InitialDataSpec>(m, "InitialDataSpec")
        .def(py::init([](double n_amplitude, double w_amplitude,
                         double support_fraction, double plateau_fraction,
                         double noise_amplitude, int noise_band,
                         std::uint64_t seed) {
                 InitialDataSpec d;
                 d.n_amplitude = n_amplitude;
                 d.w_amplitude = w_amplitude;
                 d.support_fraction = support_fraction;
                 d.plateau_fraction = plateau_fraction;
                 d.noise_amplitude = noise_amplitude;
                 d.noise_band = noise_band;
                 d.seed = seed;
                 return d;
             }),
             py::arg("n_amplitude") = 0.01, py::arg("w_amplitude") = 0.0,
             py::arg("support_fraction") = 0.5,
             py::arg("plateau_fraction") = 0.5,
             py::arg("noise_amplitude") = 0.0, py::arg("noise_band") = 8,
             py::arg("seed") = 0)
        .def_readwrite("n_amplitude", &InitialDataSpec::n_amplitude)
        .def_readwrite("w_amplitude", &InitialDataSpec::w_amplitude)
        .def_readwrite("support_fraction", &InitialDataSpec::support_fraction)
        .def_readwrite("plateau_fraction", &InitialDataSpec::plateau_fraction)
        .def_readwrite("noise_amplitude", &InitialDataSpec::noise_amplitude)
        .def_readwrite("noise_band", &InitialDataSpec::noise_band)
        .def_readwrite("seed", &InitialDataSpec::seed)
        .def("validate", &InitialDataSpec::validate);

    py::class_<State>(m, "State")
        .def(py::init<const Grid&>(), py::arg("grid"))
        .def_readwrite("N", &State::N)
        .def_readwrite("W", &State::W)
        .def_readwrite("tau", &State::tau)
        .def("grid", &State::grid);

    m.def("make_initial_state", &make_initial_state, py::arg("grid"),
          py::arg("spec"));
    m.def("plateau_profile", &plateau_profile, py::arg("q"), py::arg("q0"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init([](double dtau, double tau_end, double cfl_limit,
                         double clamp_tol) {
                 SolverConfig c;
                 c.dtau = dtau;
                 c.tau_end = tau_end;
                 c.cfl_limit = cfl_limit;
                 c.clamp_tol = clamp_tol;
                 return c;
             }),
             py::arg("dtau") = 0.01, py::arg("tau_end") = 3.0,
             py::arg("cfl_limit") = 0.5, py::arg("clamp_tol") = 1e-8)
        .def_readwrite("dtau", &SolverConfig::dtau)
        .def_readwrite("tau_end", &SolverConfig::tau_end)
        .def_readwrite("cfl_limit", &SolverConfig::cfl_limit)
        .def_readwrite("clamp_tol", &SolverConfig::clamp_tol);

    py::enum_<RunOutcome>(m, "RunOutcome")
        .value("completed", RunOutcome::completed)
        .value("blowup", RunOutcome::blowup)
        .value("step_error", RunOutcome::step_error);

    py::class_<RunResult>(m, "RunResult")
        .def(py::init<>())
        .def_readonly("outcome", &RunResult::outcome)
        .def_readonly("breakdown_tau", &RunResult::breakdown_tau)
        .def_readonly("breakdown_reason", &RunResult::breakdown_reason)
        .def_readonly("steps", &RunResult::steps)
        .def_readonly("max_clamp_fraction", &RunResult::max_clamp_fraction)
        .def_readonly("clamp_warning", &RunResult::clamp_warning);

    m.def("rhs",
          [](const ModelParams& p, const State& s, double clamp_tol) {
              return rhs(p, s, nullptr, clamp_tol);
          },
          py::arg("params"), py::arg("state"), py::arg("clamp_tol") = 1e-8,
          "time derivative of the rescaled state");
    m.def("simulate",
          [](const ModelParams& p, State& s, const SolverConfig& cfg,
             py::object observer) {
              std::function<void(const State&, std::size_t)> fn;
              if (!observer.is_none())
                  fn = [observer](const State& st, std::size_t k) {
                      observer(st, k);
                  };
              return simulate(p, s, cfg, fn);
          },
          py::arg("params"), py::arg("state"), py::arg("config"),
          py::arg("observer") = py::none(),
          "integrate the state in place to tau_end; the observer (if given) "
          "runs on the initial state and after every step");

    //--------------------------------------------------------------------------
    // diagnostics
    //--------------------------------------------------------------------------
    m.def("rescaled_norm",
          py::overload_cast<const ScalarField&, double, double>(&rescaled_norm),
          py::arg("f"), py::arg("ell"), py::arg("p"));
    m.def("rescaled_norm",
          py::overload_cast<const VectorField&, double, double>(&rescaled_norm),
          py::arg("w"), py::arg("ell"), py::arg("p"));
    m.def("physical_factor", &physical_factor, py::arg("dim"), py::arg("ell"),
          py::arg("p"), py::arg("tau"));
    m.def("mass", &mass, py::arg("state"), "conserved physical L2 mass");
    m.def("compute_X", &compute_X, py::arg("state"), py::arg("s"),
          py::arg("sigma"), py::arg("system"));
    m.def("compute_Z", &compute_Z, py::arg("state"), py::arg("s"),
          py::arg("sigma"), py::arg("system"));
    m.def("compute_W", &compute_W, py::arg("state"), py::arg("s"),
          py::arg("sigma"), py::arg("gamma_tilde"));
    m.def("compute_Wk", &compute_Wk, py::arg("state"), py::arg("s"),
          py::arg("sigma"), py::arg("gamma_tilde"), py::arg("k"));
    m.def("weighted_density_norm", &weighted_density_norm, py::arg("state"),
          py::arg("ell"), py::arg("p"), py::arg("sigma"));
    m.def("weighted_velocity_norm", &weighted_velocity_norm, py::arg("state"),
          py::arg("ell"), py::arg("p"));
    m.def("weighted_density_norm_tilde", &weighted_density_norm_tilde,
          py::arg("state"), py::arg("ell"), py::arg("p"));
    m.def("k0_index", &k0_index, py::arg("sigma"), py::arg("s"));
    m.def("aggregate_decay_exponent", &aggregate_decay_exponent,
          py::arg("dim"), py::arg("sigma"));

    py::class_<NormRow>(m, "NormRow")
        .def(py::init<>())
        .def_readwrite("tau", &NormRow::tau)
        .def_readwrite("t", &NormRow::t)
        .def_readwrite("quantity", &NormRow::quantity)
        .def_readwrite("ell", &NormRow::ell)
        .def_readwrite("p", &NormRow::p)
        .def_readwrite("rescaled", &NormRow::rescaled)
        .def_readwrite("physical", &NormRow::physical);

    py::class_<NormSeries>(m, "NormSeries")
        .def(py::init<>())
        .def_readwrite("rows", &NormSeries::rows)
        .def("validate", &NormSeries::validate);

    py::class_<ResidualSeries>(m, "ResidualSeries")
        .def_readonly("t", &ResidualSeries::t)
        .def_readonly("ratio", &ResidualSeries::ratio);
    m.def("residual_ratio_series", &residual_ratio_series, py::arg("tau"),
          py::arg("z"), py::arg("dim"), py::arg("sigma"));

    py::class_<EnvelopeFit>(m, "EnvelopeFit")
        .def_readonly("c0", &EnvelopeFit::c0)
        .def_readonly("dominated", &EnvelopeFit::dominated)
        .def_readonly("max_excess", &EnvelopeFit::max_excess);
    m.def("envelope_value", &envelope_value, py::arg("t"), py::arg("c0"),
          py::arg("cds"), py::arg("z0"));
    m.def("fit_envelope", &fit_envelope, py::arg("t"), py::arg("z"),
          py::arg("dim"), py::arg("sigma"), py::arg("fit_fraction") = 0.25);

    //--------------------------------------------------------------------------
    // decay-rate analysis
    //--------------------------------------------------------------------------
    py::class_<Exponents>(m, "Exponents")
        .def_readonly("physical", &Exponents::physical)
        .def_readonly("rescaled", &Exponents::rescaled)
        .def("__repr__", [](const Exponents& e) {
            std::ostringstream os;
            os << "Exponents(physical=" << e.physical
               << ", rescaled=" << e.rescaled << ")";
            return os.str();
        });
    m.def("theorem_exponent", &theorem_exponent, py::arg("system"),
          py::arg("lambda_"), py::arg("dim"), py::arg("sigma"),
          py::arg("gamma"), py::arg("ell"), py::arg("quantity"),
          py::arg("p") = 2.0, py::arg("s") = 0.0);
    m.def("improved_density_exponent", &improved_density_exponent,
          py::arg("dim"), py::arg("sigma"), py::arg("ell"), py::arg("s"));
    m.def("admissibility_margin", &admissibility_margin, py::arg("system"),
          py::arg("lambda_"), py::arg("dim"), py::arg("sigma"),
          py::arg("gamma"));

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("rate", &FitResult::rate)
        .def_readonly("r2", &FitResult::r2)
        .def("__repr__", [](const FitResult& f) {
            std::ostringstream os;
            os << "FitResult(rate=" << f.rate << ", r2=" << f.r2 << ")";
            return os.str();
        });
    m.def("fit_exponent", &fit_exponent, py::arg("tau"), py::arg("value"),
          py::arg("window_fraction") = 0.5);
    m.def("fit_physical_exponent", &fit_physical_exponent, py::arg("t"),
          py::arg("value"), py::arg("window_fraction") = 0.5);

    py::class_<DecayRow>(m, "DecayRow")
        .def_readonly("quantity", &DecayRow::quantity)
        .def_readonly("ell", &DecayRow::ell)
        .def_readonly("p", &DecayRow::p)
        .def_readonly("has_prediction", &DecayRow::has_prediction)
        .def_readonly("predicted", &DecayRow::predicted)
        .def_readonly("exact_law", &DecayRow::exact_law)
        .def_readonly("fitted_ok", &DecayRow::fitted_ok)
        .def_readonly("fitted_rate", &DecayRow::fitted_rate)
        .def_readonly("r2", &DecayRow::r2)
        .def_readonly("sharpness", &DecayRow::sharpness)
        .def_readonly("near_boundary", &DecayRow::near_boundary)
        .def_readonly("verdict", &DecayRow::verdict);

    py::class_<DecayReport>(m, "DecayReport")
        .def_readonly("rows", &DecayReport::rows)
        .def_readonly("window_fraction", &DecayReport::window_fraction)
        .def_readonly("all_pass", &DecayReport::all_pass);
    m.def("decay_report", &decay_report, py::arg("series"), py::arg("params"),
          py::arg("dim"), py::arg("s"), py::arg("tol") = 0.1,
          py::arg("window_fraction") = 0.5, py::arg("mass_tol") = 1e-3);

    //--------------------------------------------------------------------------
    // envelope certification
    //--------------------------------------------------------------------------
    py::class_<GronwallParams>(m, "GronwallParams")
        .def(py::init([](double a, double c_star, std::vector<double> b,
                         std::vector<double> c, int c_p) {
                 GronwallParams p;
                 p.a = a;
                 p.c_star = c_star;
                 p.b = std::move(b);
                 p.c = std::move(c);
                 p.c_p = c_p;
                 return p;
             }),
             py::arg("a") = 2.0, py::arg("c_star") = 1.0,
             py::arg("b") = std::vector<double>{},
             py::arg("c") = std::vector<double>{}, py::arg("c_p") = 1)
        .def_readwrite("a", &GronwallParams::a)
        .def_readwrite("c_star", &GronwallParams::c_star)
        .def_readwrite("b", &GronwallParams::b)
        .def_readwrite("c", &GronwallParams::c)
        .def_readwrite("c_p", &GronwallParams::c_p)
        .def("validate", &GronwallParams::validate);

    py::class_<GronwallSeries>(m, "GronwallSeries")
        .def_readonly("t", &GronwallSeries::t)
        .def_readonly("y", &GronwallSeries::y)
        .def_readonly("blowup", &GronwallSeries::blowup)
        .def_readonly("blowup_time", &GronwallSeries::blowup_time);

    py::class_<ThresholdResult>(m, "ThresholdResult")
        .def_readonly("m", &ThresholdResult::m)
        .def_readonly("unbounded_at_scale", &ThresholdResult::unbounded_at_scale);

    m.def("integrate_inequality", &integrate_inequality, py::arg("params"),
          py::arg("y0"), py::arg("t_end"), py::arg("samples") = 400);
    m.def("envelope", &envelope, py::arg("params"), py::arg("y0"),
          py::arg("t"));
    m.def("verify_lemma", &verify_lemma, py::arg("params"), py::arg("y0"),
          py::arg("t_end") = 1e4, py::arg("slack") = 1e-9);
    m.def("find_threshold_M", &find_threshold_M, py::arg("params"),
          py::arg("t_end") = 1e4, py::arg("resolution") = 1e-3);
    m.def("bootstrap_margin", &bootstrap_margin, py::arg("params"),
          py::arg("z0"));
    m.def("sufficient_threshold", &sufficient_threshold, py::arg("params"));
    m.def("asymptotic_slope", &asymptotic_slope, py::arg("series"));

    //--------------------------------------------------------------------------
    // inequality ensembles
    //--------------------------------------------------------------------------
    py::enum_<Inequality>(m, "Inequality")
        .value("kato_ponce", Inequality::kKatoPonce)
        .value("tech1", Inequality::kTech1)
        .value("tech2", Inequality::kTech2)
        .value("tech5", Inequality::kTech5)
        .value("moser", Inequality::kMoser)
        .value("linfty_interp", Inequality::kInterp)
        .value("composition", Inequality::kComposition);
    m.def("inequality_name", &inequality_name, py::arg("q"));

    m.def("commutator", &commutator, py::arg("f"), py::arg("s"), py::arg("g"),
          "[f, Lambda^s] g");
    m.def("ratio_kato_ponce", &ratio_kato_ponce, py::arg("f"), py::arg("g"),
          py::arg("s"), py::arg("r"), py::arg("p1"), py::arg("q1"),
          py::arg("p2"), py::arg("q2"));
    m.def("ratio_tech1", &ratio_tech1, py::arg("f"), py::arg("g"),
          py::arg("s"));
    m.def("ratio_tech2", &ratio_tech2, py::arg("f"), py::arg("g"),
          py::arg("s"));
    m.def("ratio_tech5", &ratio_tech5, py::arg("f"), py::arg("g"),
          py::arg("sigma"));
    m.def("ratio_moser", &ratio_moser, py::arg("f"), py::arg("g"),
          py::arg("s"));
    m.def("ratio_linfty_interp", &ratio_linfty_interp, py::arg("f"),
          py::arg("s"), py::arg("eps"));
    m.def("ratio_composition", &ratio_composition, py::arg("f"),
          py::arg("alpha"), py::arg("s"));

    py::class_<FieldEnsemble>(m, "FieldEnsemble")
        .def_readonly("grid", &FieldEnsemble::grid)
        .def_readonly("count", &FieldEnsemble::count)
        .def_readonly("seed", &FieldEnsemble::seed)
        .def_readonly("beta", &FieldEnsemble::beta)
        .def_readonly("band", &FieldEnsemble::band)
        .def_readonly("fields", &FieldEnsemble::fields);
    m.def("make_ensemble", &make_ensemble, py::arg("grid"), py::arg("count"),
          py::arg("seed"), py::arg("beta") = 2.5,
          py::arg("band") = kEnsembleBand);

    py::class_<EnsembleReport>(m, "EnsembleReport")
        .def_readonly("ratios", &EnsembleReport::ratios)
        .def_readonly("max_ratio", &EnsembleReport::max_ratio)
        .def_readonly("p95", &EnsembleReport::p95)
        .def("__repr__", [](const EnsembleReport& r) {
            std::ostringstream os;
            os << "EnsembleReport(max_ratio=" << r.max_ratio
               << ", p95=" << r.p95 << ", members=" << r.ratios.size() << ")";
            return os.str();
        });
    m.def("run_ensemble", &run_ensemble, py::arg("q"), py::arg("grid"),
          py::arg("count"), py::arg("seed"), py::arg("beta") = 2.5,
          py::arg("band") = kEnsembleBand);

    //--------------------------------------------------------------------------
    // expanding background flows
    //--------------------------------------------------------------------------
    py::class_<InitialFlow>(m, "InitialFlow")
        .def_readonly("dim", &InitialFlow::dim)
        .def_readonly("epsilon", &InitialFlow::epsilon)
        .def_readonly("period", &InitialFlow::period)
        .def_static("identity", &InitialFlow::identity, py::arg("dim"))
        .def_static("sine", &InitialFlow::sine, py::arg("dim"),
                    py::arg("epsilon"))
        .def_static("preset", &InitialFlow::preset, py::arg("name"),
                    py::arg("dim"), py::arg("epsilon"));

    m.def("check_dispersive_condition", &check_dispersive_condition,
          py::arg("flow"), py::arg("samples_per_axis"));
    m.def("burgers_evaluate",
          [](const InitialFlow& flow, const std::vector<double>& x, double t) {
              if (int(x.size()) != flow.dim)
                  throw config_error("point dimension does not match the flow");
              BurgersPoint p = burgers_evaluate(flow, x.data(), t);
              py::dict out;
              py::tuple alpha(flow.dim), v(flow.dim);
              for (int a = 0; a < flow.dim; ++a) {
                  alpha[a] = p.alpha[std::size_t(a)];
                  v[a] = p.v[std::size_t(a)];
              }
              py::array_t<double> gv({flow.dim, flow.dim});
              for (int r = 0; r < flow.dim; ++r)
                  for (int c = 0; c < flow.dim; ++c)
                      gv.mutable_at(r, c) =
                          p.grad_v[std::size_t(r) * kMaxDim + c];
              out["alpha"] = alpha;
              out["v"] = v;
              out["grad_v"] = gv;
              out["newton_iterations"] = p.newton_iterations;
              return out;
          },
          py::arg("flow"), py::arg("x"), py::arg("t"),
          "solve a + t v0(a) = x along the characteristics");

    py::class_<FlowSample>(m, "FlowSample")
        .def_readonly("t", &FlowSample::t)
        .def_readonly("grid", &FlowSample::grid)
        .def_readonly("v", &FlowSample::v)
        .def_readonly("psi", &FlowSample::psi)
        .def_readonly("grad_v", &FlowSample::grad_v)
        .def_readonly("K", &FlowSample::K);
    m.def("compute_K", &compute_K, py::arg("flow"), py::arg("n"),
          py::arg("t"));

    py::class_<SeriesVerdict>(m, "SeriesVerdict")
        .def_readonly("name", &SeriesVerdict::name)
        .def_readonly("growth", &SeriesVerdict::growth)
        .def_readonly("bounded", &SeriesVerdict::bounded);

    py::class_<BackgroundReport>(m, "BackgroundReport")
        .def_readonly("times", &BackgroundReport::times)
        .def_readonly("names", &BackgroundReport::names)
        .def_readonly("series", &BackgroundReport::series)
        .def_readonly("max_grad_residual", &BackgroundReport::max_grad_residual)
        .def_readonly("max_div_residual", &BackgroundReport::max_div_residual)
        .def_readonly("verdicts", &BackgroundReport::verdicts)
        .def_readonly("all_bounded", &BackgroundReport::all_bounded);
    m.def("verify_background", &verify_background, py::arg("flow"),
          py::arg("n"), py::arg("times"), py::arg("ells"),
          py::arg("growth_tol") = 0.05);

    //--------------------------------------------------------------------------
    // pipeline layer
    //--------------------------------------------------------------------------
    py::class_<SimJob>(m, "SimJob")
        .def(py::init<>())
        .def_readwrite("params", &SimJob::params)
        .def_readwrite("grid", &SimJob::grid)
        .def_readwrite("solver", &SimJob::solver)
        .def_readwrite("initial", &SimJob::initial)
        .def_readwrite("ells", &SimJob::ells)
        .def_readwrite("ps", &SimJob::ps)
        .def_readwrite("s", &SimJob::s)
        .def_readwrite("norm_cadence", &SimJob::norm_cadence)
        .def_readwrite("snapshot_cadence", &SimJob::snapshot_cadence)
        .def("validate", &SimJob::validate);

    m.def("parse_sim_job", &parse_sim_job, py::arg("json_text"),
          "parse + validate a simulation config (strict keys)");
    m.def("run_sim_job",
          [](const SimJob& job) {
              RunResult result;
              NormSeries series = run_sim_job(job, result);
              return py::make_tuple(series, result);
          },
          py::arg("job"), "returns (norm_series, run_result)");
    m.def("norm_series_csv",
          [](const NormSeries& series) {
              std::ostringstream os;
              write_norm_series_csv(series, os);
              return os.str();
          },
          py::arg("series"), "render a norm series in the pinned CSV layout");
    m.def("norm_series_from_csv",
          [](const std::string& text) {
              std::istringstream is(text);
              return read_norm_series_csv(is);
          },
          py::arg("text"));
}
