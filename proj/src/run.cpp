//------------------------------------------------------------------------------
// pipeline layer: strict JSON configs, deterministic artifacts, exit codes
//
// Determinism contract: every CSV byte is a pure function of the resolved
// config.  Values go through one %.17g formatter, rows are emitted in a
// fixed order, and wall-clock information is confined to manifest.json.
//------------------------------------------------------------------------------

#include "rieszlab/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rieszlab/background_flow.hpp"
#include "rieszlab/decay.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/gronwall.hpp"
#include "rieszlab/inequality.hpp"
#include "rieszlab/spectral.hpp"

namespace rieszlab {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kNormHeader =
    "tau,t,quantity,l,p,rescaled_value,physical_value";

//------------------------------------------------------------------------------
// formatting
//------------------------------------------------------------------------------

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// wall-clock stamp; only manifests may carry this
std::string timestamp_utc() {
    std::time_t now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw config_error("cannot write " + path.string());
    return os;
}

//------------------------------------------------------------------------------
// strict json helpers
//------------------------------------------------------------------------------

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(what + ": " + e.what());
    }
}

json load_json_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

void expect_object(const json& j, const std::string& what) {
    if (!j.is_object()) throw config_error(what + " must be a JSON object");
}

// anything outside the allowed set is a hard error, not a warning
void expect_keys(const json& j, const std::string& what,
                 std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known)
            throw config_error("unknown key \"" + item.key() + "\" in " + what);
    }
}

double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number())
        throw config_error(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw config_error(std::string("\"") + key + "\" must be an integer");
    return v.get<int>();
}

std::uint64_t get_uint64(const json& j, const char* key,
                         std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw config_error(std::string("\"") + key +
                           "\" must be a non-negative integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0)
        throw config_error(std::string("\"") + key +
                           "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string get_string(const json& j, const char* key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string())
        throw config_error(std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
}

std::vector<double> get_number_list(const json& j, const char* key,
                                    std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array())
        throw config_error(std::string("\"") + key + "\" must be an array");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number())
            throw config_error(std::string("\"") + key +
                               "\" entries must be numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// integrability exponents: numbers, or the string "inf" for the sup norm
std::vector<double> get_p_list(const json& j, const char* key,
                               std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array())
        throw config_error(std::string("\"") + key + "\" must be an array");
    std::vector<double> out;
    for (const json& e : v) {
        if (e.is_number())
            out.push_back(e.get<double>());
        else if (e.is_string() && e.get<std::string>() == "inf")
            out.push_back(lp_infinity);
        else
            throw config_error(std::string("\"") + key +
                               "\" entries must be numbers or \"inf\"");
    }
    return out;
}

//------------------------------------------------------------------------------
// simulation config
//------------------------------------------------------------------------------

SimJob sim_job_from_json(const json& root) {
    expect_object(root, "simulation config");
    expect_keys(root, "simulation config",
                {"system", "lambda", "sigma", "gamma", "dim", "n", "length",
                 "dtau", "tau_end", "cfl_limit", "clamp_tol", "initial",
                 "norm_cadence", "snapshot_cadence", "ells", "ps", "s"});
    for (const char* req : {"system", "dim", "n"})
        if (!root.contains(req))
            throw config_error(std::string("simulation config needs \"") + req +
                               "\"");

    SimJob job;
    job.params.system =
        system_from_string(root.at("system").get<std::string>());
    ModelParams model_defaults;
    job.params.lambda = get_number(root, "lambda", model_defaults.lambda);
    job.params.sigma = get_number(root, "sigma", model_defaults.sigma);
    job.params.gamma = get_number(root, "gamma", model_defaults.gamma);

    int dim = get_int(root, "dim", 1);
    int n = get_int(root, "n", 8);
    double length = get_number(root, "length", 2.0 * M_PI);
    job.grid = Grid(dim, n, length);

    SolverConfig solver_defaults;
    job.solver.dtau = get_number(root, "dtau", solver_defaults.dtau);
    job.solver.tau_end = get_number(root, "tau_end", solver_defaults.tau_end);
    job.solver.cfl_limit =
        get_number(root, "cfl_limit", solver_defaults.cfl_limit);
    job.solver.clamp_tol =
        get_number(root, "clamp_tol", solver_defaults.clamp_tol);

    if (root.contains("initial")) {
        const json& ji = root.at("initial");
        expect_object(ji, "\"initial\"");
        expect_keys(ji, "\"initial\"",
                    {"n_amplitude", "w_amplitude", "support_fraction",
                     "plateau_fraction", "noise_amplitude", "noise_band",
                     "seed"});
        InitialDataSpec d;
        job.initial.n_amplitude = get_number(ji, "n_amplitude", d.n_amplitude);
        job.initial.w_amplitude = get_number(ji, "w_amplitude", d.w_amplitude);
        job.initial.support_fraction =
            get_number(ji, "support_fraction", d.support_fraction);
        job.initial.plateau_fraction =
            get_number(ji, "plateau_fraction", d.plateau_fraction);
        job.initial.noise_amplitude =
            get_number(ji, "noise_amplitude", d.noise_amplitude);
        job.initial.noise_band = get_int(ji, "noise_band", d.noise_band);
        job.initial.seed = get_uint64(ji, "seed", d.seed);
    }

    job.ells = get_number_list(root, "ells", job.ells);
    job.ps = get_p_list(root, "ps", job.ps);
    job.s = get_number(root, "s", job.s);
    job.norm_cadence = get_int(root, "norm_cadence", job.norm_cadence);
    job.snapshot_cadence =
        get_int(root, "snapshot_cadence", job.snapshot_cadence);

    job.params.validate(job.grid.dim);
    job.initial.validate();
    job.validate();
    return job;
}

// resolved echo; parsing it back reproduces the job exactly
json sim_job_to_json(const SimJob& job) {
    json ps = json::array();
    for (double p : job.ps) {
        if (p == lp_infinity)
            ps.push_back("inf");
        else
            ps.push_back(p);
    }
    json root = {
        {"system", to_string(job.params.system)},
        {"lambda", job.params.lambda},
        {"sigma", job.params.sigma},
        {"dim", job.grid.dim},
        {"n", job.grid.n},
        {"length", job.grid.L},
        {"dtau", job.solver.dtau},
        {"tau_end", job.solver.tau_end},
        {"cfl_limit", job.solver.cfl_limit},
        {"clamp_tol", job.solver.clamp_tol},
        {"initial",
         {{"n_amplitude", job.initial.n_amplitude},
          {"w_amplitude", job.initial.w_amplitude},
          {"support_fraction", job.initial.support_fraction},
          {"plateau_fraction", job.initial.plateau_fraction},
          {"noise_amplitude", job.initial.noise_amplitude},
          {"noise_band", job.initial.noise_band},
          {"seed", job.initial.seed}}},
        {"norm_cadence", job.norm_cadence},
        {"snapshot_cadence", job.snapshot_cadence},
        {"ells", job.ells},
        {"ps", ps},
        {"s", job.s},
    };
    if (job.params.system == SystemKind::pressured)
        root["gamma"] = job.params.gamma;
    return root;
}

//------------------------------------------------------------------------------
// manifests and snapshots
//------------------------------------------------------------------------------

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const json& config_echo, const json& outputs,
                    const json& outcome) {
    json m = {
        {"tool", "rieszlab"},       {"version", tool_version()},
        {"subcommand", subcommand}, {"generated", timestamp_utc()},
        {"config", config_echo},    {"outputs", outputs},
        {"outcome", outcome},
    };
    auto os = open_out(dir / "manifest.json");
    os << m.dump(2) << "\n";
}

void write_snapshot(const State& st, const fs::path& dir, int index) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "snap_%04d", index);
    const Grid& g = st.grid();

    auto bin = open_out(dir / (std::string(stem) + ".bin"), true);
    auto dump = [&](const std::vector<double>& v) {
        bin.write(reinterpret_cast<const char*>(v.data()),
                  std::streamsize(v.size() * sizeof(double)));
    };
    dump(st.N.v);
    json fields = json::array({"N"});
    for (int a = 0; a < g.dim; ++a) {
        dump(st.W[a].v);
        fields.push_back("W" + std::to_string(a));
    }
    bin.close();

    json side = {
        {"tau", st.tau},          {"dim", g.dim},
        {"n", g.n},               {"length", g.L},
        {"points", g.size()},     {"fields", fields},
        {"encoding", "float64_le"},
    };
    auto os = open_out(dir / (std::string(stem) + ".json"));
    os << side.dump(2) << "\n";
}

//------------------------------------------------------------------------------
// norm recording
//------------------------------------------------------------------------------

// one cadence point: requested (l, p) norms for both fields, then the
// aggregate diagnostics.  Aggregates are already time-weighted functionals,
// so the same value fills both value columns.
void record_rows(NormSeries& out, const SimJob& job, const State& st) {
    const int d = st.grid().dim;
    const double t = std::expm1(st.tau);
    auto push = [&](const char* q, double ell, double p, double resc,
                    double phys) {
        out.rows.push_back({st.tau, t, q, ell, p, resc, phys});
    };

    for (double ell : job.ells)
        for (double p : job.ps) {
            double factor = physical_factor(d, ell, p, st.tau);
            double rn = rescaled_norm(st.N, ell, p);
            double rw = rescaled_norm(st.W, ell, p);
            push("n", ell, p, rn, rn * factor);
            push("w", ell, p, rw, rw * factor);
        }

    double m = mass(st);
    push("mass", 0.0, 2.0, m, m);
    double x = compute_X(st, job.s, job.params.sigma, job.params.system);
    push("X", job.s, 2.0, x, x);
    double z = compute_Z(st, job.s, job.params.sigma, job.params.system);
    push("Z", job.s, 2.0, z, z);

    if (job.params.system == SystemKind::pressured) {
        double gt = job.params.gamma_tilde();
        try {
            double w = compute_W(st, job.s, job.params.sigma, gt);
            push("W", job.s, 2.0, w, w);
        } catch (const config_error&) {
            // outside the functional's (gamma, s) domain; skip the row
        }
        try {
            int k0 = k0_index(job.params.sigma, job.s);
            for (int k = 1; k <= k0; ++k) {
                double wk = compute_Wk(st, job.s, job.params.sigma, gt, k);
                push("Wk", double(k), 2.0, wk, wk);
            }
        } catch (const config_error&) {
            // no admissible iteration index at this (sigma, s)
        }
    }
}

//------------------------------------------------------------------------------
// csv round-trip helpers
//------------------------------------------------------------------------------

double parse_csv_number(const std::string& field, std::size_t line) {
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw config_error("norm series csv: bad number \"" + field +
                           "\" on line " + std::to_string(line));
    return v;
}

// a thread-pool size honoring the RIESZ_LAB_THREADS cap
int pool_workers(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    int w = hw == 0 ? 1 : int(hw);
    if (const char* env = std::getenv("RIESZ_LAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) w = std::min(w, cap);
    }
    return int(std::min<std::size_t>(std::size_t(w), jobs));
}

//------------------------------------------------------------------------------
// simulate
//------------------------------------------------------------------------------

const char* outcome_name(RunOutcome o) {
    switch (o) {
        case RunOutcome::completed: return "completed";
        case RunOutcome::blowup: return "blowup";
        case RunOutcome::step_error: return "step_error";
    }
    return "unknown";
}

int simulate_one(const SimJob& job, const fs::path& out_dir,
                 const std::string& format, bool verbose) {
    fs::create_directories(out_dir);
    RunResult result;
    NormSeries series = run_sim_job(
        job, result, job.snapshot_cadence > 0 ? out_dir : fs::path{});

    std::string norms_name = format == "json" ? "norms.json" : "norms.csv";
    {
        auto os = open_out(out_dir / norms_name, true);
        if (format == "json")
            write_norm_series_json(series, os);
        else
            write_norm_series_csv(series, os);
    }

    json outcome = {
        {"status", outcome_name(result.outcome)},
        {"steps", result.steps},
        {"max_clamp_fraction", result.max_clamp_fraction},
        {"clamp_warning", result.clamp_warning},
    };
    if (result.outcome != RunOutcome::completed) {
        outcome["breakdown_tau"] = result.breakdown_tau;
        outcome["breakdown_reason"] = result.breakdown_reason;
    }
    write_manifest(out_dir, "simulate", sim_job_to_json(job),
                   {{"norms", norms_name}}, outcome);

    if (verbose) {
        std::cout << "simulate: " << outcome_name(result.outcome)
                  << " steps=" << result.steps << " -> "
                  << (out_dir / norms_name).string() << "\n";
        if (result.clamp_warning)
            std::cout << "simulate: warning: clamp fraction reached "
                      << fmt(result.max_clamp_fraction) << "\n";
    }
    return result.outcome == RunOutcome::completed ? kExitOk : kExitBlowup;
}

int run_sweep(const RunOptions& opt) {
    json base = load_json_file(opt.config);
    json sweep = load_json_file(opt.sweep);
    expect_object(sweep, "sweep spec");
    expect_keys(sweep, "sweep spec", {"runs"});
    if (!sweep.contains("runs") || !sweep.at("runs").is_array() ||
        sweep.at("runs").empty())
        throw config_error("sweep spec needs a non-empty \"runs\" array");

    // resolve every run up front so config errors surface before any output
    std::vector<SimJob> jobs;
    for (const json& over : sweep.at("runs")) {
        expect_object(over, "sweep run override");
        json merged = base;
        merged.merge_patch(over);
        SimJob job = sim_job_from_json(merged);
        if (opt.seed) job.initial.seed = *opt.seed;
        jobs.push_back(std::move(job));
    }

    fs::create_directories(opt.out);
    std::vector<int> codes(jobs.size(), kExitOk);
    std::vector<std::string> dirs(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        dirs[i] = name;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                codes[i] =
                    simulate_one(jobs[i], opt.out / dirs[i], opt.format, false);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    int workers = pool_workers(jobs.size());
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    json runs = json::array();
    int rc = kExitOk;
    int flagged = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        runs.push_back({{"dir", dirs[i]}, {"exit", codes[i]}});
        rc = std::max(rc, codes[i]);
        flagged += codes[i] != kExitOk;
    }
    write_manifest(opt.out, "simulate-sweep",
                   {{"base", base}, {"sweep", sweep}}, {{"runs", runs}},
                   {{"status", rc == kExitOk ? "completed" : "partial"},
                    {"flagged", flagged}});
    std::cout << "sweep: " << jobs.size() << " runs, " << flagged
              << " flagged, workers=" << workers << "\n";
    return rc;
}

//------------------------------------------------------------------------------
// fit
//------------------------------------------------------------------------------

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    return s;
}

void write_decay_csv(const DecayReport& rep, std::ostream& os) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    os << "quantity,l,p,predicted_rescaled,predicted_physical,exact_law,"
          "fitted_rate,r2,sharpness,near_boundary,verdict\n";
    for (const DecayRow& r : rep.rows) {
        double pr = r.has_prediction ? r.predicted.rescaled : nan;
        double pp = r.has_prediction ? r.predicted.physical : nan;
        double fitted = r.fitted_ok ? r.fitted_rate : nan;
        os << r.quantity << ',' << fmt(r.ell) << ',' << fmt(r.p) << ','
           << fmt(pr) << ',' << fmt(pp) << ',' << (r.exact_law ? 1 : 0) << ','
           << fmt(fitted) << ',' << fmt(r.r2) << ',' << fmt(r.sharpness) << ','
           << (r.near_boundary ? 1 : 0) << ',' << csv_safe(r.verdict) << '\n';
    }
}

void print_decay_table(const DecayReport& rep, std::ostream& os) {
    os << "quantity      l       p  predicted   fitted      r2       verdict\n";
    for (const DecayRow& r : rep.rows) {
        char line[160];
        std::string predicted =
            r.has_prediction ? fmt(r.predicted.rescaled).substr(0, 9) : "-";
        std::string fitted =
            r.fitted_ok ? fmt(r.fitted_rate).substr(0, 9) : "-";
        std::snprintf(line, sizeof line, "%-10s %6g %7g  %-10s %-10s %-8.5f %s\n",
                      r.quantity.c_str(), r.ell, r.p, predicted.c_str(),
                      fitted.c_str(), r.r2, r.verdict.c_str());
        os << line;
    }
    os << (rep.all_pass ? "fit: all rows pass\n" : "fit: FAIL\n");
}

int cmd_fit_impl(const RunOptions& opt) {
    if (opt.config.empty())
        throw config_error("fit requires --config pointing at a simulate "
                           "manifest");
    json m = load_json_file(opt.config);
    expect_object(m, "manifest");
    if (get_string(m, "subcommand", "") != "simulate")
        throw config_error("fit expects a manifest written by simulate");
    if (!m.contains("config"))
        throw config_error("manifest carries no config echo");
    SimJob job = sim_job_from_json(m.at("config"));

    std::string status =
        m.contains("outcome") ? get_string(m.at("outcome"), "status", "") : "";
    if (status != "completed")
        throw config_error("fit requires a completed run; manifest reports \"" +
                           status + "\"");

    std::string norms_name =
        m.contains("outputs") ? get_string(m.at("outputs"), "norms", "norms.csv")
                              : "norms.csv";
    if (norms_name.size() >= 5 &&
        norms_name.substr(norms_name.size() - 5) == ".json")
        throw config_error("fit reads csv norm series; re-run simulate with "
                           "--format csv");
    NormSeries series =
        read_norm_series_csv(opt.config.parent_path() / norms_name);

    double tol = opt.tol.value_or(0.1);
    DecayReport rep =
        decay_report(series, job.params, job.grid.dim, job.s, tol);

    fs::create_directories(opt.out);
    {
        auto os = open_out(opt.out / "decay.csv", true);
        write_decay_csv(rep, os);
    }
    write_manifest(opt.out, "fit",
                   {{"manifest", opt.config.string()},
                    {"tol", tol},
                    {"window_fraction", rep.window_fraction},
                    {"sim", sim_job_to_json(job)}},
                   {{"decay", "decay.csv"}}, {{"all_pass", rep.all_pass}});
    print_decay_table(rep, std::cout);
    return rep.all_pass ? kExitOk : kExitVerification;
}

//------------------------------------------------------------------------------
// burgers-verify
//------------------------------------------------------------------------------

int cmd_burgers_impl(const RunOptions& opt) {
    int dim = 1;
    int n = 512;
    double epsilon = 0.2;
    std::string preset = "sine";
    std::vector<double> times;
    std::vector<double> ells{1.0};
    double growth_tol = 0.05;

    if (!opt.config.empty()) {
        json j = load_json_file(opt.config);
        expect_object(j, "burgers-verify config");
        expect_keys(j, "burgers-verify config",
                    {"dim", "n", "preset", "epsilon", "times", "ells",
                     "growth_tol"});
        dim = get_int(j, "dim", dim);
        n = get_int(j, "n", n);
        epsilon = get_number(j, "epsilon", epsilon);
        preset = get_string(j, "preset", preset);
        times = get_number_list(j, "times", times);
        ells = get_number_list(j, "ells", ells);
        growth_tol = get_number(j, "growth_tol", growth_tol);
    }
    if (opt.tol) growth_tol = *opt.tol;
    if (times.empty()) {
        // default horizon: log-spaced out to t = 100
        for (int k = 0; k < 25; ++k)
            times.push_back(std::expm1(std::log1p(100.0) * k / 24.0));
    }

    InitialFlow flow = InitialFlow::preset(preset, dim, epsilon);
    BackgroundReport rep = verify_background(flow, n, times, ells, growth_tol);

    fs::create_directories(opt.out);
    {
        auto os = open_out(opt.out / "background.csv", true);
        os << "t";
        for (const std::string& name : rep.names) os << ',' << name;
        os << '\n';
        for (std::size_t i = 0; i < rep.times.size(); ++i) {
            os << fmt(rep.times[i]);
            for (const std::string& name : rep.names)
                os << ',' << fmt(rep.series.at(name)[i]);
            os << '\n';
        }
    }

    json verdicts = json::array();
    for (const SeriesVerdict& v : rep.verdicts) {
        verdicts.push_back(
            {{"name", v.name}, {"growth", v.growth}, {"bounded", v.bounded}});
        std::cout << "burgers-verify: " << v.name << " growth=" << fmt(v.growth)
                  << (v.bounded ? " bounded" : " UNBOUNDED") << "\n";
    }
    std::cout << "burgers-verify: max reconstruction residual "
              << fmt(rep.max_grad_residual) << ", divergence residual "
              << fmt(rep.max_div_residual) << "\n";

    write_manifest(opt.out, "burgers-verify",
                   {{"dim", dim},
                    {"n", n},
                    {"preset", preset},
                    {"epsilon", epsilon},
                    {"times", times},
                    {"ells", ells},
                    {"growth_tol", growth_tol}},
                   {{"background", "background.csv"}},
                   {{"all_bounded", rep.all_bounded},
                    {"max_grad_residual", rep.max_grad_residual},
                    {"max_div_residual", rep.max_div_residual},
                    {"verdicts", verdicts}});
    return rep.all_bounded ? kExitOk : kExitVerification;
}

//------------------------------------------------------------------------------
// gronwall
//------------------------------------------------------------------------------

int cmd_gronwall_impl(const RunOptions& opt, const GronwallFlags& flags) {
    GronwallParams p;
    double y0 = 0.1;
    double t_end = 1e4;
    int samples = 400;

    if (!opt.config.empty()) {
        json j = load_json_file(opt.config);
        expect_object(j, "gronwall config");
        expect_keys(j, "gronwall config",
                    {"a", "c_star", "b", "c", "c_p", "y0", "t_end", "samples"});
        p.a = get_number(j, "a", p.a);
        p.c_star = get_number(j, "c_star", p.c_star);
        p.b = get_number_list(j, "b", p.b);
        p.c = get_number_list(j, "c", p.c);
        p.c_p = get_int(j, "c_p", p.c_p);
        y0 = get_number(j, "y0", y0);
        t_end = get_number(j, "t_end", t_end);
        samples = get_int(j, "samples", samples);
    }
    if (flags.a) p.a = *flags.a;
    if (flags.c_star) p.c_star = *flags.c_star;
    if (flags.y0) y0 = *flags.y0;
    p.validate();
    if (!(y0 >= 0.0) || !std::isfinite(y0))
        throw config_error("y0 must be finite and >= 0");
    if (!(t_end > 0.0)) throw config_error("t_end must be positive");
    if (samples < 2) throw config_error("samples must be >= 2");

    GronwallSeries s = integrate_inequality(p, y0, t_end, std::size_t(samples));

    bool dominated = !s.blowup;
    fs::create_directories(opt.out);
    {
        auto os = open_out(opt.out / "gronwall.csv", true);
        os << "t,Y,envelope,margin\n";
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            double env = envelope(p, y0, s.t[i]);
            double margin = env - s.y[i];
            dominated =
                dominated && s.y[i] <= env + 1e-9 * std::max(1.0, env);
            os << fmt(s.t[i]) << ',' << fmt(s.y[i]) << ',' << fmt(env) << ','
               << fmt(margin) << '\n';
        }
    }

    json outcome = {{"blowup", s.blowup}, {"dominated", dominated}};
    if (s.blowup) outcome["blowup_time"] = s.blowup_time;
    if (!s.blowup && y0 > 0.0)
        outcome["asymptotic_slope"] = asymptotic_slope(s);
    outcome["bootstrap_margin"] = bootstrap_margin(p, y0);
    write_manifest(opt.out, "gronwall",
                   {{"a", p.a},
                    {"c_star", p.c_star},
                    {"b", p.b},
                    {"c", p.c},
                    {"c_p", p.c_p},
                    {"y0", y0},
                    {"t_end", t_end},
                    {"samples", samples}},
                   {{"series", "gronwall.csv"}}, outcome);

    if (s.blowup) {
        std::cout << "gronwall: blowup at t=" << fmt(s.blowup_time) << "\n";
        return kExitBlowup;
    }
    std::cout << "gronwall: " << (dominated ? "dominated" : "ESCAPED envelope");
    if (y0 > 0.0)
        std::cout << ", asymptotic slope " << fmt(asymptotic_slope(s));
    std::cout << "\n";
    return dominated ? kExitOk : kExitVerification;
}

//------------------------------------------------------------------------------
// ineq
//------------------------------------------------------------------------------

Inequality inequality_from_string(const std::string& name) {
    for (Inequality q : kAllInequalities)
        if (name == inequality_name(q)) return q;
    throw config_error("unknown inequality \"" + name + "\"");
}

int cmd_ineq_impl(const RunOptions& opt) {
    int dim = 1;
    int n = 128;
    int count = 200;
    int band = kEnsembleBand;
    double beta = 2.5;
    std::uint64_t seed = 1;
    std::vector<Inequality> kinds(kAllInequalities.begin(),
                                  kAllInequalities.end());
    double tol = 0.20;

    if (!opt.config.empty()) {
        json j = load_json_file(opt.config);
        expect_object(j, "ineq config");
        expect_keys(j, "ineq config",
                    {"dim", "n", "count", "seed", "beta", "band", "kinds",
                     "stability_tol"});
        dim = get_int(j, "dim", dim);
        n = get_int(j, "n", n);
        count = get_int(j, "count", count);
        seed = get_uint64(j, "seed", seed);
        beta = get_number(j, "beta", beta);
        band = get_int(j, "band", band);
        tol = get_number(j, "stability_tol", tol);
        if (j.contains("kinds")) {
            const json& v = j.at("kinds");
            if (!v.is_array() || v.empty())
                throw config_error("\"kinds\" must be a non-empty array");
            kinds.clear();
            for (const json& e : v) {
                if (!e.is_string())
                    throw config_error("\"kinds\" entries must be strings");
                kinds.push_back(inequality_from_string(e.get<std::string>()));
            }
        }
    }
    if (opt.seed) seed = *opt.seed;
    if (opt.tol) tol = *opt.tol;
    if (!(tol > 0.0)) throw config_error("stability tolerance must be > 0");

    Grid coarse(dim, n, 2.0 * M_PI);
    Grid refined(dim, 2 * n, 2.0 * M_PI);
    fs::create_directories(opt.out);

    auto summary = open_out(opt.out / "summary.csv", true);
    summary << "inequality,max_ratio,p95,refined_max_ratio,stability_delta\n";
    json outputs = {{"summary", "summary.csv"}};
    json per_kind = json::array();
    bool stable = true;
    for (Inequality q : kinds) {
        EnsembleReport base = run_ensemble(q, coarse, count, seed, beta, band);
        EnsembleReport fine = run_ensemble(q, refined, count, seed, beta, band);
        double delta;
        if (base.max_ratio > 0.0)
            delta = std::abs(fine.max_ratio - base.max_ratio) / base.max_ratio;
        else
            delta = fine.max_ratio > 0.0
                        ? std::numeric_limits<double>::infinity()
                        : 0.0;
        bool ok = delta < tol;
        stable = stable && ok;

        std::string name = inequality_name(q);
        {
            auto os = open_out(opt.out / ("ineq_" + name + ".csv"), true);
            os << "member,ratio\n";
            for (std::size_t i = 0; i < base.ratios.size(); ++i)
                os << i << ',' << fmt(base.ratios[i]) << '\n';
        }
        outputs[name] = "ineq_" + name + ".csv";
        summary << name << ',' << fmt(base.max_ratio) << ',' << fmt(base.p95)
                << ',' << fmt(fine.max_ratio) << ',' << fmt(delta) << '\n';
        per_kind.push_back({{"inequality", name},
                            {"max_ratio", base.max_ratio},
                            {"p95", base.p95},
                            {"refined_max_ratio", fine.max_ratio},
                            {"stability_delta", delta}});
        std::cout << "ineq: " << name << " max=" << fmt(base.max_ratio)
                  << " p95=" << fmt(base.p95) << " delta=" << fmt(delta)
                  << (ok ? "" : " UNSTABLE") << "\n";
    }
    summary.close();

    json kinds_echo = json::array();
    for (Inequality q : kinds) kinds_echo.push_back(inequality_name(q));
    write_manifest(opt.out, "ineq",
                   {{"dim", dim},
                    {"n", n},
                    {"count", count},
                    {"seed", seed},
                    {"beta", beta},
                    {"band", band},
                    {"kinds", kinds_echo},
                    {"stability_tol", tol}},
                   outputs, {{"stable", stable}, {"report", per_kind}});
    return stable ? kExitOk : kExitVerification;
}

// map the exception taxonomy onto process exit codes
int dispatch(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const blowup_error& e) {
        std::cerr << "blowup: " << e.what() << " (at " << fmt(e.when) << ")\n";
        return kExitBlowup;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace

//------------------------------------------------------------------------------
// public surface
//------------------------------------------------------------------------------

std::string tool_version() { return "0.1.0"; }

void SimJob::validate() const {
    grid.validate();
    if (norm_cadence < 1) throw config_error("norm_cadence must be >= 1");
    if (snapshot_cadence < 0)
        throw config_error("snapshot_cadence must be >= 0");
    if (ells.empty()) throw config_error("ells must not be empty");
    for (double ell : ells)
        if (!std::isfinite(ell))
            throw config_error("ells entries must be finite");
    if (ps.empty()) throw config_error("ps must not be empty");
    for (double p : ps)
        if (!(p >= 1.0))
            throw config_error("ps entries must be >= 1 (or \"inf\")");
    if (!std::isfinite(s) || s < 0.0)
        throw config_error("s must be finite and >= 0");
    if (!(solver.dtau > 0.0)) throw config_error("dtau must be positive");
    if (!(solver.tau_end > 0.0)) throw config_error("tau_end must be positive");
    if (!(solver.cfl_limit > 0.0))
        throw config_error("cfl_limit must be positive");
    if (!(solver.clamp_tol >= 0.0))
        throw config_error("clamp_tol must be >= 0");
}

SimJob parse_sim_job(const std::string& json_text) {
    return sim_job_from_json(parse_json_text(json_text, "simulation config"));
}

SimJob load_sim_job(const std::filesystem::path& path) {
    return sim_job_from_json(load_json_file(path));
}

void write_norm_series_csv(const NormSeries& series, std::ostream& os) {
    os << kNormHeader << '\n';
    for (const NormRow& r : series.rows)
        os << fmt(r.tau) << ',' << fmt(r.t) << ',' << r.quantity << ','
           << fmt(r.ell) << ',' << fmt(r.p) << ',' << fmt(r.rescaled) << ','
           << fmt(r.physical) << '\n';
}

void write_norm_series_json(const NormSeries& series, std::ostream& os) {
    json rows = json::array();
    for (const NormRow& r : series.rows)
        rows.push_back({{"tau", r.tau},
                        {"t", r.t},
                        {"quantity", r.quantity},
                        {"l", r.ell},
                        {"p", r.p},
                        {"rescaled_value", r.rescaled},
                        {"physical_value", r.physical}});
    os << rows.dump(2) << "\n";
}

NormSeries read_norm_series_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw config_error("norm series csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kNormHeader)
        throw config_error("norm series csv: unexpected header \"" + line +
                           "\"");
    NormSeries out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(
                start, comma == std::string::npos ? comma : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 7)
            throw config_error("norm series csv: expected 7 fields on line " +
                               std::to_string(lineno));
        NormRow r;
        r.tau = parse_csv_number(fields[0], lineno);
        r.t = parse_csv_number(fields[1], lineno);
        r.quantity = fields[2];
        r.ell = parse_csv_number(fields[3], lineno);
        r.p = parse_csv_number(fields[4], lineno);
        r.rescaled = parse_csv_number(fields[5], lineno);
        r.physical = parse_csv_number(fields[6], lineno);
        out.rows.push_back(std::move(r));
    }
    out.validate();
    return out;
}

NormSeries read_norm_series_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open " + path.string());
    return read_norm_series_csv(is);
}

NormSeries run_sim_job(const SimJob& job, RunResult& result,
                       const std::filesystem::path& snapshot_dir) {
    job.params.validate(job.grid.dim);
    job.initial.validate();
    job.validate();

    State st = make_initial_state(job.grid, job.initial);
    NormSeries series;
    std::size_t last_recorded = std::size_t(-1);
    int snap_index = 0;
    auto observer = [&](const State& s, std::size_t step) {
        if (step % std::size_t(job.norm_cadence) == 0) {
            record_rows(series, job, s);
            last_recorded = step;
        }
        if (!snapshot_dir.empty() && job.snapshot_cadence > 0 &&
            step % std::size_t(job.snapshot_cadence) == 0)
            write_snapshot(s, snapshot_dir, snap_index++);
    };
    result = simulate(job.params, st, job.solver, observer);

    if (result.outcome == RunOutcome::completed) {
        if (last_recorded != result.steps) record_rows(series, job, st);
    } else {
        // terminal marker row: non-finite values at the breakdown time
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        series.rows.push_back({result.breakdown_tau,
                               std::expm1(result.breakdown_tau), "marker", 0.0,
                               0.0, nan, nan});
    }
    series.validate();
    return series;
}

int cmd_simulate(const RunOptions& opt) {
    if (opt.config.empty()) throw config_error("simulate requires --config");
    if (!opt.sweep.empty()) return run_sweep(opt);
    SimJob job = load_sim_job(opt.config);
    if (opt.seed) job.initial.seed = *opt.seed;
    return simulate_one(job, opt.out, opt.format, true);
}

int cmd_fit(const RunOptions& opt) { return cmd_fit_impl(opt); }

int cmd_burgers_verify(const RunOptions& opt) { return cmd_burgers_impl(opt); }

int cmd_gronwall(const RunOptions& opt, const GronwallFlags& flags) {
    return cmd_gronwall_impl(opt, flags);
}

int cmd_ineq(const RunOptions& opt) { return cmd_ineq_impl(opt); }

int run(int argc, const char* const* argv) {
    CLI::App app{"pseudo-spectral workbench for Euler flows with Riesz "
                 "interaction"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    RunOptions opt;
    GronwallFlags gflags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON config file");
        sub->add_option("--out", opt.out, "output directory (default .)");
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--tol", opt.tol, "subcommand tolerance override");
        return sub;
    };

    CLI::App* sim = add_common(
        app.add_subcommand("simulate", "march a configured model run"));
    sim->add_option("--sweep", opt.sweep,
                    "fan-out spec processed on a worker pool");
    add_common(app.add_subcommand(
        "fit", "fit decay exponents from a simulate manifest"));
    add_common(app.add_subcommand("burgers-verify",
                                  "background flow boundedness study"));
    CLI::App* gro = add_common(app.add_subcommand(
        "gronwall", "integrate the certified decay inequality"));
    gro->add_option("--a", gflags.a, "linear decay strength");
    gro->add_option("--cstar", gflags.c_star, "nonlinearity scale");
    gro->add_option("--y0", gflags.y0, "initial datum");
    add_common(app.add_subcommand(
        "ineq", "randomized ratio study for the inequality suite"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (app.got_subcommand("simulate"))
        return dispatch([&] { return cmd_simulate(opt); });
    if (app.got_subcommand("fit"))
        return dispatch([&] { return cmd_fit(opt); });
    if (app.got_subcommand("burgers-verify"))
        return dispatch([&] { return cmd_burgers_verify(opt); });
    if (app.got_subcommand("gronwall"))
        return dispatch([&] { return cmd_gronwall(opt, gflags); });
    if (app.got_subcommand("ineq"))
        return dispatch([&] { return cmd_ineq(opt); });
    return kExitConfig;
}

}  // namespace rieszlab
