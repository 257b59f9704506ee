//------------------------------------------------------------------------------
// pipeline layer: strict configs, pinned CSV contracts, exit codes,
// byte-level determinism.  The command line is exercised in-process through
// run(), which is the exact entry point of the installed binary.
//------------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rieszlab/errors.hpp"
#include "rieszlab/model.hpp"
#include "rieszlab/run.hpp"

using namespace rieszlab;
namespace fs = std::filesystem;

namespace {

int call_cli(const std::vector<std::string>& args) {
    std::vector<std::string> storage;
    storage.push_back("rieszlab");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& s : storage) argv.push_back(s.c_str());
    return run(int(argv.size()), argv.data());
}

// fresh scratch directory per test case
fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("rieszlab_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    REQUIRE(bool(os));
    os << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(bool(is));
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kSmallRun = R"({
  "system": "pressureless",
  "sigma": 0.5,
  "dim": 1,
  "n": 64,
  "dtau": 0.005,
  "tau_end": 4.0,
  "s": 2.5,
  "norm_cadence": 20,
  "ells": [0, 1],
  "ps": [2],
  "initial": {"n_amplitude": 0.01, "support_fraction": 0.5}
})";

}  // anonymous namespace

//------------------------------------------------------------------------------

TEST_CASE("norm series csv round-trips every column bit for bit") {
    NormSeries series;
    series.rows.push_back({0.0, 0.0, "n", 0.0, 2.0, 0.125, 0.125});
    series.rows.push_back(
        {0.3, 0.34985880757600316, "n", 0.0, 2.0, 1.0 / 3.0, 0.7071067811865476});
    series.rows.push_back({0.0, 0.0, "w", 1.5, lp_infinity, 1e-300, 2.5e17});

    std::ostringstream os;
    write_norm_series_csv(series, os);
    std::string text = os.str();

    // pinned header, exactly
    CHECK(text.substr(0, text.find('\n')) ==
          "tau,t,quantity,l,p,rescaled_value,physical_value");

    std::istringstream is(text);
    NormSeries back = read_norm_series_csv(is);
    REQUIRE(back.rows.size() == series.rows.size());
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        CHECK(back.rows[i].tau == series.rows[i].tau);
        CHECK(back.rows[i].t == series.rows[i].t);
        CHECK(back.rows[i].quantity == series.rows[i].quantity);
        CHECK(back.rows[i].ell == series.rows[i].ell);
        CHECK(back.rows[i].p == series.rows[i].p);
        CHECK(back.rows[i].rescaled == series.rows[i].rescaled);
        CHECK(back.rows[i].physical == series.rows[i].physical);
    }
}

TEST_CASE("norm series reader rejects malformed input") {
    auto read = [](const std::string& text) {
        std::istringstream is(text);
        return read_norm_series_csv(is);
    };
    CHECK_THROWS_AS(read(""), config_error);
    CHECK_THROWS_AS(read("tau,t,quantity\n"), config_error);
    CHECK_THROWS_AS(
        read("tau,t,quantity,l,p,rescaled_value,physical_value\n1,2,n,0\n"),
        config_error);
    CHECK_THROWS_AS(
        read("tau,t,quantity,l,p,rescaled_value,physical_value\n"
             "0,0,n,0,2,abc,0\n"),
        config_error);
    // non-monotone tau for one quantity violates the series invariant
    CHECK_THROWS_AS(
        read("tau,t,quantity,l,p,rescaled_value,physical_value\n"
             "1,1.718,n,0,2,1,1\n"
             "0.5,0.648,n,0,2,1,1\n"),
        numeric_error);
}

TEST_CASE("simulation config parsing is strict and fills defaults") {
    SimJob job = parse_sim_job(kSmallRun);
    CHECK(job.params.system == SystemKind::pressureless);
    CHECK(job.params.lambda == -1.0);
    CHECK(job.params.sigma == 0.5);
    CHECK(job.grid.dim == 1);
    CHECK(job.grid.n == 64);
    CHECK(job.grid.L == doctest::Approx(2.0 * M_PI));
    CHECK(job.solver.cfl_limit == 0.5);      // default
    CHECK(job.solver.clamp_tol == 1e-8);     // default
    CHECK(job.snapshot_cadence == 0);        // default
    CHECK(job.ells == std::vector<double>{0.0, 1.0});

    // unknown keys anywhere are hard errors
    CHECK_THROWS_AS(
        parse_sim_job(R"({"system":"pressureless","dim":1,"n":64,"zz":1})"),
        config_error);
    CHECK_THROWS_AS(parse_sim_job(R"({"system":"pressureless","dim":1,"n":64,
                                      "initial":{"amp":1}})"),
                    config_error);
    // required keys, value domains, type checks
    CHECK_THROWS_AS(parse_sim_job(R"({"dim":1,"n":64})"), config_error);
    CHECK_THROWS_AS(parse_sim_job(R"({"system":"magnetic","dim":1,"n":64})"),
                    config_error);
    CHECK_THROWS_AS(parse_sim_job(R"({"system":"pressureless","dim":1,"n":65})"),
                    config_error);
    CHECK_THROWS_AS(
        parse_sim_job(R"({"system":"pressureless","dim":1,"n":64,"dtau":"x"})"),
        config_error);
    CHECK_THROWS_AS(
        parse_sim_job(R"({"system":"pressureless","dim":1,"n":64,"ps":[0.5]})"),
        config_error);
    CHECK_THROWS_AS(parse_sim_job("not json"), config_error);

    // the sup norm spells "inf" in configs
    SimJob sup = parse_sim_job(
        R"({"system":"pressureless","dim":1,"n":64,"ps":[2,"inf"]})");
    REQUIRE(sup.ps.size() == 2);
    CHECK(sup.ps[1] == lp_infinity);
}

TEST_CASE("zero data: exit 0 and an all-zero norm series") {
    fs::path dir = scratch("zero");
    write_file(dir / "zero.json", R"({
      "system": "pressureless", "dim": 1, "n": 64,
      "dtau": 0.01, "tau_end": 0.5,
      "initial": {"n_amplitude": 0.0, "w_amplitude": 0.0}
    })");
    int rc = call_cli({"simulate", "--config", (dir / "zero.json").string(),
                       "--out", (dir / "out").string()});
    CHECK(rc == 0);

    NormSeries series = read_norm_series_csv(dir / "out" / "norms.csv");
    REQUIRE(!series.rows.empty());
    for (const NormRow& r : series.rows) {
        CHECK(r.rescaled == 0.0);
        CHECK(r.physical == 0.0);
    }
    CHECK(fs::exists(dir / "out" / "manifest.json"));

    // manifest echoes the resolved config, defaults included
    std::string manifest = read_file(dir / "out" / "manifest.json");
    CHECK(manifest.find("\"norm_cadence\"") != std::string::npos);
    CHECK(manifest.find("\"cfl_limit\"") != std::string::npos);
    CHECK(manifest.find("\"version\"") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical; the seed override is not") {
    fs::path dir = scratch("determinism");
    write_file(dir / "run.json", R"({
      "system": "pressureless", "dim": 1, "n": 64,
      "dtau": 0.005, "tau_end": 1.0, "norm_cadence": 10,
      "initial": {"n_amplitude": 0.01, "noise_amplitude": 0.004,
                  "noise_band": 4, "seed": 3}
    })");
    auto go = [&](const std::string& out, std::vector<std::string> extra) {
        std::vector<std::string> args{"simulate", "--config",
                                      (dir / "run.json").string(), "--out",
                                      (dir / out).string()};
        args.insert(args.end(), extra.begin(), extra.end());
        REQUIRE(call_cli(args) == 0);
        return read_file(dir / out / "norms.csv");
    };
    std::string first = go("a", {});
    std::string second = go("b", {});
    CHECK(first == second);
    CHECK(first.find("nan") == std::string::npos);

    std::string reseeded = go("c", {"--seed", "12345"});
    CHECK(reseeded != first);
}

TEST_CASE("simulate records the aggregate diagnostics alongside the norms") {
    fs::path dir = scratch("aggregates");
    write_file(dir / "run.json", kSmallRun);
    REQUIRE(call_cli({"simulate", "--config", (dir / "run.json").string(),
                      "--out", (dir / "out").string()}) == 0);
    NormSeries series = read_norm_series_csv(dir / "out" / "norms.csv");

    bool saw_mass = false, saw_x = false, saw_z = false;
    double mass_first = 0.0, mass_last = 0.0;
    for (const NormRow& r : series.rows) {
        if (r.quantity == "mass") {
            if (!saw_mass) mass_first = r.physical;
            mass_last = r.physical;
            saw_mass = true;
        }
        saw_x = saw_x || r.quantity == "X";
        saw_z = saw_z || r.quantity == "Z";
    }
    CHECK(saw_mass);
    CHECK(saw_x);
    CHECK(saw_z);
    // the recorded mass series is the conserved physical invariant
    CHECK(mass_last ==
          doctest::Approx(mass_first).epsilon(1e-6));
}

TEST_CASE("simulate then fit reproduces the exact density rate") {
    fs::path dir = scratch("fit");
    write_file(dir / "run.json", kSmallRun);
    REQUIRE(call_cli({"simulate", "--config", (dir / "run.json").string(),
                      "--out", (dir / "out").string()}) == 0);
    int rc = call_cli({"fit", "--config",
                       (dir / "out" / "manifest.json").string(), "--out",
                       (dir / "fit").string()});
    CHECK(rc == 0);

    // the pressureless density row at l = 0 obeys the exact mass law
    std::string decay = read_file(dir / "fit" / "decay.csv");
    CHECK(decay.substr(0, decay.find('\n')) ==
          "quantity,l,p,predicted_rescaled,predicted_physical,exact_law,"
          "fitted_rate,r2,sharpness,near_boundary,verdict");
    std::istringstream is(decay);
    std::string line;
    std::getline(is, line);
    bool found = false;
    while (std::getline(is, line)) {
        if (line.rfind("n,0,2,", 0) != 0) continue;
        found = true;
        // fitted_rate is the seventh field
        std::istringstream fields(line);
        std::string f;
        for (int i = 0; i < 7; ++i) std::getline(fields, f, ',');
        double fitted = std::strtod(f.c_str(), nullptr);
        CHECK(fitted == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(line.find("pass") != std::string::npos);
    }
    CHECK(found);

    // fit without a completed manifest is a config error
    CHECK(call_cli({"fit", "--config", (dir / "missing.json").string()}) == 1);
}

TEST_CASE("blowup exits with code 2 and a terminal marker row") {
    fs::path dir = scratch("blowup");
    // velocity amplitude far past the CFL budget trips the guard immediately
    write_file(dir / "run.json", R"({
      "system": "pressureless", "dim": 1, "n": 64,
      "dtau": 0.01, "tau_end": 1.0, "norm_cadence": 1,
      "initial": {"n_amplitude": 0.01, "w_amplitude": 50.0}
    })");
    int rc = call_cli({"simulate", "--config", (dir / "run.json").string(),
                       "--out", (dir / "out").string()});
    CHECK(rc == 2);

    std::string csv = read_file(dir / "out" / "norms.csv");
    CHECK(csv.find("marker") != std::string::npos);
    CHECK(csv.find("nan") != std::string::npos);
    NormSeries series = read_norm_series_csv(dir / "out" / "norms.csv");
    CHECK(series.rows.back().quantity == "marker");

    std::string manifest = read_file(dir / "out" / "manifest.json");
    CHECK(manifest.find("breakdown_tau") != std::string::npos);
}

TEST_CASE("exit codes map the failure taxonomy") {
    fs::path dir = scratch("codes");
    // unknown subcommand / flag parse problems are config errors
    CHECK(call_cli({"frobnicate"}) == 1);
    CHECK(call_cli({"simulate"}) == 1);   // --config missing
    // strict key rejection
    write_file(dir / "bad.json",
               R"({"system":"pressureless","dim":1,"n":64,"oops":true})");
    CHECK(call_cli({"simulate", "--config", (dir / "bad.json").string(),
                    "--out", (dir / "o").string()}) == 1);
    // hypothesis violations in the inequality parameters
    CHECK(call_cli({"gronwall", "--a", "0.5", "--out",
                    (dir / "g").string()}) == 1);
    // trajectory escape past the cap
    CHECK(call_cli({"gronwall", "--a", "2", "--cstar", "1", "--y0", "50",
                    "--out", (dir / "gb").string()}) == 2);
    // verification failure: an impossible growth tolerance
    CHECK(call_cli({"burgers-verify", "--tol", "1e-9", "--out",
                    (dir / "bv").string()}) == 3);
}

TEST_CASE("gronwall zero datum stays identically zero") {
    fs::path dir = scratch("gronwall_zero");
    int rc = call_cli({"gronwall", "--a", "2", "--cstar", "1", "--y0", "0",
                       "--out", dir.string()});
    CHECK(rc == 0);

    std::istringstream is(read_file(dir / "gronwall.csv"));
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,Y,envelope,margin");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string t, y;
        std::getline(fields, t, ',');
        std::getline(fields, y, ',');
        CHECK(y == "0");
    }
    CHECK(rows >= 100);
}

TEST_CASE("snapshots carry the initial fields verbatim") {
    fs::path dir = scratch("snapshots");
    write_file(dir / "run.json", R"({
      "system": "pressureless", "dim": 1, "n": 64,
      "dtau": 0.01, "tau_end": 0.2, "norm_cadence": 5,
      "snapshot_cadence": 10,
      "initial": {"n_amplitude": 0.01, "support_fraction": 0.5}
    })");
    REQUIRE(call_cli({"simulate", "--config", (dir / "run.json").string(),
                      "--out", (dir / "out").string()}) == 0);

    fs::path bin = dir / "out" / "snap_0000.bin";
    REQUIRE(fs::exists(bin));
    // 1-D: density plus one velocity component, 64 samples each
    CHECK(fs::file_size(bin) == 2u * 64u * sizeof(double));

    SimJob job = load_sim_job(dir / "run.json");
    State st = make_initial_state(job.grid, job.initial);
    std::ifstream is(bin, std::ios::binary);
    std::vector<double> stored(64);
    is.read(reinterpret_cast<char*>(stored.data()),
            std::streamsize(stored.size() * sizeof(double)));
    REQUIRE(bool(is));
    for (std::size_t i = 0; i < stored.size(); ++i)
        CHECK(stored[i] == st.N.v[i]);

    std::string sidecar = read_file(dir / "out" / "snap_0000.json");
    CHECK(sidecar.find("\"tau\"") != std::string::npos);
    CHECK(sidecar.find("float64_le") != std::string::npos);
}

TEST_CASE("sweep fans out independent runs with per-run artifacts") {
    fs::path dir = scratch("sweep");
    write_file(dir / "base.json", R"({
      "system": "pressureless", "dim": 1, "n": 64,
      "dtau": 0.01, "tau_end": 0.5,
      "initial": {"n_amplitude": 0.01}
    })");
    write_file(dir / "sweep.json", R"({
      "runs": [{}, {"n": 128}, {"initial": {"n_amplitude": 0.02}}]
    })");
    setenv("RIESZ_LAB_THREADS", "2", 1);
    int rc = call_cli({"simulate", "--config", (dir / "base.json").string(),
                       "--sweep", (dir / "sweep.json").string(), "--out",
                       (dir / "out").string()});
    unsetenv("RIESZ_LAB_THREADS");
    CHECK(rc == 0);

    for (const char* sub : {"run_000", "run_001", "run_002"}) {
        CHECK(fs::exists(dir / "out" / sub / "norms.csv"));
        CHECK(fs::exists(dir / "out" / sub / "manifest.json"));
    }
    CHECK(fs::exists(dir / "out" / "manifest.json"));

    // the override landed: run_001 ran at twice the resolution
    std::string m1 = read_file(dir / "out" / "run_001" / "manifest.json");
    CHECK(m1.find("\"n\": 128") != std::string::npos);

    // a bad override is rejected before any run starts
    write_file(dir / "bad_sweep.json", R"({"runs": [{"n": 63}]})");
    CHECK(call_cli({"simulate", "--config", (dir / "base.json").string(),
                    "--sweep", (dir / "bad_sweep.json").string(), "--out",
                    (dir / "out2").string()}) == 1);
}

TEST_CASE("ineq emits per-member ratios and a stability summary") {
    fs::path dir = scratch("ineq");
    write_file(dir / "ineq.json", R"({
      "n": 64, "count": 12, "seed": 5, "band": 21,
      "kinds": ["tech1", "composition"]
    })");
    int rc = call_cli({"ineq", "--config", (dir / "ineq.json").string(),
                       "--out", (dir / "out").string()});
    CHECK(rc == 0);

    std::string summary = read_file(dir / "out" / "summary.csv");
    CHECK(summary.substr(0, summary.find('\n')) ==
          "inequality,max_ratio,p95,refined_max_ratio,stability_delta");
    CHECK(summary.find("tech1,") != std::string::npos);
    CHECK(summary.find("composition,") != std::string::npos);

    std::istringstream is(read_file(dir / "out" / "ineq_tech1.csv"));
    std::string line;
    std::getline(is, line);
    CHECK(line == "member,ratio");
    int members = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++members;
    CHECK(members == 12);

    // an unreachable stability tolerance turns into a verification failure
    CHECK(call_cli({"ineq", "--config", (dir / "ineq.json").string(), "--out",
                    (dir / "strict").string(), "--tol", "1e-12"}) == 3);
    // unknown inequality names are config errors
    write_file(dir / "bad.json", R"({"kinds": ["sobolev_trace"]})");
    CHECK(call_cli({"ineq", "--config", (dir / "bad.json").string(), "--out",
                    (dir / "b").string()}) == 1);
}

TEST_CASE("burgers-verify writes the bounded series table") {
    fs::path dir = scratch("burgers");
    write_file(dir / "b.json", R"({
      "dim": 1, "n": 256, "epsilon": 0.2, "preset": "sine",
      "ells": [1.0]
    })");
    int rc = call_cli({"burgers-verify", "--config", (dir / "b.json").string(),
                       "--out", (dir / "out").string()});
    CHECK(rc == 0);

    std::string csv = read_file(dir / "out" / "background.csv");
    std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header.rfind("t,", 0) == 0);
    CHECK(header.find("sup_K") != std::string::npos);
    CHECK(header.find("hess_v_scaled") != std::string::npos);
    std::string manifest = read_file(dir / "out" / "manifest.json");
    CHECK(manifest.find("\"all_bounded\": true") != std::string::npos);
}
