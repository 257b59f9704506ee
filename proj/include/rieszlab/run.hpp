#pragma once
//------------------------------------------------------------------------------
// pipeline layer: config files in, reports out
//
// Every subcommand follows the same shape: a JSON config (strict -- unknown
// keys are hard errors) resolved against flag overrides, a deterministic
// run, and a set of artifacts under --out.  Artifacts are CSV (or JSON with
// --format json) plus a manifest.json that echoes the fully resolved config
// and the tool version.  The manifest is the only artifact that carries a
// timestamp: re-running with the same manifest settings must reproduce every
// CSV byte for byte.
//
// Norm series CSV contract (header is pinned, values are %.17g):
//   tau,t,quantity,l,p,rescaled_value,physical_value
//------------------------------------------------------------------------------

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rieszlab/diagnostics.hpp"
#include "rieszlab/model.hpp"
#include "rieszlab/solver.hpp"

namespace rieszlab {

std::string tool_version();

//------------------------------------------------------------------------------
// resolved simulation job
//------------------------------------------------------------------------------

struct SimJob {
    ModelParams params;
    Grid grid{1, 8, 2.0 * M_PI};
    SolverConfig solver;
    InitialDataSpec initial;
    std::vector<double> ells{0.0, 1.0, 2.0};
    std::vector<double> ps{2.0};       // lp_infinity encodes the sup norm
    double s = 2.5;                    // order used by aggregate diagnostics
    int norm_cadence = 25;             // record norms every this many steps
    int snapshot_cadence = 0;          // 0 disables field snapshots

    void validate() const;
};

// parse + validate a simulation config file / already-parsed JSON text
SimJob load_sim_job(const std::filesystem::path& path);
SimJob parse_sim_job(const std::string& json_text);

//------------------------------------------------------------------------------
// norm series round-trip
//------------------------------------------------------------------------------

void write_norm_series_csv(const NormSeries& series, std::ostream& os);
void write_norm_series_json(const NormSeries& series, std::ostream& os);
NormSeries read_norm_series_csv(std::istream& is);
NormSeries read_norm_series_csv(const std::filesystem::path& path);

// march one job to tau_end, recording norms and aggregate diagnostics at the
// configured cadence; on blowup the series ends with the marker row.  When
// snapshot_dir is non-empty, field snapshots (flat float64 + JSON sidecar)
// are written there at the snapshot cadence.
NormSeries run_sim_job(const SimJob& job, RunResult& result,
                       const std::filesystem::path& snapshot_dir = {});

//------------------------------------------------------------------------------
// subcommand drivers
//------------------------------------------------------------------------------

// options shared by every subcommand; tol falls back to a per-subcommand
// default (fit 0.1, burgers-verify 0.05, ineq 0.20)
struct RunOptions {
    std::filesystem::path config;        // empty = subcommand defaults
    std::filesystem::path out = ".";
    std::string format = "csv";          // csv | json
    std::optional<std::uint64_t> seed;   // overrides the config seed
    std::optional<double> tol;
    std::filesystem::path sweep;         // simulate only: fan-out spec
};

// gronwall accepts its three headline scalars directly on the command line
struct GronwallFlags {
    std::optional<double> a;
    std::optional<double> c_star;
    std::optional<double> y0;
};

int cmd_simulate(const RunOptions& opt);
int cmd_fit(const RunOptions& opt);
int cmd_burgers_verify(const RunOptions& opt);
int cmd_gronwall(const RunOptions& opt, const GronwallFlags& flags);
int cmd_ineq(const RunOptions& opt);

// full argv entry point used by the installed binary and the tests; returns
// the process exit code (0 ok, 1 config, 2 blowup, 3 verification failure,
// 4 internal numeric error)
int run(int argc, const char* const* argv);

}  // namespace rieszlab
