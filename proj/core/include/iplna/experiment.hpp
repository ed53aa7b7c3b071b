#pragma once

#include "iplna/data.hpp"
#include "iplna/monitor.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace iplna {

// A full experiment: architecture + learner + data source + monitor settings.
// Exactly one of csv_path / synth must be set. CSV data shorter than `steps`
// is cycled so the requested step count is always honored.
struct ExperimentConfig {
    std::string arch_spec;
    std::string learner_spec;
    MonitorConfig monitor;
    std::string csv_path;                // CSV source when non-empty
    std::optional<SyntheticSpec> synth;  // synthetic source when set
    long steps = 0;
    std::uint64_t seed = 0;
    std::string output_path;             // JSON-lines log, one report per step
    bool init_w_random = false;          // w0 ~ uniform [-0.1, 0.1) from seed+1
                                         // (default: zeros)
    double divergence_cap = 1e12;        // abort once ||w|| exceeds this

    void validate() const;
};

enum class RunStatus { clean, alarmed, diverged };

std::string to_string(RunStatus s);

// 0 clean, 2 alarmed, 3 diverged (1 is reserved for usage/IO failures).
int exit_code(RunStatus s);

struct RunSummary {
    RunStatus status = RunStatus::clean;
    long steps_run = 0;
    double final_w_norm = 0.0;
    double final_error_rms = 0.0;        // over the last 10% of executed steps
    long alarms_count = 0;
    std::optional<long> first_alarm_k;
    std::optional<double> bibs_bound_final;
};

std::string to_json_line(const RunSummary& s);

// Runs the learn-monitor loop for cfg.steps samples, writing one report line
// per step to cfg.output_path (flushed per line, so aborted runs leave valid
// prefixes). A divergence error from the learner or a state norm beyond
// divergence_cap ends the run with the diverged status; both are reported
// outcomes, not exceptions.
RunSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace iplna
