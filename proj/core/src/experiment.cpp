#include "iplna/experiment.hpp"

#include "iplna/learners.hpp"
#include "iplna/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

namespace iplna {

void ExperimentConfig::validate() const {
    if (arch_spec.empty()) throw std::invalid_argument("experiment: arch spec is required");
    if (learner_spec.empty())
        throw std::invalid_argument("experiment: learner spec is required");
    monitor.validate();
    const bool has_csv = !csv_path.empty();
    const bool has_synth = synth.has_value();
    if (has_csv == has_synth)
        throw std::invalid_argument(
            "experiment: exactly one data source (csv or synthetic) is required");
    if (has_synth) synth->validate();
    if (steps < 1) throw std::invalid_argument("experiment: steps must be >= 1");
    if (output_path.empty()) throw std::invalid_argument("experiment: output path is required");
    if (!(divergence_cap > 0.0))
        throw std::invalid_argument("experiment: divergence cap must be > 0");
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::clean: return "clean";
        case RunStatus::alarmed: return "alarmed";
        case RunStatus::diverged: return "diverged";
    }
    throw std::logic_error("to_string: unknown run status");
}

int exit_code(RunStatus s) {
    switch (s) {
        case RunStatus::clean: return 0;
        case RunStatus::alarmed: return 2;
        case RunStatus::diverged: return 3;
    }
    throw std::logic_error("exit_code: unknown run status");
}

std::string to_json_line(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["status"] = to_string(s.status);
    j["steps_run"] = s.steps_run;
    j["final_w_norm"] = s.final_w_norm;
    j["final_error_rms"] = s.final_error_rms;
    j["alarms_count"] = s.alarms_count;
    j["first_alarm_k"] = s.first_alarm_k ? nlohmann::ordered_json(*s.first_alarm_k)
                                         : nlohmann::ordered_json(nullptr);
    j["bibs_bound_final"] = s.bibs_bound_final
                                ? nlohmann::ordered_json(*s.bibs_bound_final)
                                : nlohmann::ordered_json(nullptr);
    return j.dump();
}

namespace {

double tail_rms(const std::vector<double>& errs) {
    if (errs.empty()) return 0.0;
    std::size_t tail = errs.size() / 10;
    if (tail == 0) tail = 1;
    double sq = 0.0;
    for (std::size_t i = errs.size() - tail; i < errs.size(); ++i) sq += errs[i] * errs[i];
    return std::sqrt(sq / static_cast<double>(tail));
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    const FeatureMap map = parse_arch(cfg.arch_spec);

    std::vector<Sample> samples;
    if (cfg.synth) {
        samples = generate(*cfg.synth, map, cfg.seed, cfg.steps).samples;
    } else {
        samples = ingest_csv(cfg.csv_path);
        if (samples.empty())
            throw std::invalid_argument("csv '" + cfg.csv_path + "': no data rows");
    }

    Vec w0 = Vec::Zero(static_cast<Eigen::Index>(map.output_dim()));
    if (cfg.init_w_random) {
        std::mt19937_64 gen(cfg.seed + 1);
        for (Eigen::Index i = 0; i < w0.size(); ++i) w0(i) = rng::uniform(gen, 0.1);
    }

    auto learner = make_learner(cfg.learner_spec, w0);
    StabilityMonitor monitor(cfg.monitor, learner->initial_state_norm());

    std::ofstream log(cfg.output_path);
    if (!log)
        throw std::runtime_error("log '" + cfg.output_path + "': cannot open for writing");

    RunSummary summary;
    std::vector<double> errs;
    errs.reserve(static_cast<std::size_t>(cfg.steps));

    auto note_alarm = [&](const StabilityReport& rep) {
        if (!rep.alarm) return;
        ++summary.alarms_count;
        if (!summary.first_alarm_k) summary.first_alarm_k = rep.k;
    };

    bool diverged = false;
    for (long k = 1; k <= cfg.steps; ++k) {
        const Sample& s = samples[static_cast<std::size_t>((k - 1) %
                                                           static_cast<long>(samples.size()))];
        const Vec g = map(s.x);

        Learner::Outcome out;
        try {
            out = learner->step(s.x, g, s.y, k);
        } catch (const divergence_error&) {
            // Weights are unchanged when the update itself blew up.
            const double e_pre = s.y - g.dot(learner->weights());
            const double e_log = std::isfinite(e_pre) ? e_pre : 0.0;
            const StabilityReport& rep = monitor.flag_divergence(learner->weights().norm());
            note_alarm(rep);
            log << to_json_line(rep, e_log) << '\n' << std::flush;
            errs.push_back(e_log);
            summary.steps_run = k;
            diverged = true;
            break;
        }

        const bool capped = out.w_next.norm() > cfg.divergence_cap;
        const StabilityReport& rep = monitor.observe(out.ss, out.monitored_norm, capped);
        note_alarm(rep);
        log << to_json_line(rep, out.sample.e) << '\n' << std::flush;
        errs.push_back(out.sample.e);
        summary.steps_run = k;
        if (capped) {
            diverged = true;
            break;
        }
    }

    summary.status = diverged ? RunStatus::diverged
                              : (summary.alarms_count > 0 ? RunStatus::alarmed
                                                          : RunStatus::clean);
    summary.final_w_norm = learner->weights().norm();
    summary.final_error_rms = tail_rms(errs);
    if (!monitor.history().empty())
        summary.bibs_bound_final = monitor.history().back().bibs_bound;
    return summary;
}

}  // namespace iplna
