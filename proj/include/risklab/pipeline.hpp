#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "risklab/agents.hpp"
#include "risklab/estimation.hpp"
#include "risklab/prompt.hpp"

namespace risklab {

// Effective configuration of a pipeline run; file values overridden by CLI
// flags before the hash is taken. The hash is embedded in every artifact.
struct RunConfig {
    std::uint64_t seed = 1;
    int sessions_per_agent = 30;
    int n_starts = 50;
    int bootstrap_iters = 1000;
    int jobs = 0;  // 0 -> hardware concurrency
    bool fail_fast = false;
    std::string out_dir = "out";
    std::string human_pool_path;  // CSV: measure,agent_id,value
    std::vector<AgentDescriptor> agents;
    std::vector<ChoiceModel> choice_models = {ChoiceModel::cm1, ChoiceModel::cm2,
                                              ChoiceModel::cm3, ChoiceModel::cm4};
    std::vector<AffectModel> affect_models = {AffectModel::mm1, AffectModel::mm2};
    // Which fitted models feed the group parameter statistics.
    ChoiceModel stats_choice_model = ChoiceModel::cm3;
    AffectModel stats_affect_model = AffectModel::mm1;
    PromptScript prompt = PromptScript::defaults();
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);  // empty path -> defaults
std::string config_hash(const RunConfig& config);

// Conventional artifact paths inside out_dir.
std::string task_path(const RunConfig& config);
std::string transcripts_path(const RunConfig& config, const std::string& agent_id);
std::string audit_path(const RunConfig& config, const std::string& agent_id);
std::string fits_path(const RunConfig& config);
std::string compare_path(const RunConfig& config);
std::string stats_path(const RunConfig& config);
std::string report_path(const RunConfig& config);

struct GenTaskSummary {
    int n_trials = 0;
    int per_type[3] = {0, 0, 0};
    int n_probes = 0;
};

GenTaskSummary run_gen_task(const RunConfig& config, const std::string& out_path);

struct RunBatchSummary {
    int sessions_written = 0;
    int sessions_aborted = 0;
    std::vector<std::string> transcript_files;
};

// One transcripts JSONL per agent; sessions run concurrently up to `jobs`,
// each from its own derived seed; probe schedules are re-randomized per
// session. Aborted chat sessions land in the audit log only.
RunBatchSummary run_sessions(const RunConfig& config, const std::string& task_file);

FitTable run_fit(const RunConfig& config, const std::string& task_file,
                 const std::vector<std::string>& transcript_files, bool choice_space,
                 bool affect_space, const std::string& out_csv);

void run_compare(const RunConfig& config, const std::string& fits_csv,
                 const std::string& out_csv);

void run_stats(const RunConfig& config, const std::string& task_file,
               const std::vector<std::string>& transcript_files, const std::string& fits_csv,
               const std::string& out_csv);

void run_report(const RunConfig& config, const std::string& out_md);

}  // namespace risklab
