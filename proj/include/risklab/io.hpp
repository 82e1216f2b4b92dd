#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "risklab/agents.hpp"
#include "risklab/estimation.hpp"
#include "risklab/task.hpp"

namespace risklab {

// ---- JSON schemas -----------------------------------------------------

nlohmann::json trial_to_json(const TrialSpec& trial);
TrialSpec trial_from_json(const nlohmann::json& j);

nlohmann::json task_to_json(const TaskSet& task);
TaskSet task_from_json(const nlohmann::json& j);

void save_task(const TaskSet& task, const std::string& path, const std::string& config_hash = "");
std::shared_ptr<const TaskSet> load_task(const std::string& path);

// Transcript lines reference the task by seed and carry their own probe
// schedule; trials live in the task file.
nlohmann::json transcript_to_json(const SessionTranscript& transcript);
SessionTranscript transcript_from_json(const nlohmann::json& j,
                                       std::shared_ptr<const TaskSet> base_task);

// One JSON object per line; a header object carries the config hash and
// prompt version. Readers skip header lines.
std::vector<SessionTranscript> load_transcripts(const std::string& path,
                                                std::shared_ptr<const TaskSet> base_task);

class JsonlWriter {
public:
    explicit JsonlWriter(const std::string& path);
    void write(const nlohmann::json& object);

private:
    std::ofstream out_;
    std::string path_;
};

nlohmann::json choice_params_to_json(const ChoiceParams& p);
ChoiceParams choice_params_from_json(const nlohmann::json& j);
nlohmann::json affect_params_to_json(const AffectParams& p);
AffectParams affect_params_from_json(const nlohmann::json& j);

nlohmann::json agent_descriptor_to_json(const AgentDescriptor& d);
AgentDescriptor agent_descriptor_from_json(const nlohmann::json& j);

// ---- CSV --------------------------------------------------------------

struct Csv {
    std::vector<std::string> comments;  // leading '#' lines, without the '#'
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const Csv& csv);
Csv read_csv(const std::string& path);

// Fixed-format numbers so identical runs produce identical bytes.
std::string format_number(double value);

// Long-format fit listing (one row per group x agent x model), the interchange
// format between fit, compare and stats stages.
Csv fit_table_to_csv(const FitTable& fits, const std::vector<std::string>& comments);
FitTable fit_table_from_csv(const Csv& csv, const std::string& path_for_errors);

// Per-trial regressor matrix (columns: trial, cr, ev, rpe, gr).
Csv regressors_to_csv(const SessionTranscript& transcript,
                      const std::vector<std::string>& comments);

// ---- misc ---------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace risklab
