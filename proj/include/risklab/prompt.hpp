#pragma once

#include <optional>
#include <string>

#include "risklab/task.hpp"

namespace risklab {

// Text rendering of the task for chat agents. Templates use {placeholders};
// rendering is a pure function of (trial, option_order), and the version
// label is recorded in every transcript produced with the script.
struct PromptScript {
    std::string version;
    std::string system_text;
    std::string trial_text;    // {trial}, {total}, {option_a}, {option_b}
    std::string outcome_text;  // {choice}, {outcome}, {total_points}
    std::string probe_text;
    std::string choice_grammar;  // human-readable description of accepted replies
    std::string clarify_choice_text;
    std::string clarify_rating_text;

    static PromptScript defaults();
};

enum class OptionLetter { a, b };

// Minimal decimal rendering: "40", "15.3", "-58.8".
std::string format_points(double value);

std::string describe_option(const TrialSpec& trial, bool gamble_slot);
std::string render_system(const PromptScript& script);
std::string render_trial(const PromptScript& script, const TrialSpec& trial, int trial_index,
                         int n_trials);
std::string render_outcome(const PromptScript& script, const TrialSpec& trial,
                           const TranscriptRow& row);
std::string render_probe(const PromptScript& script);

// First case-insensitive "option a"/"option b" in the reply, or a bare
// "a"/"b" as the whole (trimmed) reply. No match -> nullopt.
std::optional<OptionLetter> parse_choice(std::string_view reply);

// First integer token in [0, 100]. No in-range token -> nullopt.
std::optional<int> parse_rating(std::string_view reply);

Choice option_at(OptionLetter letter, OptionOrder order);

}  // namespace risklab
