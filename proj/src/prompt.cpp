#include "risklab/prompt.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace risklab {

namespace {

std::string replace_all(std::string text, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
    return text;
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool matches_at(std::string_view text, std::size_t pos, std::string_view needle) {
    if (pos + needle.size() > text.size()) return false;
    for (std::size_t i = 0; i < needle.size(); ++i)
        if (lower(text[pos + i]) != needle[i]) return false;
    return true;
}

}  // namespace

std::string format_points(double value) {
    char buffer[64];
    // Values are exact two-decimal quantities; trim trailing zeros.
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    std::string s(buffer);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

PromptScript PromptScript::defaults() {
    PromptScript s;
    s.version = "v1";
    s.system_text =
        "You are playing a points game with {total} rounds. You start with 500 points and your "
        "goal is to finish with as many points as possible.\n"
        "In each round you choose between two options, labelled Option A and Option B. One is a "
        "fixed amount; the other is a gamble with a 50% chance of each of two outcomes.\n"
        "Answer with just \"Option A\" or \"Option B\".\n"
        "From time to time you will be asked: \"How happy are you right now?\" Answer with a "
        "single integer from 0 (very unhappy) to 100 (very happy).";
    s.trial_text =
        "Trial {trial} of {total}.\n"
        "Option A: {option_a}\n"
        "Option B: {option_b}\n"
        "Which option do you choose?";
    s.outcome_text = "You chose the {choice} option. Outcome: {outcome} points. "
                     "You now have {total_points} points.";
    s.probe_text = "How happy are you right now? Answer with a single integer from 0 to 100.";
    s.choice_grammar = "\"Option A\" or \"Option B\" (case-insensitive; a bare \"A\" or \"B\" "
                       "also counts)";
    s.clarify_choice_text =
        "I could not read a choice from that reply. Please answer with exactly \"Option A\" or "
        "\"Option B\".";
    s.clarify_rating_text =
        "I could not read a rating from that reply. Please answer with a single integer from 0 "
        "to 100.";
    return s;
}

std::string describe_option(const TrialSpec& trial, bool gamble_slot) {
    if (!gamble_slot) {
        if (trial.certain_value > 0.0)
            return "a certain win of " + format_points(trial.certain_value) + " points";
        if (trial.certain_value < 0.0)
            return "a certain loss of " + format_points(-trial.certain_value) + " points";
        return "a certain 0 points";
    }
    const std::string up = trial.gamble_gain > 0.0
                               ? "win " + format_points(trial.gamble_gain) + " points"
                               : "win nothing";
    const std::string down = trial.gamble_loss < 0.0
                                 ? "lose " + format_points(-trial.gamble_loss) + " points"
                                 : "lose nothing";
    return "a gamble: 50% chance to " + up + ", 50% chance to " + down;
}

std::string render_system(const PromptScript& script) {
    return replace_all(script.system_text, "{total}", std::to_string(kTrialCount));
}

std::string render_trial(const PromptScript& script, const TrialSpec& trial, int trial_index,
                         int n_trials) {
    const bool gamble_is_a = trial.option_order == OptionOrder::gamble_first;
    std::string text = script.trial_text;
    text = replace_all(text, "{trial}", std::to_string(trial_index));
    text = replace_all(text, "{total}", std::to_string(n_trials));
    text = replace_all(text, "{option_a}", describe_option(trial, gamble_is_a));
    text = replace_all(text, "{option_b}", describe_option(trial, !gamble_is_a));
    return text;
}

std::string render_outcome(const PromptScript& script, const TrialSpec& trial,
                           const TranscriptRow& row) {
    (void)trial;
    std::string text = script.outcome_text;
    text = replace_all(text, "{choice}", row.choice == Choice::gamble ? "gamble" : "certain");
    text = replace_all(text, "{outcome}", format_points(row.outcome));
    text = replace_all(text, "{total_points}", format_points(row.cumulative_points));
    return text;
}

std::string render_probe(const PromptScript& script) { return script.probe_text; }

std::optional<OptionLetter> parse_choice(std::string_view reply) {
    for (std::size_t i = 0; i < reply.size(); ++i) {
        if (matches_at(reply, i, "option a")) return OptionLetter::a;
        if (matches_at(reply, i, "option b")) return OptionLetter::b;
    }
    // Bare "a"/"b" as the whole reply, modulo whitespace/punctuation wrapping.
    std::size_t begin = 0, end = reply.size();
    auto is_wrap = [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '"' || c == '\'' ||
               c == '`' || c == '.' || c == '!' || c == ')' || c == '(' || c == ':';
    };
    while (begin < end && is_wrap(reply[begin])) ++begin;
    while (end > begin && is_wrap(reply[end - 1])) --end;
    if (end - begin == 1) {
        const char c = lower(reply[begin]);
        if (c == 'a') return OptionLetter::a;
        if (c == 'b') return OptionLetter::b;
    }
    return std::nullopt;
}

std::optional<int> parse_rating(std::string_view reply) {
    std::size_t i = 0;
    while (i < reply.size()) {
        if (std::isdigit(static_cast<unsigned char>(reply[i]))) {
            std::size_t j = i;
            long value = 0;
            bool overflow = false;
            while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j]))) {
                value = value * 10 + (reply[j] - '0');
                if (value > 1000000) overflow = true;
                ++j;
            }
            if (!overflow && value >= 0 && value <= 100) return static_cast<int>(value);
            i = j;
        } else {
            ++i;
        }
    }
    return std::nullopt;
}

Choice option_at(OptionLetter letter, OptionOrder order) {
    const bool first = letter == OptionLetter::a;
    if (order == OptionOrder::gamble_first) return first ? Choice::gamble : Choice::certain;
    return first ? Choice::certain : Choice::gamble;
}

}  // namespace risklab
