#include "risklab/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "risklab/errors.hpp"

namespace risklab {

namespace {

// Ratings are integers on the protocol; keep them integers in JSON.
nlohmann::json number_or_int(double v) {
    const double rounded = std::nearbyint(v);
    if (v == rounded && std::abs(v) < 1e15) return static_cast<std::int64_t>(rounded);
    return v;
}

}  // namespace

nlohmann::json trial_to_json(const TrialSpec& trial) {
    return {{"trial_type", to_string(trial.trial_type)},
            {"certain_value", trial.certain_value},
            {"gamble_gain", trial.gamble_gain},
            {"gamble_loss", trial.gamble_loss},
            {"multiplier", trial.multiplier},
            {"option_order", to_string(trial.option_order)}};
}

TrialSpec trial_from_json(const nlohmann::json& j) {
    TrialSpec t;
    t.trial_type = trial_type_from_string(j.at("trial_type").get<std::string>());
    t.certain_value = j.at("certain_value").get<double>();
    t.gamble_gain = j.at("gamble_gain").get<double>();
    t.gamble_loss = j.at("gamble_loss").get<double>();
    t.multiplier = j.at("multiplier").get<double>();
    t.option_order = option_order_from_string(j.at("option_order").get<std::string>());
    return t;
}

nlohmann::json task_to_json(const TaskSet& task) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : task.trials) trials.push_back(trial_to_json(t));
    return {{"seed", task.seed},
            {"probe_after", task.probe_after},
            {"trials", std::move(trials)}};
}

TaskSet task_from_json(const nlohmann::json& j) {
    TaskSet task;
    task.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& p : j.at("probe_after")) task.probe_after.insert(p.get<int>());
    for (const auto& t : j.at("trials")) task.trials.push_back(trial_from_json(t));
    return task;
}

void save_task(const TaskSet& task, const std::string& path, const std::string& config_hash) {
    nlohmann::json j = task_to_json(task);
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    write_file(path, j.dump(2) + "\n");
}

std::shared_ptr<const TaskSet> load_task(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": not valid JSON: " + e.what());
    }
    TaskSet task;
    try {
        task = task_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": bad task schema: " + e.what());
    }
    validate_task(task);
    return std::make_shared<const TaskSet>(std::move(task));
}

nlohmann::json transcript_to_json(const SessionTranscript& transcript) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : transcript.rows)
        rows.push_back({{"trial", r.trial},
                        {"choice", to_string(r.choice)},
                        {"outcome", r.outcome},
                        {"cumulative_points", r.cumulative_points}});
    nlohmann::json ratings = nlohmann::json::array();
    for (const auto& r : transcript.ratings)
        ratings.push_back({{"trial", r.trial}, {"rating", number_or_int(r.rating)}});

    nlohmann::json j{{"type", "transcript"},
                     {"agent_id", transcript.agent_id},
                     {"task_seed", transcript.task ? transcript.task->seed : 0},
                     {"session_seed", transcript.session_seed},
                     {"probe_after", transcript.task ? transcript.task->probe_after : std::set<int>{}},
                     {"rows", std::move(rows)},
                     {"ratings", std::move(ratings)}};
    if (!transcript.prompt_version.empty()) j["prompt_version"] = transcript.prompt_version;
    return j;
}

SessionTranscript transcript_from_json(const nlohmann::json& j,
                                       std::shared_ptr<const TaskSet> base_task) {
    SessionTranscript t;
    t.agent_id = j.at("agent_id").get<std::string>();
    t.session_seed = j.at("session_seed").get<std::uint64_t>();
    if (j.contains("prompt_version")) t.prompt_version = j.at("prompt_version").get<std::string>();

    const auto task_seed = j.at("task_seed").get<std::uint64_t>();
    if (base_task->seed != task_seed)
        throw ValidationError("transcript task_seed " + std::to_string(task_seed) +
                              " does not match task file seed " + std::to_string(base_task->seed));

    std::set<int> probes;
    for (const auto& p : j.at("probe_after")) probes.insert(p.get<int>());
    t.task = std::make_shared<const TaskSet>(with_probe_schedule(*base_task, std::move(probes)));

    for (const auto& row : j.at("rows")) {
        TranscriptRow r;
        r.trial = row.at("trial").get<int>();
        r.choice = choice_from_string(row.at("choice").get<std::string>());
        r.outcome = row.at("outcome").get<double>();
        r.cumulative_points = row.at("cumulative_points").get<double>();
        t.rows.push_back(r);
    }
    for (const auto& rating : j.at("ratings")) {
        RatingRow r;
        r.trial = rating.at("trial").get<int>();
        r.rating = rating.at("rating").get<double>();
        t.ratings.push_back(r);
    }
    return t;
}

std::vector<SessionTranscript> load_transcripts(const std::string& path,
                                                std::shared_ptr<const TaskSet> base_task) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open transcripts file: " + path);

    std::vector<SessionTranscript> transcripts;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(line_number) +
                                  ": not valid JSON: " + e.what());
        }
        if (j.value("type", "transcript") == "header") continue;
        try {
            SessionTranscript t = transcript_from_json(j, base_task);
            validate_transcript(t);
            transcripts.push_back(std::move(t));
        } catch (const std::exception& e) {
            throw ValidationError(path + ":" + std::to_string(line_number) + ": " + e.what());
        }
    }
    return transcripts;
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw ValidationError("cannot open for writing: " + path);
}

void JsonlWriter::write(const nlohmann::json& object) {
    out_ << object.dump() << "\n";
    if (!out_) throw std::runtime_error("write failed: " + path_);
    out_.flush();
}

nlohmann::json choice_params_to_json(const ChoiceParams& p) {
    const ChoiceParams c = canonical_choice_params(p);
    return {{"model_id", to_string(c.model_id)}, {"alpha", c.alpha},
            {"lambda", c.lambda},               {"mu", c.mu},
            {"beta_gain", c.beta_gain},         {"beta_loss", c.beta_loss},
            {"beta_bias", c.beta_bias}};
}

ChoiceParams choice_params_from_json(const nlohmann::json& j) {
    ChoiceParams p;
    p.model_id = choice_model_from_string(j.at("model_id").get<std::string>());
    p.alpha = j.value("alpha", 1.0);
    p.lambda = j.value("lambda", 1.0);
    p.mu = j.value("mu", 1.0);
    p.beta_gain = j.value("beta_gain", 0.0);
    p.beta_loss = j.value("beta_loss", 0.0);
    p.beta_bias = j.value("beta_bias", 0.0);
    return canonical_choice_params(p);
}

nlohmann::json affect_params_to_json(const AffectParams& p) {
    return {{"model_id", to_string(p.model_id)}, {"beta0", p.beta0},
            {"beta_cr", p.beta_cr},             {"beta_ev", p.beta_ev},
            {"beta_rpe", p.beta_rpe},           {"beta_gr", p.beta_gr},
            {"gamma", p.gamma}};
}

AffectParams affect_params_from_json(const nlohmann::json& j) {
    AffectParams p;
    p.model_id = affect_model_from_string(j.at("model_id").get<std::string>());
    p.beta0 = j.value("beta0", 0.0);
    p.beta_cr = j.value("beta_cr", 0.0);
    p.beta_ev = j.value("beta_ev", 0.0);
    p.beta_rpe = j.value("beta_rpe", 0.0);
    p.beta_gr = j.value("beta_gr", 0.0);
    p.gamma = j.value("gamma", 0.0);
    return p;
}

nlohmann::json agent_descriptor_to_json(const AgentDescriptor& d) {
    nlohmann::json j{{"id", d.id}, {"kind", to_string(d.kind)}};
    switch (d.kind) {
        case AgentKind::synthetic:
            j["choice_params"] = choice_params_to_json(d.choice_params);
            j["affect_params"] = affect_params_to_json(d.affect_params);
            j["rating_noise_sigma"] = d.rating_noise_sigma;
            break;
        case AgentKind::ev_max:
            break;
        case AgentKind::llm:
            j["endpoint"] = d.endpoint;
            j["model_name"] = d.model_name;
            j["temperature"] = d.temperature;
            j["max_retries"] = d.max_retries;
            j["api_key_env"] = d.api_key_env;
            break;
        case AgentKind::replay:
            j["source_transcript"] = d.source_transcript;
            break;
    }
    return j;
}

AgentDescriptor agent_descriptor_from_json(const nlohmann::json& j) {
    AgentDescriptor d;
    d.id = j.at("id").get<std::string>();
    d.kind = agent_kind_from_string(j.at("kind").get<std::string>());
    switch (d.kind) {
        case AgentKind::synthetic:
            d.choice_params = choice_params_from_json(j.at("choice_params"));
            d.affect_params = affect_params_from_json(j.at("affect_params"));
            d.rating_noise_sigma = j.value("rating_noise_sigma", 0.0);
            if (d.rating_noise_sigma < 0.0)
                throw ValidationError("agent " + d.id + ": rating_noise_sigma must be >= 0");
            break;
        case AgentKind::ev_max:
            break;
        case AgentKind::llm:
            d.endpoint = j.at("endpoint").get<std::string>();
            d.model_name = j.at("model_name").get<std::string>();
            d.temperature = j.value("temperature", 1.0);
            d.max_retries = j.value("max_retries", 3);
            d.api_key_env = j.value("api_key_env", std::string("RISKLAB_API_KEY"));
            break;
        case AgentKind::replay:
            d.source_transcript = j.at("source_transcript").get<std::string>();
            break;
    }
    return d;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

}  // namespace

void write_csv(const std::string& path, const Csv& csv) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    for (const auto& c : csv.comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < csv.header.size(); ++i)
        out << (i ? "," : "") << csv_escape(csv.header[i]);
    out << "\n";
    for (const auto& row : csv.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open: " + path);
    Csv csv;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string comment = line.substr(1);
            if (!comment.empty() && comment[0] == ' ') comment.erase(0, 1);
            csv.comments.push_back(std::move(comment));
            continue;
        }
        auto fields = csv_split(line);
        if (!header_done) {
            csv.header = std::move(fields);
            header_done = true;
        } else {
            csv.rows.push_back(std::move(fields));
        }
    }
    return csv;
}

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

namespace {

const std::vector<std::string> kFitColumns = {
    "group",     "agent",     "space",     "model",       "alpha",     "lambda",
    "mu",        "beta_gain", "beta_loss", "beta_bias",   "beta0",     "beta_cr",
    "beta_ev",   "beta_rpe",  "beta_gr",   "gamma",       "nll",       "bic",
    "fit_quality", "n_obs",   "n_params",  "starts_used", "best_start_index"};

}  // namespace

Csv fit_table_to_csv(const FitTable& fits, const std::vector<std::string>& comments) {
    Csv csv;
    csv.comments = comments;
    csv.header = kFitColumns;
    for (const auto& row : fits.rows) {
        std::vector<std::string> fields(kFitColumns.size());
        fields[0] = row.group;
        fields[1] = row.agent;
        fields[3] = row.model;
        if (const auto* choice = std::get_if<ChoiceParams>(&row.fit.params)) {
            fields[2] = "choice";
            fields[4] = format_number(choice->alpha);
            fields[5] = format_number(choice->lambda);
            fields[6] = format_number(choice->mu);
            fields[7] = format_number(choice->beta_gain);
            fields[8] = format_number(choice->beta_loss);
            fields[9] = format_number(choice->beta_bias);
        } else {
            const auto& affect = std::get<AffectParams>(row.fit.params);
            fields[2] = "affect";
            fields[10] = format_number(affect.beta0);
            fields[11] = format_number(affect.beta_cr);
            fields[12] = format_number(affect.beta_ev);
            fields[13] = format_number(affect.beta_rpe);
            fields[14] = format_number(affect.beta_gr);
            fields[15] = format_number(affect.gamma);
        }
        fields[16] = format_number(row.fit.nll);
        fields[17] = format_number(row.fit.bic);
        fields[18] = format_number(row.fit.fit_quality);
        fields[19] = std::to_string(row.fit.n_obs);
        fields[20] = std::to_string(row.fit.n_params);
        fields[21] = std::to_string(row.fit.starts_used);
        fields[22] = std::to_string(row.fit.best_start_index);
        csv.rows.push_back(std::move(fields));
    }
    return csv;
}

FitTable fit_table_from_csv(const Csv& csv, const std::string& path_for_errors) {
    if (csv.header != kFitColumns)
        throw ValidationError(path_for_errors + ": unexpected fit table columns");

    auto to_double = [&](const std::string& s, int line) {
        try {
            return std::stod(s);
        } catch (const std::exception&) {
            throw ValidationError(path_for_errors + ": line " + std::to_string(line) +
                                  ": bad number '" + s + "'");
        }
    };

    FitTable table;
    int line = 1;
    for (const auto& fields : csv.rows) {
        ++line;
        if (fields.size() != kFitColumns.size())
            throw ValidationError(path_for_errors + ": line " + std::to_string(line) +
                                  ": wrong field count");
        FitTable::Row row;
        row.group = fields[0];
        row.agent = fields[1];
        row.model = fields[3];
        if (fields[2] == "choice") {
            ChoiceParams p;
            p.model_id = choice_model_from_string(row.model);
            p.alpha = to_double(fields[4], line);
            p.lambda = to_double(fields[5], line);
            p.mu = to_double(fields[6], line);
            p.beta_gain = to_double(fields[7], line);
            p.beta_loss = to_double(fields[8], line);
            p.beta_bias = to_double(fields[9], line);
            row.fit.params = p;
        } else if (fields[2] == "affect") {
            AffectParams p;
            p.model_id = affect_model_from_string(row.model);
            p.beta0 = to_double(fields[10], line);
            p.beta_cr = to_double(fields[11], line);
            p.beta_ev = to_double(fields[12], line);
            p.beta_rpe = to_double(fields[13], line);
            p.beta_gr = to_double(fields[14], line);
            p.gamma = to_double(fields[15], line);
            row.fit.params = p;
        } else {
            throw ValidationError(path_for_errors + ": line " + std::to_string(line) +
                                  ": unknown space '" + fields[2] + "'");
        }
        row.fit.nll = to_double(fields[16], line);
        row.fit.bic = to_double(fields[17], line);
        row.fit.fit_quality = to_double(fields[18], line);
        row.fit.n_obs = static_cast<int>(to_double(fields[19], line));
        row.fit.n_params = static_cast<int>(to_double(fields[20], line));
        row.fit.starts_used = static_cast<int>(to_double(fields[21], line));
        row.fit.best_start_index = static_cast<int>(to_double(fields[22], line));
        table.rows.push_back(std::move(row));
    }
    return table;
}

Csv regressors_to_csv(const SessionTranscript& transcript,
                      const std::vector<std::string>& comments) {
    Csv csv;
    csv.comments = comments;
    csv.header = {"trial", "cr", "ev", "rpe", "gr"};
    const auto rows = regressors_from_transcript(transcript);
    for (std::size_t i = 0; i < rows.size(); ++i)
        csv.rows.push_back({std::to_string(i + 1), format_number(rows[i].cr),
                            format_number(rows[i].ev), format_number(rows[i].rpe),
                            format_number(rows[i].gr)});
    return csv;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace risklab
