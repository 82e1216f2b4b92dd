#include "risklab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "risklab/errors.hpp"
#include "risklab/io.hpp"
#include "risklab/parallel.hpp"
#include "risklab/stats.hpp"

namespace risklab {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kProbeStream = 1;
constexpr std::uint64_t kAgentRngStream = 2;
constexpr std::uint64_t kFitStream = 0xF17;

std::string pad_index(int i, int width = 2) {
    std::string s = std::to_string(i);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

std::uint64_t agent_stream(const AgentDescriptor& d) { return fnv1a64(d.id); }

// "out/foo.transcripts.jsonl" -> "foo"
std::string group_label(const std::string& path) {
    std::string stem = fs::path(path).filename().string();
    for (const char* suffix : {".transcripts.jsonl", ".jsonl", ".json"}) {
        const std::size_t len = std::string(suffix).size();
        if (stem.size() > len && stem.compare(stem.size() - len, len, suffix) == 0)
            return stem.substr(0, stem.size() - len);
    }
    return stem;
}

std::vector<std::string> artifact_comments(const RunConfig& config) {
    return {"config_hash=" + config_hash(config) + " prompt_version=" + config.prompt.version +
            " seed=" + std::to_string(config.seed)};
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.sessions_per_agent = j.value("sessions_per_agent", c.sessions_per_agent);
    c.n_starts = j.value("n_starts", c.n_starts);
    c.bootstrap_iters = j.value("bootstrap_iters", c.bootstrap_iters);
    c.jobs = j.value("jobs", c.jobs);
    c.fail_fast = j.value("fail_fast", c.fail_fast);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.human_pool_path = j.value("human_pool", c.human_pool_path);

    if (c.sessions_per_agent < 1 || c.n_starts < 1 || c.bootstrap_iters < 1)
        throw ValidationError("config: counts must be >= 1");

    if (j.contains("agents")) {
        c.agents.clear();
        for (const auto& a : j.at("agents")) c.agents.push_back(agent_descriptor_from_json(a));
    }
    if (j.contains("choice_models")) {
        c.choice_models.clear();
        for (const auto& m : j.at("choice_models"))
            c.choice_models.push_back(choice_model_from_string(m.get<std::string>()));
    }
    if (j.contains("affect_models")) {
        c.affect_models.clear();
        for (const auto& m : j.at("affect_models"))
            c.affect_models.push_back(affect_model_from_string(m.get<std::string>()));
    }
    if (j.contains("stats_choice_model"))
        c.stats_choice_model = choice_model_from_string(j.at("stats_choice_model"));
    if (j.contains("stats_affect_model"))
        c.stats_affect_model = affect_model_from_string(j.at("stats_affect_model"));

    if (j.contains("prompt")) {
        const auto& p = j.at("prompt");
        c.prompt.version = p.value("version", c.prompt.version);
        c.prompt.system_text = p.value("system_text", c.prompt.system_text);
        c.prompt.trial_text = p.value("trial_text", c.prompt.trial_text);
        c.prompt.outcome_text = p.value("outcome_text", c.prompt.outcome_text);
        c.prompt.probe_text = p.value("probe_text", c.prompt.probe_text);
        c.prompt.choice_grammar = p.value("choice_grammar", c.prompt.choice_grammar);
        c.prompt.clarify_choice_text =
            p.value("clarify_choice_text", c.prompt.clarify_choice_text);
        c.prompt.clarify_rating_text =
            p.value("clarify_rating_text", c.prompt.clarify_rating_text);
    }
    return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json agents = nlohmann::json::array();
    for (const auto& a : c.agents) agents.push_back(agent_descriptor_to_json(a));
    nlohmann::json choice_models = nlohmann::json::array();
    for (auto m : c.choice_models) choice_models.push_back(to_string(m));
    nlohmann::json affect_models = nlohmann::json::array();
    for (auto m : c.affect_models) affect_models.push_back(to_string(m));

    return {{"seed", c.seed},
            {"sessions_per_agent", c.sessions_per_agent},
            {"n_starts", c.n_starts},
            {"bootstrap_iters", c.bootstrap_iters},
            {"jobs", c.jobs},
            {"fail_fast", c.fail_fast},
            {"out_dir", c.out_dir},
            {"human_pool", c.human_pool_path},
            {"agents", std::move(agents)},
            {"choice_models", std::move(choice_models)},
            {"affect_models", std::move(affect_models)},
            {"stats_choice_model", to_string(c.stats_choice_model)},
            {"stats_affect_model", to_string(c.stats_affect_model)},
            {"prompt",
             {{"version", c.prompt.version},
              {"system_text", c.prompt.system_text},
              {"trial_text", c.prompt.trial_text},
              {"outcome_text", c.prompt.outcome_text},
              {"probe_text", c.prompt.probe_text},
              {"choice_grammar", c.prompt.choice_grammar},
              {"clarify_choice_text", c.prompt.clarify_choice_text},
              {"clarify_rating_text", c.prompt.clarify_rating_text}}}};
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return RunConfig{};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": not valid JSON: " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": bad config schema: " + e.what());
    }
}

std::string config_hash(const RunConfig& config) {
    // nlohmann objects are key-sorted, so the dump is canonical. Output
    // location and worker count do not change artifact content, so they stay
    // out of the hash.
    nlohmann::json j = config_to_json(config);
    j.erase("out_dir");
    j.erase("jobs");
    return hex64(fnv1a64(j.dump()));
}

std::string task_path(const RunConfig& c) { return c.out_dir + "/task.json"; }
std::string transcripts_path(const RunConfig& c, const std::string& agent_id) {
    return c.out_dir + "/" + agent_id + ".transcripts.jsonl";
}
std::string audit_path(const RunConfig& c, const std::string& agent_id) {
    return c.out_dir + "/" + agent_id + ".audit.jsonl";
}
std::string fits_path(const RunConfig& c) { return c.out_dir + "/fits.csv"; }
std::string compare_path(const RunConfig& c) { return c.out_dir + "/compare.csv"; }
std::string stats_path(const RunConfig& c) { return c.out_dir + "/stats.csv"; }
std::string report_path(const RunConfig& c) { return c.out_dir + "/report.md"; }

GenTaskSummary run_gen_task(const RunConfig& config, const std::string& out_path) {
    const TaskSet task = build_trial_set(config.seed);
    validate_task(task);
    fs::create_directories(fs::path(out_path).parent_path().empty()
                               ? "."
                               : fs::path(out_path).parent_path().string());
    save_task(task, out_path, config_hash(config));

    GenTaskSummary summary;
    summary.n_trials = static_cast<int>(task.trials.size());
    for (const auto& t : task.trials) ++summary.per_type[static_cast<int>(t.trial_type)];
    summary.n_probes = static_cast<int>(task.probe_after.size());
    return summary;
}

namespace {

std::unique_ptr<Agent> make_local_agent(const AgentDescriptor& d, std::uint64_t session_seed) {
    Rng rng(derive_seed(session_seed, kAgentRngStream));
    switch (d.kind) {
        case AgentKind::synthetic:
            return std::make_unique<SyntheticAgent>(d.choice_params, d.affect_params,
                                                    d.rating_noise_sigma, rng);
        case AgentKind::ev_max:
            return std::make_unique<EvMaxAgent>(rng);
        default:
            throw ValidationError("not a local agent kind");
    }
}

}  // namespace

RunBatchSummary run_sessions(const RunConfig& config, const std::string& task_file) {
    const auto base_task = load_task(task_file);
    const int n_trials = static_cast<int>(base_task->trials.size());
    fs::create_directories(config.out_dir);

    RunBatchSummary summary;
    if (config.agents.empty()) throw ValidationError("config lists no agents");

    for (const auto& descriptor : config.agents) {
        const std::uint64_t agent_seed = derive_seed(config.seed, agent_stream(descriptor));

        std::vector<SessionTranscript> replay_sources;
        int n_sessions = config.sessions_per_agent;
        if (descriptor.kind == AgentKind::replay) {
            replay_sources = load_transcripts(descriptor.source_transcript, base_task);
            n_sessions = static_cast<int>(replay_sources.size());
            if (n_sessions == 0)
                throw ValidationError("replay source has no transcripts: " +
                                      descriptor.source_transcript);
        }

        std::unique_ptr<JsonlWriter> audit_writer;
        std::mutex audit_mutex;
        std::string api_key;
        if (descriptor.kind == AgentKind::llm) {
            api_key = resolve_api_key(descriptor);
            audit_writer = std::make_unique<JsonlWriter>(audit_path(config, descriptor.id));
            audit_writer->write({{"type", "header"},
                                 {"config_hash", config_hash(config)},
                                 {"prompt_version", config.prompt.version},
                                 {"endpoint", descriptor.endpoint},
                                 {"model_name", descriptor.model_name}});
        }

        std::vector<std::optional<SessionTranscript>> results(
            static_cast<std::size_t>(n_sessions));
        std::mutex error_mutex;
        std::vector<std::string> session_errors;

        parallel_for(n_sessions, config.jobs, [&](int i) {
            const std::uint64_t session_seed =
                descriptor.kind == AgentKind::replay
                    ? replay_sources[static_cast<std::size_t>(i)].session_seed
                    : derive_seed(agent_seed, static_cast<std::uint64_t>(i));
            try {
                std::shared_ptr<const TaskSet> session_task;
                std::unique_ptr<Agent> agent;
                std::string session_id = descriptor.id + "-s" + pad_index(i);

                if (descriptor.kind == AgentKind::replay) {
                    const auto& source = replay_sources[static_cast<std::size_t>(i)];
                    session_task = source.task;
                    session_id = source.agent_id;
                    agent = std::make_unique<ReplayAgent>(source);
                } else {
                    session_task = std::make_shared<const TaskSet>(with_probe_schedule(
                        *base_task,
                        schedule_probes(n_trials, derive_seed(session_seed, kProbeStream))));
                    if (descriptor.kind == AgentKind::llm) {
                        AuditSink sink = [&, i](const nlohmann::json& entry) {
                            nlohmann::json stamped = entry;
                            stamped["session"] = i;
                            std::lock_guard<std::mutex> lock(audit_mutex);
                            audit_writer->write(stamped);
                        };
                        agent = std::make_unique<ChatAgent>(descriptor, config.prompt, api_key,
                                                            std::move(sink));
                    } else {
                        agent = make_local_agent(descriptor, session_seed);
                    }
                }

                SessionTranscript transcript =
                    run_session(*agent, session_task, session_seed, session_id);
                if (descriptor.kind == AgentKind::llm)
                    transcript.prompt_version = config.prompt.version;
                else if (descriptor.kind == AgentKind::replay)
                    transcript.prompt_version =
                        replay_sources[static_cast<std::size_t>(i)].prompt_version;
                validate_transcript(transcript);
                results[static_cast<std::size_t>(i)] = std::move(transcript);
            } catch (const std::exception& e) {
                if (config.fail_fast) throw;
                const std::string message =
                    descriptor.id + " session " + std::to_string(i) + ": " + e.what();
                std::lock_guard<std::mutex> lock(error_mutex);
                session_errors.push_back(message);
                if (audit_writer) {
                    std::lock_guard<std::mutex> audit_lock(audit_mutex);
                    audit_writer->write(
                        {{"type", "session_abort"}, {"session", i}, {"error", e.what()}});
                }
            }
        });

        const std::string out_file = transcripts_path(config, descriptor.id);
        JsonlWriter writer(out_file);
        nlohmann::json header{{"type", "header"},
                              {"config_hash", config_hash(config)},
                              {"task_seed", base_task->seed}};
        if (descriptor.kind == AgentKind::llm) header["prompt_version"] = config.prompt.version;
        writer.write(header);
        for (const auto& result : results) {
            if (!result) {
                ++summary.sessions_aborted;
                continue;
            }
            writer.write(transcript_to_json(*result));
            ++summary.sessions_written;
        }
        summary.transcript_files.push_back(out_file);

        for (const auto& message : session_errors) std::cerr << "warning: " << message << "\n";
    }
    return summary;
}

FitTable run_fit(const RunConfig& config, const std::string& task_file,
                 const std::vector<std::string>& transcript_files, bool choice_space,
                 bool affect_space, const std::string& out_csv) {
    const auto base_task = load_task(task_file);

    struct Job {
        std::string group;
        const SessionTranscript* transcript;
        bool is_choice;
        ChoiceModel choice_model;
        AffectModel affect_model;
    };

    std::vector<std::vector<SessionTranscript>> groups;
    std::vector<std::string> labels;
    for (const auto& file : transcript_files) {
        groups.push_back(load_transcripts(file, base_task));
        labels.push_back(group_label(file));
        if (groups.back().empty()) throw ValidationError("no transcripts in " + file);
    }

    std::vector<Job> jobs;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (const auto& transcript : groups[g]) {
            if (choice_space)
                for (auto model : config.choice_models)
                    jobs.push_back({labels[g], &transcript, true, model, AffectModel::mm1});
            if (affect_space)
                for (auto model : config.affect_models)
                    jobs.push_back({labels[g], &transcript, false, ChoiceModel::cm1, model});
        }
    }

    const std::uint64_t fit_seed_root = derive_seed(config.seed, kFitStream);
    std::vector<std::optional<FitTable::Row>> rows(jobs.size());
    std::mutex skip_mutex;
    std::vector<std::string> skipped;

    parallel_for(static_cast<int>(jobs.size()), config.jobs, [&](int i) {
        const Job& job = jobs[static_cast<std::size_t>(i)];
        const std::uint64_t seed = derive_seed(fit_seed_root, static_cast<std::uint64_t>(i));
        FitTable::Row row;
        row.group = job.group;
        row.agent = job.transcript->agent_id;
        try {
            if (job.is_choice) {
                row.model = to_string(job.choice_model);
                row.fit = fit_choice(*job.transcript, job.choice_model, config.n_starts, seed);
            } else {
                row.model = to_string(job.affect_model);
                row.fit = fit_affect(*job.transcript, job.affect_model, config.n_starts, seed);
            }
            rows[static_cast<std::size_t>(i)] = std::move(row);
        } catch (const DegenerateDataError& e) {
            // Constant ratings (e.g. a reference agent) cannot be fit; skip.
            std::lock_guard<std::mutex> lock(skip_mutex);
            skipped.push_back(row.agent + " " + row.model + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            std::lock_guard<std::mutex> lock(skip_mutex);
            skipped.push_back(row.agent + " " + row.model + ": " + e.what());
        }
    });

    for (const auto& message : skipped) std::cerr << "warning: skipped fit: " << message << "\n";

    FitTable table;
    for (auto& row : rows)
        if (row) table.rows.push_back(std::move(*row));
    if (table.rows.empty()) throw EstimationFailure("no fits produced");

    if (!out_csv.empty()) {
        auto comments = artifact_comments(config);
        comments.push_back("n_starts=" + std::to_string(config.n_starts));
        write_csv(out_csv, fit_table_to_csv(table, comments));
    }
    return table;
}

namespace {

FitTable filter_space(const FitTable& fits, bool choice_space) {
    FitTable out;
    for (const auto& row : fits.rows)
        if (std::holds_alternative<ChoiceParams>(row.fit.params) == choice_space)
            out.rows.push_back(row);
    return out;
}

// Pool every agent into one group so the table gets an "(all)" row, agents
// disambiguated by group prefix.
FitTable pooled(const FitTable& fits) {
    FitTable out;
    for (const auto& row : fits.rows) {
        FitTable::Row copy = row;
        copy.agent = row.group + "/" + row.agent;
        copy.group = "(all)";
        out.rows.push_back(std::move(copy));
    }
    return out;
}

}  // namespace

void run_compare(const RunConfig& config, const std::string& fits_csv,
                 const std::string& out_csv) {
    const FitTable fits = fit_table_from_csv(read_csv(fits_csv), fits_csv);

    Csv out;
    out.comments = artifact_comments(config);
    out.header = {"space",     "group",     "model",           "n_agents", "n_params",
                  "summed_bic", "delta_bic", "mean_fit_quality", "winner"};

    for (const bool choice_space : {true, false}) {
        FitTable space = filter_space(fits, choice_space);
        if (space.rows.empty()) continue;

        std::set<std::string> group_set;
        for (const auto& row : space.rows) group_set.insert(row.group);
        FitTable with_pool = space;
        if (group_set.size() > 1)
            for (auto& row : pooled(space).rows) with_pool.rows.push_back(row);

        const ComparisonTable table = compare_models(with_pool);
        for (const auto& group : table.groups) {
            for (const auto& model : table.models) {
                const ComparisonCell& cell = table.cells.at(group).at(model);
                int n_params = 0;
                for (const auto& row : space.rows)
                    if (row.model == model) {
                        n_params = row.fit.n_params;
                        break;
                    }
                out.rows.push_back({choice_space ? "choice" : "affect", group, model,
                                    std::to_string(cell.n_agents), std::to_string(n_params),
                                    format_number(cell.summed_bic), format_number(cell.delta_bic),
                                    format_number(cell.mean_fit_quality),
                                    table.winner.at(group) == model ? "1" : "0"});
            }
        }
    }
    write_csv(out_csv, out);
}

namespace {

struct MeasureTable {
    // measure -> group -> per-agent values, group order preserved separately
    std::map<std::string, std::map<std::string, std::vector<double>>> values;
    std::vector<std::string> measures;  // emission order
    std::vector<std::string> groups;

    void add(const std::string& measure, const std::string& group, double value) {
        if (values.count(measure) == 0) measures.push_back(measure);
        auto& by_group = values[measure];
        if (by_group.count(group) == 0 &&
            std::find(groups.begin(), groups.end(), group) == groups.end())
            groups.push_back(group);
        by_group[group].push_back(value);
    }
};

std::map<std::string, std::vector<double>> load_human_pool(const std::string& path) {
    std::map<std::string, std::vector<double>> pool;
    if (path.empty()) return pool;
    const Csv csv = read_csv(path);
    if (csv.header != std::vector<std::string>{"measure", "agent_id", "value"})
        throw ValidationError(path + ": expected columns measure,agent_id,value");
    int line = 1;
    for (const auto& row : csv.rows) {
        ++line;
        if (row.size() != 3)
            throw ValidationError(path + ": line " + std::to_string(line) + ": wrong field count");
        try {
            pool[row[0]].push_back(std::stod(row[2]));
        } catch (const std::exception&) {
            throw ValidationError(path + ": line " + std::to_string(line) + ": bad value '" +
                                  row[2] + "'");
        }
    }
    return pool;
}

std::vector<const ChoiceParamSpec*> stats_choice_fields(ChoiceModel model) {
    std::vector<const ChoiceParamSpec*> fields;
    for (const auto& spec : choice_free_params(model)) fields.push_back(&spec);
    return fields;
}

}  // namespace

void run_stats(const RunConfig& config, const std::string& task_file,
               const std::vector<std::string>& transcript_files, const std::string& fits_csv,
               const std::string& out_csv) {
    const auto base_task = load_task(task_file);

    MeasureTable measures;
    std::map<std::string, std::vector<SessionTranscript>> transcripts_by_group;
    std::vector<std::string> group_order;

    for (const auto& file : transcript_files) {
        const std::string group = group_label(file);
        auto transcripts = load_transcripts(file, base_task);
        for (const auto& t : transcripts) {
            const GambleRates rates = summarize_session(t);
            measures.add("gamble_rate_overall", group, rates.overall);
            measures.add("gamble_rate_mixed", group, rates.mixed);
            measures.add("gamble_rate_gain", group, rates.gain);
            measures.add("gamble_rate_loss", group, rates.loss);
        }
        transcripts_by_group[group] = std::move(transcripts);
        group_order.push_back(group);
    }

    if (!fits_csv.empty()) {
        const FitTable fits = fit_table_from_csv(read_csv(fits_csv), fits_csv);
        const std::string choice_model = to_string(config.stats_choice_model);
        const std::string affect_model = to_string(config.stats_affect_model);
        for (const auto& row : fits.rows) {
            if (const auto* p = std::get_if<ChoiceParams>(&row.fit.params)) {
                if (row.model != choice_model) continue;
                for (const auto* spec : stats_choice_fields(config.stats_choice_model))
                    measures.add(spec->name, row.group, p->*(spec->field));
            } else if (const auto* a = std::get_if<AffectParams>(&row.fit.params)) {
                if (row.model != affect_model) continue;
                measures.add("beta0", row.group, a->beta0);
                measures.add("beta_cr", row.group, a->beta_cr);
                if (a->model_id == AffectModel::mm1) {
                    measures.add("beta_ev", row.group, a->beta_ev);
                    measures.add("beta_rpe", row.group, a->beta_rpe);
                } else {
                    measures.add("beta_gr", row.group, a->beta_gr);
                }
                measures.add("gamma", row.group, a->gamma);
            }
        }
    }

    const auto human_pool = load_human_pool(config.human_pool_path);

    Csv out;
    out.comments = artifact_comments(config);
    out.header = {"measure", "statistic", "group_a", "group_b", "value",
                  "df1",     "df2",       "p",       "effect_size", "note"};

    auto emit = [&](const std::string& measure, const std::string& statistic,
                    const std::string& group_a, const std::string& group_b,
                    const std::string& value, const std::string& df1, const std::string& df2,
                    const std::string& p, const std::string& effect, const std::string& note) {
        out.rows.push_back({measure, statistic, group_a, group_b, value, df1, df2, p, effect, note});
    };

    for (const auto& measure : measures.measures) {
        const auto& by_group = measures.values.at(measure);

        std::vector<GroupSample> groups;
        for (const auto& group : measures.groups) {
            auto it = by_group.find(group);
            if (it != by_group.end() && it->second.size() >= 2)
                groups.push_back({group, it->second});
        }

        if (groups.size() >= 2) {
            try {
                const AnovaResult anova = one_way_anova(groups);
                emit(measure, "anova_F", "", "", format_number(anova.f),
                     std::to_string(anova.df_between), std::to_string(anova.df_within),
                     format_number(anova.p), format_number(anova.eta_squared), "");
            } catch (const UndefinedStatisticError& e) {
                emit(measure, "anova_F", "", "", "", "", "", "", "", e.what());
            }
            for (std::size_t a = 0; a < groups.size(); ++a) {
                for (std::size_t b = a + 1; b < groups.size(); ++b) {
                    try {
                        const TTestResult t = two_sample_t(groups[a], groups[b]);
                        emit(measure, "posthoc_t", groups[a].label, groups[b].label,
                             format_number(t.t), format_number(t.df), "", format_number(t.p),
                             format_number(t.cohens_d), "");
                    } catch (const UndefinedStatisticError& e) {
                        emit(measure, "posthoc_t", groups[a].label, groups[b].label, "", "", "",
                             "", "", e.what());
                    }
                }
            }
        }

        const auto pool_it = human_pool.find(measure);
        if (pool_it != human_pool.end()) {
            GroupSample human{"human", pool_it->second};
            for (const auto& group : groups) {
                try {
                    const BootstrapResult boot = bootstrap_vs_human(
                        group, human, config.bootstrap_iters,
                        derive_seed(config.seed, fnv1a64(measure + "|" + group.label)));
                    emit(measure, "bootstrap_P", group.label, "human", "", "", "",
                         format_number(boot.p), "",
                         boot.below_resolution
                             ? "< " + format_number(1.0 / config.bootstrap_iters)
                             : "");
                } catch (const std::exception& e) {
                    emit(measure, "bootstrap_P", group.label, "human", "", "", "", "", "",
                         e.what());
                }
            }
        }
    }

    for (const auto& group : group_order) {
        try {
            const HedonicResult h = hedonic_contrast(transcripts_by_group.at(group));
            emit("hedonic_contrast", "hedonic_t", group, "", format_number(h.mean_contrast),
                 format_number(h.test.df), "", format_number(h.test.p),
                 format_number(h.test.cohens_d),
                 "n_agents=" + std::to_string(h.n_agents_used));
        } catch (const std::exception& e) {
            emit("hedonic_contrast", "hedonic_t", group, "", "", "", "", "", "", e.what());
        }
    }

    write_csv(out_csv, out);
}

namespace {

struct MeanSem {
    double mean = 0.0;
    double sem = 0.0;
    int n = 0;
};

MeanSem mean_sem(const std::vector<double>& values) {
    MeanSem ms;
    ms.n = static_cast<int>(values.size());
    if (ms.n == 0) return ms;
    for (double v : values) ms.mean += v;
    ms.mean /= ms.n;
    if (ms.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - ms.mean) * (v - ms.mean);
        ms.sem = std::sqrt(ss / (ms.n - 1)) / std::sqrt(static_cast<double>(ms.n));
    }
    return ms;
}

std::string cell(const MeanSem& ms) {
    if (ms.n == 0) return "-";
    std::ostringstream ss;
    ss << format_number(ms.mean) << " ± " << format_number(ms.sem);
    return ss.str();
}

}  // namespace

void run_report(const RunConfig& config, const std::string& out_md) {
    std::ostringstream md;
    md << "<!-- config_hash=" << config_hash(config)
       << " prompt_version=" << config.prompt.version << " -->\n";
    md << "# Risklab run report\n\n";
    md << "- seed: " << config.seed << "\n";
    md << "- sessions per agent: " << config.sessions_per_agent << "\n";
    md << "- optimizer starts: " << config.n_starts << "\n\n";

    // Gamble rates per group, from the transcripts.
    const std::string task_file = task_path(config);
    if (fs::exists(task_file)) {
        const auto base_task = load_task(task_file);
        md << "## Gamble rates (mean ± SEM across sessions)\n\n";
        md << "| group | overall | mixed | gain | loss | sessions |\n";
        md << "|---|---|---|---|---|---|\n";
        for (const auto& agent : config.agents) {
            const std::string file = transcripts_path(config, agent.id);
            if (!fs::exists(file)) continue;
            const auto transcripts = load_transcripts(file, base_task);
            std::vector<double> overall, mixed, gain, loss;
            for (const auto& t : transcripts) {
                const GambleRates r = summarize_session(t);
                overall.push_back(r.overall);
                mixed.push_back(r.mixed);
                gain.push_back(r.gain);
                loss.push_back(r.loss);
            }
            md << "| " << agent.id << " | " << cell(mean_sem(overall)) << " | "
               << cell(mean_sem(mixed)) << " | " << cell(mean_sem(gain)) << " | "
               << cell(mean_sem(loss)) << " | " << transcripts.size() << " |\n";
        }
        md << "\nExpected-value-maximizing reference: 0.55 overall "
              "(0.65 mixed / 0.75 gain / 0.25 loss).\n\n";
    }

    // Parameter means per group, from the fits table.
    const std::string fits_file = fits_path(config);
    if (fs::exists(fits_file)) {
        const FitTable fits = fit_table_from_csv(read_csv(fits_file), fits_file);

        const std::string choice_model = to_string(config.stats_choice_model);
        std::map<std::string, std::map<std::string, std::vector<double>>> choice_values;
        std::vector<std::string> group_order;
        for (const auto& row : fits.rows) {
            if (row.model != choice_model) continue;
            const auto* p = std::get_if<ChoiceParams>(&row.fit.params);
            if (!p) continue;
            if (choice_values.count(row.group) == 0) group_order.push_back(row.group);
            auto& slot = choice_values[row.group];
            for (const auto& spec : choice_free_params(config.stats_choice_model))
                slot[spec.name].push_back(p->*(spec.field));
            slot["pseudo_r2"].push_back(row.fit.fit_quality);
        }
        if (!choice_values.empty()) {
            md << "## Choice parameters (" << choice_model << ", mean ± SEM)\n\n";
            md << "| group |";
            for (const auto& spec : choice_free_params(config.stats_choice_model))
                md << " " << spec.name << " |";
            md << " pseudo_r2 |\n|---|";
            for (std::size_t i = 0; i <= choice_free_params(config.stats_choice_model).size(); ++i)
                md << "---|";
            md << "\n";
            for (const auto& group : group_order) {
                md << "| " << group << " |";
                for (const auto& spec : choice_free_params(config.stats_choice_model))
                    md << " " << cell(mean_sem(choice_values[group][spec.name])) << " |";
                md << " " << cell(mean_sem(choice_values[group]["pseudo_r2"])) << " |\n";
            }
            md << "\n";
        }

        const std::string affect_model = to_string(config.stats_affect_model);
        const std::vector<std::string> affect_fields =
            config.stats_affect_model == AffectModel::mm1
                ? std::vector<std::string>{"beta0", "beta_cr", "beta_ev", "beta_rpe", "gamma"}
                : std::vector<std::string>{"beta0", "beta_cr", "beta_gr", "gamma"};
        std::map<std::string, std::map<std::string, std::vector<double>>> affect_values;
        std::vector<std::string> affect_groups;
        for (const auto& row : fits.rows) {
            if (row.model != affect_model) continue;
            const auto* a = std::get_if<AffectParams>(&row.fit.params);
            if (!a) continue;
            if (affect_values.count(row.group) == 0) affect_groups.push_back(row.group);
            auto& slot = affect_values[row.group];
            slot["beta0"].push_back(a->beta0);
            slot["beta_cr"].push_back(a->beta_cr);
            slot["beta_ev"].push_back(a->beta_ev);
            slot["beta_rpe"].push_back(a->beta_rpe);
            slot["beta_gr"].push_back(a->beta_gr);
            slot["gamma"].push_back(a->gamma);
            slot["r2"].push_back(row.fit.fit_quality);
        }
        if (!affect_values.empty()) {
            md << "## Affect parameters (" << affect_model << ", mean ± SEM)\n\n";
            md << "| group |";
            for (const auto& f : affect_fields) md << " " << f << " |";
            md << " r2 |\n|---|";
            for (std::size_t i = 0; i <= affect_fields.size(); ++i) md << "---|";
            md << "\n";
            for (const auto& group : affect_groups) {
                md << "| " << group << " |";
                for (const auto& f : affect_fields)
                    md << " " << cell(mean_sem(affect_values[group][f])) << " |";
                md << " " << cell(mean_sem(affect_values[group]["r2"])) << " |\n";
            }
            md << "\n";
        }
    }

    const std::string compare_file = compare_path(config);
    if (fs::exists(compare_file)) {
        const Csv compare = read_csv(compare_file);
        md << "## Model comparison (summed BIC relative to the winner)\n\n";
        md << "| " ;
        for (std::size_t i = 0; i < compare.header.size(); ++i)
            md << compare.header[i] << " | ";
        md << "\n|";
        for (std::size_t i = 0; i < compare.header.size(); ++i) md << "---|";
        md << "\n";
        for (const auto& row : compare.rows) {
            md << "| ";
            for (const auto& field : row) md << field << " | ";
            md << "\n";
        }
        md << "\n";
    }

    const std::string stats_file = stats_path(config);
    if (fs::exists(stats_file)) {
        const Csv stats = read_csv(stats_file);
        md << "## Group statistics\n\n";
        md << "| ";
        for (const auto& h : stats.header) md << h << " | ";
        md << "\n|";
        for (std::size_t i = 0; i < stats.header.size(); ++i) md << "---|";
        md << "\n";
        for (const auto& row : stats.rows) {
            md << "| ";
            for (const auto& field : row) md << field << " | ";
            md << "\n";
        }
        md << "\n";
    }

    write_file(out_md, md.str());
}

}  // namespace risklab
