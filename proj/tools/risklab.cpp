#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "risklab/errors.hpp"
#include "risklab/io.hpp"
#include "risklab/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitRemoteAgent = 3;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = -1;
    int sessions = -1;
    int n_starts = -1;
    int bootstrap_iters = -1;
    bool fail_fast = false;

    // llm overrides, applied to every llm-kind agent
    std::string endpoint;
    std::string model;
    double temperature = -1.0;
    int max_retries = -1;
};

risklab::RunConfig effective_config(const CliOptions& cli) {
    risklab::RunConfig config = risklab::load_config(cli.config_path);
    if (cli.seed_set) config.seed = cli.seed;
    if (!cli.out_dir.empty()) config.out_dir = cli.out_dir;
    if (cli.jobs >= 0) config.jobs = cli.jobs;
    if (cli.sessions > 0) config.sessions_per_agent = cli.sessions;
    if (cli.n_starts > 0) config.n_starts = cli.n_starts;
    if (cli.bootstrap_iters > 0) config.bootstrap_iters = cli.bootstrap_iters;
    if (cli.fail_fast) config.fail_fast = true;
    for (auto& agent : config.agents) {
        if (agent.kind != risklab::AgentKind::llm) continue;
        if (!cli.endpoint.empty()) agent.endpoint = cli.endpoint;
        if (!cli.model.empty()) agent.model_name = cli.model;
        if (cli.temperature >= 0.0) agent.temperature = cli.temperature;
        if (cli.max_retries >= 0) agent.max_retries = cli.max_retries;
    }
    return config;
}

std::vector<std::string> default_transcript_files(const risklab::RunConfig& config) {
    std::vector<std::string> files;
    for (const auto& agent : config.agents)
        files.push_back(risklab::transcripts_path(config, agent.id));
    return files;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gambling-plus-happiness task workbench: run agents, fit choice and affect "
                 "models, compare them, and summarize group statistics."};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    CliOptions cli;
    app.add_option("--config", cli.config_path, "JSON config file");
    app.add_option("--out-dir", cli.out_dir, "output directory (overrides config)");
    auto* seed_opt = app.add_option("--seed", cli.seed, "RNG seed (overrides config)");
    app.add_option("--jobs", cli.jobs, "max parallel workers, 0 = all cores");
    app.add_flag("--fail-fast", cli.fail_fast, "stop a batch on the first session failure");

    auto* gen = app.add_subcommand("gen-task", "generate the canonical 90-trial task");
    std::string gen_out;
    gen->add_option("--out", gen_out, "task file path (default <out-dir>/task.json)");

    auto* run = app.add_subcommand("run", "run sessions for every configured agent");
    std::string run_task;
    run->add_option("--task", run_task, "task file (default <out-dir>/task.json)");
    run->add_option("--sessions", cli.sessions, "sessions per agent");
    run->add_option("--endpoint", cli.endpoint, "chat endpoint base URL (llm agents)");
    run->add_option("--model", cli.model, "model name (llm agents)");
    run->add_option("--temperature", cli.temperature, "sampling temperature (llm agents)");
    run->add_option("--max-retries", cli.max_retries, "clarification retries (llm agents)");

    auto* fit = app.add_subcommand("fit", "fit configured model spaces to transcripts");
    std::string fit_task, fit_out, fit_space = "both", regressors_dir;
    std::vector<std::string> fit_transcripts;
    fit->add_option("--task", fit_task, "task file");
    fit->add_option("--transcripts", fit_transcripts, "transcript JSONL files");
    fit->add_option("--space", fit_space, "choice | affect | both")
        ->check(CLI::IsMember({"choice", "affect", "both"}));
    fit->add_option("--n-starts", cli.n_starts, "optimizer restarts per fit");
    fit->add_option("--out", fit_out, "fits CSV path (default <out-dir>/fits.csv)");
    fit->add_option("--regressors-dir", regressors_dir,
                    "also dump per-session affect regressor CSVs here");

    auto* compare = app.add_subcommand("compare", "summed-BIC model comparison table");
    std::string compare_fits, compare_out;
    compare->add_option("--fits", compare_fits, "fits CSV (default <out-dir>/fits.csv)");
    compare->add_option("--out", compare_out, "output CSV (default <out-dir>/compare.csv)");

    auto* stats = app.add_subcommand("stats", "group statistics over rates and parameters");
    std::string stats_task, stats_fits, stats_out, human_pool;
    std::vector<std::string> stats_transcripts;
    stats->add_option("--task", stats_task, "task file");
    stats->add_option("--transcripts", stats_transcripts, "transcript JSONL files");
    stats->add_option("--fits", stats_fits, "fits CSV (default <out-dir>/fits.csv)");
    stats->add_option("--human-pool", human_pool, "human pool CSV (measure,agent_id,value)");
    stats->add_option("--bootstrap-iters", cli.bootstrap_iters, "bootstrap iterations");
    stats->add_option("--out", stats_out, "output CSV (default <out-dir>/stats.csv)");

    auto* report = app.add_subcommand("report", "assemble the markdown summary");
    std::string report_out;
    report->add_option("--out", report_out, "output markdown (default <out-dir>/report.md)");

    CLI11_PARSE(app, argc, argv);
    cli.seed_set = seed_opt->count() > 0;

    try {
        risklab::RunConfig config = effective_config(cli);

        if (gen->parsed()) {
            const std::string out = gen_out.empty() ? risklab::task_path(config) : gen_out;
            const auto summary = risklab::run_gen_task(config, out);
            std::cout << "wrote " << out << ": " << summary.n_trials << " trials ("
                      << summary.per_type[0] << " mixed / " << summary.per_type[1] << " gain / "
                      << summary.per_type[2] << " loss), " << summary.n_probes << " probes\n";
        } else if (run->parsed()) {
            const std::string task = run_task.empty() ? risklab::task_path(config) : run_task;
            const auto summary = risklab::run_sessions(config, task);
            std::cout << "wrote " << summary.sessions_written << " transcripts ("
                      << summary.sessions_aborted << " aborted) across "
                      << summary.transcript_files.size() << " agents\n";
        } else if (fit->parsed()) {
            const std::string task = fit_task.empty() ? risklab::task_path(config) : fit_task;
            const std::string out = fit_out.empty() ? risklab::fits_path(config) : fit_out;
            auto files = fit_transcripts.empty() ? default_transcript_files(config)
                                                 : fit_transcripts;
            const bool choice_space = fit_space != "affect";
            const bool affect_space = fit_space != "choice";
            const auto table =
                risklab::run_fit(config, task, files, choice_space, affect_space, out);
            std::cout << "wrote " << out << ": " << table.rows.size() << " fits\n";
            if (!regressors_dir.empty()) {
                const auto base_task = risklab::load_task(task);
                std::filesystem::create_directories(regressors_dir);
                int written = 0;
                for (const auto& file : files) {
                    for (const auto& t : risklab::load_transcripts(file, base_task)) {
                        const std::string path =
                            regressors_dir + "/" + t.agent_id + ".regressors.csv";
                        risklab::write_csv(
                            path, risklab::regressors_to_csv(
                                      t, {"config_hash=" + risklab::config_hash(config)}));
                        ++written;
                    }
                }
                std::cout << "wrote " << written << " regressor CSVs to " << regressors_dir
                          << "\n";
            }
        } else if (compare->parsed()) {
            const std::string fits =
                compare_fits.empty() ? risklab::fits_path(config) : compare_fits;
            const std::string out =
                compare_out.empty() ? risklab::compare_path(config) : compare_out;
            risklab::run_compare(config, fits, out);
            std::cout << "wrote " << out << "\n";
        } else if (stats->parsed()) {
            const std::string task = stats_task.empty() ? risklab::task_path(config) : stats_task;
            const std::string fits = stats_fits.empty() ? risklab::fits_path(config) : stats_fits;
            const std::string out = stats_out.empty() ? risklab::stats_path(config) : stats_out;
            if (!human_pool.empty()) config.human_pool_path = human_pool;
            auto files = stats_transcripts.empty() ? default_transcript_files(config)
                                                   : stats_transcripts;
            risklab::run_stats(config, task, files, fits, out);
            std::cout << "wrote " << out << "\n";
        } else if (report->parsed()) {
            const std::string out =
                report_out.empty() ? risklab::report_path(config) : report_out;
            risklab::run_report(config, out);
            std::cout << "wrote " << out << "\n";
        }
        return kExitOk;
    } catch (const risklab::RemoteAgentError& e) {
        std::cerr << "remote agent error: " << e.what() << "\n";
        return kExitRemoteAgent;
    } catch (const risklab::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
