#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risklab/task.hpp"

namespace risklab {

struct GroupSample {
    std::string label;
    std::vector<double> values;
};

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    double eta_squared = 0.0;
    int df_between = 0;
    int df_within = 0;
};

// Standard between/within decomposition. Throws UndefinedStatisticError when
// the total variance is zero.
AnovaResult one_way_anova(const std::vector<GroupSample>& groups);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double cohens_d = 0.0;
    double df = 0.0;  // fractional under Welch
};

// Pooled-variance Student t (two-tailed). Welch available as a switch; the
// default mirrors uncorrected post-hoc comparisons.
TTestResult two_sample_t(const GroupSample& a, const GroupSample& b, bool welch = false);

// One-sample t of `values` against zero; d = mean / sd.
TTestResult one_sample_t(const std::vector<double>& values);

struct BootstrapResult {
    double p = 1.0;
    bool below_resolution = false;  // true -> report as "< 1/iters"
    int iters = 0;
};

// Empirical two-tailed P from `iters` t statistics of the model group against
// human subsamples of matching size, drawn without replacement.
// P = 2 * min(frac(t <= 0), frac(t >= 0)).
BootstrapResult bootstrap_vs_human(const GroupSample& model_group, const GroupSample& human_pool,
                                   int iters = 1000, std::uint64_t seed = 0);

struct HedonicResult {
    TTestResult test;          // paired t of per-agent contrasts against zero
    double mean_contrast = 0.0;
    int n_agents_used = 0;
    std::vector<double> per_agent_contrast;
};

// Mean rating at probes following a positive outcome minus mean at probes
// following a negative one (zero outcomes excluded), per agent, then a
// one-sample t against zero. Agents lacking either category are dropped.
HedonicResult hedonic_contrast(const std::vector<SessionTranscript>& transcripts);

struct GambleRates {
    double overall = 0.0;
    double mixed = 0.0;
    double gain = 0.0;
    double loss = 0.0;
};

GambleRates summarize_session(const SessionTranscript& transcript);

}  // namespace risklab
