#include "risklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "risklab/errors.hpp"
#include "risklab/rng.hpp"
#include "risklab/special_functions.hpp"

namespace risklab {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Unbiased sample variance.
double variance_of(const std::vector<double>& v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

void require_finite(const GroupSample& g) {
    if (g.values.empty()) throw std::invalid_argument("group '" + g.label + "' is empty");
    for (double v : g.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("group '" + g.label + "' contains a non-finite value");
}

TTestResult pooled_t(const std::vector<double>& a, const std::vector<double>& b) {
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    const double ma = mean_of(a), mb = mean_of(b);
    const double va = variance_of(a, ma), vb = variance_of(b, mb);
    const double pooled_var = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    if (pooled_var <= 0.0) throw UndefinedStatisticError("zero pooled variance");
    const double pooled_sd = std::sqrt(pooled_var);

    TTestResult r;
    r.df = na + nb - 2.0;
    r.t = (ma - mb) / (pooled_sd * std::sqrt(1.0 / na + 1.0 / nb));
    r.p = student_t_two_tailed(r.t, r.df);
    r.cohens_d = (ma - mb) / pooled_sd;
    return r;
}

}  // namespace

AnovaResult one_way_anova(const std::vector<GroupSample>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("one_way_anova: needs >= 2 groups");
    for (const auto& g : groups) {
        require_finite(g);
        if (g.values.size() < 2)
            throw std::invalid_argument("one_way_anova: group '" + g.label +
                                        "' needs >= 2 values");
    }

    double grand_sum = 0.0;
    std::size_t n_total = 0;
    for (const auto& g : groups) {
        grand_sum += std::accumulate(g.values.begin(), g.values.end(), 0.0);
        n_total += g.values.size();
    }
    const double grand_mean = grand_sum / static_cast<double>(n_total);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        const double m = mean_of(g.values);
        ss_between += static_cast<double>(g.values.size()) * (m - grand_mean) * (m - grand_mean);
        for (double v : g.values) ss_within += (v - m) * (v - m);
    }
    const double ss_total = ss_between + ss_within;
    if (ss_total <= 0.0) throw UndefinedStatisticError("one_way_anova: zero total variance");

    AnovaResult r;
    r.df_between = static_cast<int>(groups.size()) - 1;
    r.df_within = static_cast<int>(n_total - groups.size());
    const double ms_between = ss_between / r.df_between;
    const double ms_within = ss_within / r.df_within;
    r.eta_squared = ss_between / ss_total;
    if (ms_within == 0.0) {
        r.f = std::numeric_limits<double>::infinity();
        r.p = 0.0;
    } else {
        r.f = ms_between / ms_within;
        r.p = f_tail(r.f, r.df_between, r.df_within);
    }
    return r;
}

TTestResult two_sample_t(const GroupSample& a, const GroupSample& b, bool welch) {
    require_finite(a);
    require_finite(b);
    if (a.values.size() < 2 || b.values.size() < 2)
        throw std::invalid_argument("two_sample_t: each group needs >= 2 values");

    if (!welch) return pooled_t(a.values, b.values);

    const auto na = static_cast<double>(a.values.size());
    const auto nb = static_cast<double>(b.values.size());
    const double ma = mean_of(a.values), mb = mean_of(b.values);
    const double va = variance_of(a.values, ma), vb = variance_of(b.values, mb);
    const double se2 = va / na + vb / nb;
    if (se2 <= 0.0) throw UndefinedStatisticError("zero variance in both groups");

    TTestResult r;
    r.t = (ma - mb) / std::sqrt(se2);
    r.df = se2 * se2 /
           (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    r.p = student_t_two_tailed(r.t, r.df);
    const double pooled_var = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    r.cohens_d = pooled_var > 0.0 ? (ma - mb) / std::sqrt(pooled_var) : 0.0;
    return r;
}

TTestResult one_sample_t(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("one_sample_t: needs >= 2 values");
    const auto n = static_cast<double>(values.size());
    const double m = mean_of(values);
    const double var = variance_of(values, m);
    if (var <= 0.0) throw UndefinedStatisticError("one_sample_t: zero variance");
    const double sd = std::sqrt(var);

    TTestResult r;
    r.df = n - 1.0;
    r.t = m / (sd / std::sqrt(n));
    r.p = student_t_two_tailed(r.t, r.df);
    r.cohens_d = m / sd;
    return r;
}

BootstrapResult bootstrap_vs_human(const GroupSample& model_group, const GroupSample& human_pool,
                                   int iters, std::uint64_t seed) {
    require_finite(model_group);
    require_finite(human_pool);
    if (iters < 1) throw std::invalid_argument("bootstrap_vs_human: iters must be >= 1");
    if (human_pool.values.size() < model_group.values.size())
        throw std::invalid_argument("bootstrap_vs_human: human pool smaller than model group");
    if (model_group.values.size() < 2)
        throw std::invalid_argument("bootstrap_vs_human: model group needs >= 2 values");

    const std::size_t m = model_group.values.size();
    const std::size_t h = human_pool.values.size();

    int non_positive = 0, non_negative = 0, valid = 0, degenerate = 0;
    std::vector<std::size_t> indices(h);
    std::vector<double> subsample(m);

    for (int iter = 0; iter < iters; ++iter) {
        // Per-iteration stream so the reduction is order-independent.
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(iter)));
        std::iota(indices.begin(), indices.end(), std::size_t{0});
        for (std::size_t k = 0; k < m; ++k) {
            const auto j = static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(k), static_cast<std::int64_t>(h) - 1));
            std::swap(indices[k], indices[j]);
            subsample[k] = human_pool.values[indices[k]];
        }
        try {
            const TTestResult t = pooled_t(model_group.values, subsample);
            ++valid;
            if (t.t <= 0.0) ++non_positive;
            if (t.t >= 0.0) ++non_negative;
        } catch (const UndefinedStatisticError&) {
            ++degenerate;
        }
    }

    if (degenerate * 10 > iters)
        throw UndefinedStatisticError("bootstrap_vs_human: degenerate variance in >10% of iterations");
    if (valid == 0) throw UndefinedStatisticError("bootstrap_vs_human: no valid iterations");

    const int lesser = std::min(non_positive, non_negative);
    BootstrapResult r;
    r.iters = iters;
    if (lesser == 0) {
        r.p = 0.0;
        r.below_resolution = true;  // report as "< 1/iters"
    } else {
        r.p = 2.0 * static_cast<double>(lesser) / static_cast<double>(valid);
        r.p = std::min(r.p, 1.0);
    }
    return r;
}

HedonicResult hedonic_contrast(const std::vector<SessionTranscript>& transcripts) {
    HedonicResult result;
    for (const auto& transcript : transcripts) {
        double pos_sum = 0.0, neg_sum = 0.0;
        int pos_n = 0, neg_n = 0;
        for (const auto& rating : transcript.ratings) {
            // The probe is attached to the outcome of its own trial: ratings
            // happen right after feedback.
            const auto& row = transcript.rows.at(static_cast<std::size_t>(rating.trial) - 1);
            if (row.outcome > 0.0) {
                pos_sum += rating.rating;
                ++pos_n;
            } else if (row.outcome < 0.0) {
                neg_sum += rating.rating;
                ++neg_n;
            }
        }
        if (pos_n == 0 || neg_n == 0) continue;  // agent lacks one category
        result.per_agent_contrast.push_back(pos_sum / pos_n - neg_sum / neg_n);
    }

    result.n_agents_used = static_cast<int>(result.per_agent_contrast.size());
    if (result.n_agents_used < 2)
        throw InsufficientDataError("hedonic_contrast: fewer than 2 usable agents");
    result.mean_contrast = mean_of(result.per_agent_contrast);
    result.test = one_sample_t(result.per_agent_contrast);
    return result;
}

GambleRates summarize_session(const SessionTranscript& transcript) {
    if (!transcript.task) throw std::invalid_argument("summarize_session: transcript lacks a task");
    const auto& trials = transcript.task->trials;

    int gambles[3] = {0, 0, 0}, totals[3] = {0, 0, 0};
    for (const auto& row : transcript.rows) {
        const int type = static_cast<int>(trials[static_cast<std::size_t>(row.trial) - 1].trial_type);
        ++totals[type];
        if (row.choice == Choice::gamble) ++gambles[type];
    }
    const int total = totals[0] + totals[1] + totals[2];
    const int gamble_total = gambles[0] + gambles[1] + gambles[2];

    GambleRates rates;
    rates.overall = total > 0 ? static_cast<double>(gamble_total) / total : 0.0;
    rates.mixed = totals[0] > 0 ? static_cast<double>(gambles[0]) / totals[0] : 0.0;
    rates.gain = totals[1] > 0 ? static_cast<double>(gambles[1]) / totals[1] : 0.0;
    rates.loss = totals[2] > 0 ? static_cast<double>(gambles[2]) / totals[2] : 0.0;
    return rates;
}

}  // namespace risklab
