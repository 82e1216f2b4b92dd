#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "risklab/errors.hpp"
#include "risklab/rng.hpp"
#include "risklab/stats.hpp"
#include "test_helpers.hpp"

using namespace risklab;

TEST_CASE("anova fixture: F=3, eta^2=0.5, df=(2,6)") {
    const std::vector<GroupSample> groups{{"g1", {1, 2, 3}}, {"g2", {2, 3, 4}}, {"g3", {3, 4, 5}}};
    const AnovaResult r = one_way_anova(groups);
    CHECK(r.f == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.eta_squared == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.df_between == 2);
    CHECK(r.df_within == 6);
    CHECK(r.p == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("anova: equal group means give F=0") {
    const std::vector<GroupSample> groups{{"a", {1, 2, 3}}, {"b", {0, 2, 4}}};
    const AnovaResult r = one_way_anova(groups);
    CHECK(r.f == doctest::Approx(0.0));
    CHECK(r.eta_squared == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("anova: two groups reduce to t^2") {
    const GroupSample a{"a", {1.3, 2.0, 2.9, 4.1}};
    const GroupSample b{"b", {2.2, 3.5, 5.0, 4.4, 3.3}};
    const AnovaResult anova = one_way_anova({a, b});
    const TTestResult t = two_sample_t(a, b);
    CHECK(anova.f == doctest::Approx(t.t * t.t).epsilon(1e-9));
    CHECK(anova.p == doctest::Approx(t.p).epsilon(1e-9));
}

TEST_CASE("anova rejects degenerate input") {
    CHECK_THROWS_AS(one_way_anova({{"a", {1, 1}}, {"b", {1, 1}}}), UndefinedStatisticError);
    CHECK_THROWS_AS(one_way_anova({{"a", {1, 2}}}), std::invalid_argument);
    CHECK_THROWS_AS(one_way_anova({{"a", {1, 2}}, {"b", {1}}}), std::invalid_argument);
}

TEST_CASE("two-sample t fixture") {
    const TTestResult r = two_sample_t({"a", {1, 2, 3}}, {"b", {3, 4, 5}});
    CHECK(r.t == doctest::Approx(-2.449489742783178).epsilon(1e-12));
    CHECK(r.cohens_d == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(4.0));
    CHECK(r.p == doctest::Approx(0.07048399691021995).epsilon(1e-9));
}

TEST_CASE("two-sample t: symmetry and translation invariance") {
    const GroupSample a{"a", {1.0, 2.5, 3.5, 2.0}};
    const GroupSample b{"b", {2.1, 4.4, 3.2}};
    const TTestResult ab = two_sample_t(a, b);
    const TTestResult ba = two_sample_t(b, a);
    CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
    CHECK(ab.cohens_d == doctest::Approx(-ba.cohens_d).epsilon(1e-12));
    CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));

    GroupSample a_shift = a, b_shift = b;
    for (double& v : a_shift.values) v += 11.5;
    for (double& v : b_shift.values) v += 11.5;
    const TTestResult shifted = two_sample_t(a_shift, b_shift);
    CHECK(shifted.t == doctest::Approx(ab.t).epsilon(1e-9));
    CHECK(shifted.p == doctest::Approx(ab.p).epsilon(1e-9));
    CHECK(shifted.cohens_d == doctest::Approx(ab.cohens_d).epsilon(1e-9));
}

TEST_CASE("identical groups give t=0, d=0") {
    const TTestResult r = two_sample_t({"a", {1, 2, 3}}, {"b", {1, 2, 3}});
    CHECK(r.t == doctest::Approx(0.0));
    CHECK(r.cohens_d == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("t statistics are order-invariant within groups") {
    GroupSample a{"a", {5.0, 1.0, 3.0, 2.2}};
    GroupSample b{"b", {0.5, 2.5, 1.5}};
    const TTestResult before = two_sample_t(a, b);
    std::reverse(a.values.begin(), a.values.end());
    std::next_permutation(b.values.begin(), b.values.end());
    const TTestResult after = two_sample_t(a, b);
    CHECK(before.t == doctest::Approx(after.t).epsilon(1e-12));
}

TEST_CASE("zero pooled variance raises undefined-statistic") {
    CHECK_THROWS_AS(two_sample_t({"a", {2, 2}}, {"b", {2, 2}}), UndefinedStatisticError);
}

TEST_CASE("bootstrap: far-outlying model group pins P below resolution") {
    Rng rng(60);
    GroupSample human{"human", {}};
    for (int i = 0; i < 300; ++i) human.values.push_back(rng.normal(0.0, 1.0));
    GroupSample model{"model", {}};
    for (int i = 0; i < 30; ++i) model.values.push_back(rng.normal(8.0, 1.0));

    const BootstrapResult r = bootstrap_vs_human(model, human, 1000, 1);
    CHECK(r.below_resolution);
    CHECK(r.p < 0.001);
}

TEST_CASE("bootstrap: balanced t distribution gives P near 1") {
    Rng rng(61);
    GroupSample human{"human", {}};
    for (int i = 0; i < 400; ++i) human.values.push_back(rng.normal(0.0, 1.0));
    // model group drawn from the same distribution: P should be large
    GroupSample model{"model", {}};
    for (int i = 0; i < 30; ++i) model.values.push_back(rng.normal(0.0, 1.0));
    const BootstrapResult r = bootstrap_vs_human(model, human, 1000, 2);
    CHECK(r.p > 0.05);
}

TEST_CASE("bootstrap is deterministic given the seed") {
    Rng rng(62);
    GroupSample human{"human", {}};
    for (int i = 0; i < 100; ++i) human.values.push_back(rng.normal(0.0, 1.0));
    GroupSample model{"model", {}};
    for (int i = 0; i < 20; ++i) model.values.push_back(rng.normal(0.5, 1.0));
    const BootstrapResult a = bootstrap_vs_human(model, human, 500, 9);
    const BootstrapResult b = bootstrap_vs_human(model, human, 500, 9);
    CHECK(a.p == b.p);
    CHECK(a.below_resolution == b.below_resolution);
}

TEST_CASE("bootstrap P approaches significance monotonically in the shift") {
    Rng rng(63);
    GroupSample human{"human", {}};
    double human_mean = 0.0;
    for (int i = 0; i < 200; ++i) {
        human.values.push_back(rng.normal(0.0, 1.0));
        human_mean += human.values.back();
    }
    human_mean /= 200.0;

    // Base group centered on the human mean, then shifted away from it.
    GroupSample base{"model", {}};
    for (int i = 0; i < 25; ++i) base.values.push_back(rng.normal(0.0, 1.0));
    double base_mean = 0.0;
    for (double v : base.values) base_mean += v;
    base_mean /= 25.0;
    for (double& v : base.values) v += human_mean - base_mean;

    double last_p = 2.0;
    for (double shift : {0.0, 0.5, 1.0, 2.0, 3.5}) {
        GroupSample shifted = base;
        for (double& v : shifted.values) v += shift;
        const BootstrapResult r = bootstrap_vs_human(shifted, human, 400, 17);
        CHECK(r.p <= last_p + 1e-12);
        last_p = r.p;
    }
    CHECK(last_p < 0.01);
}

TEST_CASE("bootstrap preconditions") {
    GroupSample human{"human", {1, 2, 3}};
    GroupSample model{"model", {1, 2, 3, 4}};
    CHECK_THROWS_AS(bootstrap_vs_human(model, human, 100, 0), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_vs_human({"m", {1.0, 2.0}}, {"h", {1.0, 2.0, 3.0}}, 0, 0),
                    std::invalid_argument);
}

namespace {

SessionTranscript transcript_with_ratings(std::vector<double> outcomes,
                                          std::vector<double> ratings) {
    // one gamble trial per outcome, probe after every trial
    std::vector<TrialSpec> trials;
    std::set<int> probes;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        trials.push_back(helpers::mixed_trial(40.0, 2.0));
        probes.insert(static_cast<int>(i) + 1);
    }
    SessionTranscript t;
    t.task = helpers::tiny_task(std::move(trials), std::move(probes));
    double cumulative = kInitialEndowment;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        cumulative += outcomes[i];
        t.rows.push_back({static_cast<int>(i) + 1, Choice::gamble, outcomes[i], cumulative});
        t.ratings.push_back({static_cast<int>(i) + 1, ratings[i]});
    }
    return t;
}

}  // namespace

TEST_CASE("hedonic contrast: gains rated above losses") {
    std::vector<SessionTranscript> transcripts;
    for (int agent = 0; agent < 10; ++agent) {
        const double bump = agent * 0.5;
        transcripts.push_back(transcript_with_ratings({40, -80, 40, -80},
                                                      {70 + bump, 30, 72, 28 - bump}));
    }
    const HedonicResult r = hedonic_contrast(transcripts);
    CHECK(r.n_agents_used == 10);
    CHECK(r.mean_contrast > 30.0);
    CHECK(r.test.p < 0.001);
    CHECK(r.test.cohens_d > 1.0);
}

TEST_CASE("hedonic contrast excludes zero outcomes and one-sided agents") {
    std::vector<SessionTranscript> transcripts;
    // agent with only positive outcomes: excluded
    transcripts.push_back(transcript_with_ratings({40, 40}, {60, 61}));
    transcripts.push_back(transcript_with_ratings({40, -80}, {66, 40}));
    transcripts.push_back(transcript_with_ratings({40, -80}, {64, 42}));
    const HedonicResult r = hedonic_contrast(transcripts);
    CHECK(r.n_agents_used == 2);

    CHECK_THROWS_AS(hedonic_contrast({transcript_with_ratings({40, -80}, {66, 40})}),
                    InsufficientDataError);
}

TEST_CASE("summarize_session counts per type") {
    ChoiceParams all_gamble;
    all_gamble.model_id = ChoiceModel::cm3;
    all_gamble.mu = 0.0;
    all_gamble.beta_gain = 1.0;
    all_gamble.beta_loss = 1.0;
    AffectParams affect;
    affect.beta0 = 50.0;

    // beta biases force gambling on gain/loss; mixed stays at chance (mu=0)
    const auto transcript = helpers::synthetic_session(all_gamble, affect, 0.0, 2000);
    const GambleRates rates = summarize_session(transcript);
    CHECK(rates.gain == doctest::Approx(1.0));
    CHECK(rates.loss == doctest::Approx(1.0));
    CHECK(rates.mixed > 0.2);
    CHECK(rates.mixed < 0.8);
    CHECK(rates.overall ==
          doctest::Approx((rates.mixed + rates.gain + rates.loss) / 3.0).epsilon(1e-12));
}
