#include <doctest.h>

#include <vector>

#include "risklab/affect_models.hpp"
#include "risklab/rng.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace risklab;

namespace {

// Mixed 40/-80 gamble trial followed by whatever the test needs.
SessionTranscript gamble_then_certain() {
    auto task = helpers::tiny_task({helpers::mixed_trial(40.0, 2.0),
                                    helpers::gain_trial(45.0, 2.0)},
                                   {1, 2});
    SessionTranscript t;
    t.task = task;
    t.rows.push_back({1, Choice::gamble, 40.0, 540.0});
    t.rows.push_back({2, Choice::certain, 45.0, 585.0});
    return t;
}

}  // namespace

TEST_CASE("regressors: mixed gamble win") {
    auto t = gamble_then_certain();
    const auto rows = regressors_from_transcript(t);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ev == doctest::Approx(-20.0));
    CHECK(rows[0].rpe == doctest::Approx(60.0));
    CHECK(rows[0].gr == doctest::Approx(40.0));
    CHECK(rows[0].cr == 0.0);
    // certain choice populates cr only
    CHECK(rows[1].cr == doctest::Approx(45.0));
    CHECK(rows[1].ev == 0.0);
    CHECK(rows[1].rpe == 0.0);
    CHECK(rows[1].gr == 0.0);
}

TEST_CASE("regressors: win and loss RPEs are symmetric") {
    auto t = gamble_then_certain();
    t.rows[0].outcome = -80.0;
    t.rows[0].cumulative_points = 420.0;
    t.rows[1].cumulative_points = 465.0;
    const auto rows = regressors_from_transcript(t);
    CHECK(rows[0].rpe == doctest::Approx(-60.0));
    CHECK(rows[0].gr == doctest::Approx(-80.0));
}

TEST_CASE("decayed_sum fixtures and conventions") {
    const std::vector<double> series{10.0, 20.0};
    CHECK(decayed_sum(series, 0.5, 2) == doctest::Approx(25.0));
    CHECK(decayed_sum(series, 1.0, 2) == doctest::Approx(30.0));
    CHECK(decayed_sum(series, 0.0, 2) == doctest::Approx(20.0));  // 0^0 = 1
    CHECK(decayed_sum(series, 0.0, 1) == doctest::Approx(10.0));
    CHECK_THROWS_AS(decayed_sum(series, 0.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(decayed_sum(series, 0.5, 0), std::invalid_argument);
}

TEST_CASE("decayed sums match the quadratic-time oracle") {
    Rng rng(808);
    for (double gamma : {0.0, 0.1, 0.37, 0.5, 0.83, 0.99, 1.0}) {
        std::vector<double> series;
        for (int i = 0; i < 90; ++i) series.push_back(rng.uniform(-80.0, 80.0));
        for (int t = 1; t <= 90; t += 7) {
            const double reference = oracles::decayed_sum(series, gamma, t);
            CHECK(decayed_sum(series, gamma, t) ==
                  doctest::Approx(reference).epsilon(1e-9));
        }
    }
}

TEST_CASE("predict_happiness fixtures") {
    // baseline-only model predicts beta0 everywhere
    auto t = gamble_then_certain();
    AffectParams p;
    p.model_id = AffectModel::mm1;
    p.beta0 = 50.0;
    auto predictions = predict_happiness(p, t);
    REQUIRE(predictions.size() == 2);
    CHECK(predictions[0].second == doctest::Approx(50.0));
    CHECK(predictions[1].second == doctest::Approx(50.0));

    // single gamble trial: 50 + 0.1*(-20) + 0.2*60 = 60 at probe t=1
    p.beta_ev = 0.1;
    p.beta_rpe = 0.2;
    predictions = predict_happiness(p, t);
    CHECK(predictions[0].first == 1);
    CHECK(predictions[0].second == doctest::Approx(60.0));

    // mM2 with gamma=1 and two certain choices: 50 + 0.1*(35+45) = 58
    auto task = helpers::tiny_task({helpers::gain_trial(35.0, 2.0),
                                    helpers::gain_trial(45.0, 2.0)},
                                   {2});
    SessionTranscript certains;
    certains.task = task;
    certains.rows.push_back({1, Choice::certain, 35.0, 535.0});
    certains.rows.push_back({2, Choice::certain, 45.0, 580.0});
    AffectParams q;
    q.model_id = AffectModel::mm2;
    q.beta0 = 50.0;
    q.beta_cr = 0.1;
    q.gamma = 1.0;
    const auto mm2_predictions = predict_happiness(q, certains);
    REQUIRE(mm2_predictions.size() == 1);
    CHECK(mm2_predictions[0].second == doctest::Approx(58.0));
}

TEST_CASE("never-gambling transcripts are invariant to gamble weights") {
    class AlwaysCertain : public Agent {
    public:
        Choice choose(const TrialSpec&, const SessionTranscript&) override {
            return Choice::certain;
        }
        int rate(const SessionTranscript&) override { return 55; }
    };
    auto task = std::make_shared<const TaskSet>(build_trial_set(42));
    AlwaysCertain agent;
    const auto transcript = run_session(agent, task, 43, "certain-only");

    AffectParams affect;
    affect.beta0 = 55.0;
    affect.beta_cr = 0.2;
    affect.gamma = 0.7;

    AffectParams a = affect;
    AffectParams b = affect;
    b.beta_ev = 5.0;
    b.beta_rpe = -3.0;
    b.beta_gr = 2.0;
    const auto pa = predict_happiness(a, transcript);
    const auto pb = predict_happiness(b, transcript);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i)
        CHECK(pa[i].second == doctest::Approx(pb[i].second).epsilon(1e-12));
}

TEST_CASE("predictions are affine in the weights") {
    ChoiceParams choice;
    choice.model_id = ChoiceModel::cm2;
    choice.mu = 0.2;
    AffectParams base;
    base.beta0 = 10.0;
    base.beta_cr = 0.3;
    base.beta_ev = -0.2;
    base.beta_rpe = 0.4;
    base.gamma = 0.6;
    const auto transcript = helpers::synthetic_session(choice, base, 3.0, 7);

    AffectParams doubled = base;
    doubled.beta0 *= 2.0;
    doubled.beta_cr *= 2.0;
    doubled.beta_ev *= 2.0;
    doubled.beta_rpe *= 2.0;

    const auto p1 = predict_happiness(base, transcript);
    const auto p2 = predict_happiness(doubled, transcript);
    for (std::size_t i = 0; i < p1.size(); ++i)
        CHECK(p2[i].second == doctest::Approx(2.0 * p1[i].second).epsilon(1e-9));
}

TEST_CASE("mM1 and mM2 agree when the gamble weights vanish") {
    ChoiceParams choice;
    choice.model_id = ChoiceModel::cm2;
    choice.mu = 0.3;
    AffectParams mm1;
    mm1.model_id = AffectModel::mm1;
    mm1.beta0 = 40.0;
    mm1.beta_cr = 0.25;
    mm1.gamma = 0.4;
    AffectParams mm2 = mm1;
    mm2.model_id = AffectModel::mm2;

    const auto transcript = helpers::synthetic_session(choice, mm1, 2.0, 55);
    const auto p1 = predict_happiness(mm1, transcript);
    const auto p2 = predict_happiness(mm2, transcript);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i)
        CHECK(p1[i].second == doctest::Approx(p2[i].second).epsilon(1e-12));
}

TEST_CASE("affect_sse fixtures and oracle equivalence") {
    auto t = gamble_then_certain();
    t.ratings.push_back({1, 40.0});
    t.ratings.push_back({2, 60.0});

    AffectParams p;
    p.beta0 = 50.0;
    CHECK(affect_sse(p, t) == doctest::Approx(200.0));

    // perfect predictions give zero
    SessionTranscript exact = t;
    exact.ratings[0].rating = 50.0;
    exact.ratings[1].rating = 50.0;
    CHECK(affect_sse(p, exact) == doctest::Approx(0.0));

    SessionTranscript empty = t;
    empty.ratings.clear();
    CHECK_THROWS_AS(affect_sse(p, empty), std::invalid_argument);

    // random parameter points match the quadratic-time oracle
    ChoiceParams choice;
    choice.model_id = ChoiceModel::cm2;
    choice.mu = 0.15;
    AffectParams truth;
    truth.beta0 = 60.0;
    truth.beta_cr = 0.2;
    truth.beta_ev = 0.1;
    truth.beta_rpe = 0.3;
    truth.gamma = 0.5;
    const auto transcript = helpers::synthetic_session(choice, truth, 5.0, 1234);

    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        AffectParams q;
        q.model_id = i % 2 == 0 ? AffectModel::mm1 : AffectModel::mm2;
        q.beta0 = rng.uniform(-100.0, 200.0);
        q.beta_cr = rng.uniform(-10.0, 10.0);
        q.beta_ev = rng.uniform(-10.0, 10.0);
        q.beta_rpe = rng.uniform(-10.0, 10.0);
        q.beta_gr = rng.uniform(-10.0, 10.0);
        q.gamma = rng.uniform(0.0, 1.0);
        const double reference = oracles::affect_sse(q, transcript);
        CHECK(affect_sse(q, transcript) == doctest::Approx(reference).epsilon(1e-9));
    }
}
