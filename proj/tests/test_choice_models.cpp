#include <doctest.h>

#include <cmath>

#include "risklab/choice_models.hpp"
#include "risklab/rng.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace risklab;

namespace {

ChoiceParams params_for(ChoiceModel m) {
    ChoiceParams p;
    p.model_id = m;
    return p;
}

// Random in-bounds parameter point for a model.
ChoiceParams random_params(ChoiceModel m, Rng& rng) {
    ChoiceParams p = params_for(m);
    for (const auto& spec : choice_free_params(m)) p.*(spec.field) = rng.uniform(spec.lo, spec.hi);
    return canonical_choice_params(p);
}

TrialSpec random_trial(Rng& rng) {
    const int kind = static_cast<int>(rng.uniform_int(0, 2));
    if (kind == 0) {
        const double gains[] = {40, 45, 75};
        const double mults[] = {0.2, 0.34, 0.5, 0.64, 0.77, 0.89, 1.0, 1.1, 1.35, 2.0};
        return helpers::mixed_trial(gains[rng.uniform_int(0, 2)], mults[rng.uniform_int(0, 9)]);
    }
    const double mults[] = {1.68, 1.82, 2.0, 2.22, 2.48, 2.8, 3.16, 3.6, 4.2, 5.0};
    if (kind == 1) {
        const double certains[] = {35, 45, 55};
        return helpers::gain_trial(certains[rng.uniform_int(0, 2)], mults[rng.uniform_int(0, 9)]);
    }
    const double certains[] = {-35, -45, -55};
    return helpers::loss_trial(certains[rng.uniform_int(0, 2)], mults[rng.uniform_int(0, 9)]);
}

}  // namespace

TEST_CASE("gamble utility fixtures") {
    ChoiceParams p = params_for(ChoiceModel::cm2);

    p.alpha = 1.0;
    p.lambda = 1.0;
    CHECK(gamble_utility(helpers::mixed_trial(40.0, 2.0), p) == doctest::Approx(-20.0));

    p.alpha = 0.5;
    p.lambda = 3.0;
    TrialSpec gain70 = helpers::gain_trial(35.0, 2.0);  // gamble gain 70, loss 0
    CHECK(gamble_utility(gain70, p) == doctest::Approx(4.183300132670378).epsilon(1e-12));

    p.alpha = 1.0;
    p.lambda = 2.0;
    TrialSpec loss90 = helpers::loss_trial(-45.0, 2.0);  // gamble loss -90, gain 0
    CHECK(gamble_utility(loss90, p) == doctest::Approx(-90.0));
}

TEST_CASE("certain utility fixtures") {
    ChoiceParams p = params_for(ChoiceModel::cm2);

    p.alpha = 1.0;
    p.lambda = 1.0;
    CHECK(certain_utility(helpers::gain_trial(45.0, 2.0), p) == doctest::Approx(45.0));

    p.lambda = 2.0;
    CHECK(certain_utility(helpers::loss_trial(-45.0, 2.0), p) == doctest::Approx(-90.0));

    p.alpha = 0.8;
    p.lambda = 1.5;
    // -1.5 * 55^0.8, frozen from an arbitrary-precision evaluation
    CHECK(certain_utility(helpers::loss_trial(-55.0, 2.0), p) ==
          doctest::Approx(-37.01531168238417).epsilon(1e-12));

    // Utility of zero is zero, any alpha.
    p.alpha = 0.3;
    CHECK(certain_utility(helpers::mixed_trial(40.0, 1.0), p) == 0.0);
}

TEST_CASE("p_gamble fixtures at zero utility difference") {
    // mixed trial with multiplier 1 and alpha=lambda=1 gives dU = 0
    TrialSpec tie = helpers::mixed_trial(45.0, 1.0);

    ChoiceParams p = params_for(ChoiceModel::cm3);
    p.alpha = 1.0;
    p.lambda = 1.0;
    p.mu = 3.0;
    CHECK(p_gamble(tie, p) == doctest::Approx(0.5));

    // bias fixtures on a gain-trial EV tie (multiplier 2, alpha=lambda=1)
    TrialSpec gain_tie = helpers::gain_trial(45.0, 2.0);
    p.beta_gain = 0.5;
    CHECK(p_gamble(gain_tie, p) == doctest::Approx(0.75));
    p.beta_gain = -0.5;
    CHECK(p_gamble(gain_tie, p) == doctest::Approx(0.25));

    // beta_gain = 1 forces gambling on gain trials regardless of dU and mu
    p.beta_gain = 1.0;
    p.mu = 9.0;
    CHECK(p_gamble(helpers::gain_trial(55.0, 5.0), p) == doctest::Approx(1.0));
    CHECK(p_gamble(helpers::gain_trial(35.0, 1.68), p) == doctest::Approx(1.0));
}

TEST_CASE("nesting identities hold pointwise to 1e-12") {
    Rng rng(2718);
    for (int i = 0; i < 10000; ++i) {
        const TrialSpec trial = random_trial(rng);

        ChoiceParams cm3 = random_params(ChoiceModel::cm3, rng);
        ChoiceParams cm2 = cm3;
        cm2.model_id = ChoiceModel::cm2;
        cm2 = canonical_choice_params(cm2);
        ChoiceParams cm3_nobias = cm3;
        cm3_nobias.beta_gain = 0.0;
        cm3_nobias.beta_loss = 0.0;
        CHECK(p_gamble(trial, cm3_nobias) == doctest::Approx(p_gamble(trial, cm2)).epsilon(1e-12));

        ChoiceParams cm1 = cm2;
        cm1.model_id = ChoiceModel::cm1;
        cm1 = canonical_choice_params(cm1);
        ChoiceParams cm2_linear = cm2;
        cm2_linear.alpha = 1.0;
        cm2_linear.lambda = 1.0;
        CHECK(p_gamble(trial, cm2_linear) == doctest::Approx(p_gamble(trial, cm1)).epsilon(1e-12));

        ChoiceParams cm4 = random_params(ChoiceModel::cm4, rng);
        ChoiceParams cm4_nobias = cm4;
        cm4_nobias.beta_bias = 0.0;
        ChoiceParams cm2_marginal = cm4;
        cm2_marginal.model_id = ChoiceModel::cm2;
        cm2_marginal = canonical_choice_params(cm2_marginal);
        CHECK(p_gamble(trial, cm4_nobias) ==
              doctest::Approx(p_gamble(trial, cm2_marginal)).epsilon(1e-12));
    }
}

TEST_CASE("p_gamble is a probability and respects the bias range") {
    Rng rng(13);
    for (int i = 0; i < 20000; ++i) {
        const TrialSpec trial = random_trial(rng);
        const ChoiceParams p = random_params(ChoiceModel::cm3, rng);
        const double prob = p_gamble(trial, p);
        CHECK(prob >= 0.0);
        CHECK(prob <= 1.0);

        double beta_val = 0.0;
        if (trial.trial_type == TrialType::gain) beta_val = p.beta_gain;
        if (trial.trial_type == TrialType::loss) beta_val = p.beta_loss;
        if (beta_val >= 0.0) CHECK(prob >= beta_val);
        else CHECK(prob <= 1.0 + beta_val);
    }
}

TEST_CASE("p_gamble is monotone in the utility difference") {
    // Vary the gamble's attractiveness on gain trials with a fixed bias.
    ChoiceParams p = params_for(ChoiceModel::cm3);
    p.alpha = 0.9;
    p.lambda = 1.5;
    p.mu = 0.7;
    p.beta_gain = 0.25;
    double last = -1.0;
    for (double mult : {1.68, 1.82, 2.0, 2.22, 2.48, 2.8, 3.16, 3.6, 4.2, 5.0}) {
        const double prob = p_gamble(helpers::gain_trial(45.0, mult), p);
        CHECK(prob >= last);
        last = prob;
    }
}

TEST_CASE("mixed trials ignore the Pavlovian biases") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        ChoiceParams p = random_params(ChoiceModel::cm3, rng);
        const TrialSpec trial = helpers::mixed_trial(45.0, 1.35);
        ChoiceParams q = p;
        q.beta_gain = rng.uniform(-1.0, 1.0);
        q.beta_loss = rng.uniform(-1.0, 1.0);
        CHECK(p_gamble(trial, p) == p_gamble(trial, q));
    }
}

TEST_CASE("choice_nll fixtures") {
    // 90 trials at p = 0.5 -> 90 ln 2.
    auto task = std::make_shared<const TaskSet>(build_trial_set(4));
    SessionTranscript transcript;
    transcript.task = task;
    double cumulative = kInitialEndowment;
    for (int i = 1; i <= 90; ++i) {
        TranscriptRow row;
        row.trial = i;
        row.choice = Choice::certain;
        row.outcome = task->trials[static_cast<std::size_t>(i) - 1].certain_value;
        cumulative += row.outcome;
        row.cumulative_points = cumulative;
        transcript.rows.push_back(row);
    }
    ChoiceParams chance = params_for(ChoiceModel::cm1);
    chance.mu = 0.0;  // logistic(0) = 0.5 everywhere
    CHECK(choice_nll(chance, transcript) ==
          doctest::Approx(62.38324625039508).epsilon(1e-12));

    // Two trials with P(chosen) = 0.5 and 0.8.
    auto tiny = helpers::tiny_task({helpers::mixed_trial(45.0, 1.0),
                                    helpers::gain_trial(45.0, 2.0)},
                                   {});
    SessionTranscript two;
    two.task = tiny;
    two.rows.push_back({1, Choice::gamble, 45.0, 545.0});
    two.rows.push_back({2, Choice::gamble, 90.0, 635.0});
    ChoiceParams p = params_for(ChoiceModel::cm3);
    p.alpha = 1.0;
    p.lambda = 1.0;
    p.mu = 1.0;
    p.beta_gain = 0.6;  // gain tie: p = 0.4*0.5 + 0.6 = 0.8; mixed tie: 0.5
    CHECK(choice_nll(p, two) == doctest::Approx(0.9162907318741551).epsilon(1e-12));
}

TEST_CASE("saturated bias contributes zero NLL on its trials") {
    auto tiny = helpers::tiny_task({helpers::gain_trial(35.0, 2.0),
                                    helpers::gain_trial(55.0, 5.0)},
                                   {});
    SessionTranscript t;
    t.task = tiny;
    t.rows.push_back({1, Choice::gamble, 70.0, 570.0});
    t.rows.push_back({2, Choice::gamble, 275.0, 845.0});
    ChoiceParams p = params_for(ChoiceModel::cm3);
    p.beta_gain = 1.0;
    p.mu = 0.3;
    CHECK(choice_nll(p, t) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("choice_nll matches the brute-force oracle on random transcripts") {
    Rng rng(31337);
    for (int rep = 0; rep < 100; ++rep) {
        auto task = std::make_shared<const TaskSet>(build_trial_set(rng.next_u64()));
        SessionTranscript t;
        t.task = task;
        double cumulative = kInitialEndowment;
        for (int i = 1; i <= 90; ++i) {
            const auto& trial = task->trials[static_cast<std::size_t>(i) - 1];
            TranscriptRow row;
            row.trial = i;
            row.choice = rng.coin() ? Choice::gamble : Choice::certain;
            row.outcome = row.choice == Choice::certain
                              ? trial.certain_value
                              : (rng.coin() ? trial.gamble_gain : trial.gamble_loss);
            cumulative += row.outcome;
            row.cumulative_points = cumulative;
            t.rows.push_back(row);
        }
        const auto model = static_cast<ChoiceModel>(rng.uniform_int(0, 3));
        const ChoiceParams p = random_params(model, rng);
        const double ours = choice_nll(p, t);
        const double reference = oracles::choice_nll(p, t);
        CHECK(ours == doctest::Approx(reference).epsilon(1e-9));
    }
}

TEST_CASE("canonical parameters pin fixed values") {
    ChoiceParams p;
    p.model_id = ChoiceModel::cm1;
    p.alpha = 0.7;
    p.lambda = 3.0;
    p.beta_gain = 0.5;
    p.beta_bias = 4.0;
    const ChoiceParams c = canonical_choice_params(p);
    CHECK(c.alpha == 1.0);
    CHECK(c.lambda == 1.0);
    CHECK(c.beta_gain == 0.0);
    CHECK(c.beta_bias == 0.0);
    CHECK(choice_model_n_params(ChoiceModel::cm1) == 1);
    CHECK(choice_model_n_params(ChoiceModel::cm2) == 3);
    CHECK(choice_model_n_params(ChoiceModel::cm3) == 5);
    CHECK(choice_model_n_params(ChoiceModel::cm4) == 4);
}
