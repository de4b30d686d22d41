// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"

#include "drawspace/error.hpp"
#include "drawspace/reward.hpp"
#include "support.hpp"

using namespace drawspace;
using namespace drawspace::reward;
using episode::Termination;

namespace {

dsl::FinalAnswer num(double v) { return {std::to_string(v), std::nullopt, v}; }
dsl::FinalAnswer letter(char c) { return {std::string(1, c), c, std::nullopt}; }

// Explicit loop over the ladder with the margins written as integer
// twentieths: rel < (20 - i) / 20  <=>  20 * |gt - pred| < (20 - i) * |gt|.
double mra_integers(long long gt, long long pred) {
    if (gt == 0) return pred == 0 ? 1.0 : 0.0;
    int passed = 0;
    for (int i = 10; i < 20; ++i) passed += 20 * std::llabs(gt - pred) < (20 - i) * std::llabs(gt);
    return passed / 10.0;
}

episode::EpisodeTrace answered(std::optional<dsl::FinalAnswer> a, bool all_executed = true) {
    episode::EpisodeTrace tr;
    tr.termination = Termination::Answered;
    episode::Step s;
    episode::OpRecord rec;
    rec.op = {1, canvas::BBoxGeometry{0, 0, 1, 1}, "x"};
    rec.executed = all_executed;
    s.ops.push_back(rec);
    tr.steps.push_back(s);
    tr.steps.push_back({});
    tr.final_answer = std::move(a);
    return tr;
}

Task numeric_task(std::string answer) {
    Task t;
    t.id = "n";
    t.type = dsl::QuestionType::Numeric;
    t.answer = std::move(answer);
    return t;
}

}  // namespace

TEST_CASE("ladder defaults") {
    const ConfidenceLadder c;
    REQUIRE(c.size() == 10);
    CHECK(c.thresholds()[0] == 0.5);
    CHECK(c.thresholds()[9] == 0.95);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.thresholds()[i] > c.thresholds()[i - 1]);
    CHECK_THROWS_AS(ConfidenceLadder({0.5, 0.5}), Error);
    CHECK_THROWS_AS(ConfidenceLadder({1.0}), Error);
    CHECK_THROWS_AS(ConfidenceLadder(std::vector<double>{}), Error);
}

TEST_CASE("score_choice examples") {
    CHECK(score_choice('B', letter('B')) == 1.0);
    CHECK(score_choice('B', letter('C')) == 0.0);
    CHECK(score_choice('B', dsl::FinalAnswer{"??", std::nullopt, std::nullopt}) == 0.0);
    CHECK(score_choice('b', letter('B')) == 1.0);
}

TEST_CASE("score_numeric_mra examples") {
    CHECK(score_numeric_mra(7, num(7)) == 1.0);
    CHECK(score_numeric_mra(10, num(9)) == 0.8);
    CHECK(score_numeric_mra(10, 9.0) == mra_integers(10, 9));
    CHECK(score_numeric_mra(10, num(5)) == 0.0);
    CHECK(score_numeric_mra(0, 0.0) == 1.0);
    CHECK(score_numeric_mra(0, 1e-12) == 0.0);
    CHECK(score_numeric_mra(10, std::nan("")) == 0.0);
    CHECK(score_numeric_mra(10, INFINITY) == 0.0);
    CHECK(score_numeric_mra(10, dsl::FinalAnswer{"x", std::nullopt, std::nullopt}) == 0.0);
    CHECK(score_numeric_mra(-10, -9.0) == mra_integers(-10, -9));
}

TEST_CASE("MRA boundary values use strict inequality") {
    for (int i = 10; i < 20; ++i) {
        // rel err exactly 1 - theta_i fails that threshold and passes the looser ones.
        const long long gt = 20;
        const long long pred = gt - (20 - i);
        CHECK(score_numeric_mra(gt, static_cast<double>(pred)) == mra_integers(gt, pred));
        CHECK(score_numeric_mra(gt, static_cast<double>(pred)) == (i - 10) / 10.0);
    }
}

TEST_CASE("MRA properties") {
    testsupport::Rng rng(3);
    for (int n = 0; n < 2000; ++n) {
        const long long gt = rng.between(-500, 500);
        const long long a = rng.between(-1000, 1000);
        const long long b = rng.between(-1000, 1000);
        const double sa = score_numeric_mra(gt, static_cast<double>(a));
        CHECK(sa == mra_integers(gt, a));
        CHECK(std::round(sa * 10) == sa * 10);
        if (gt != 0 && std::llabs(gt - a) <= std::llabs(gt - b)) {
            CHECK(sa >= score_numeric_mra(gt, static_cast<double>(b)));
        }
    }
}

TEST_CASE("score_format") {
    CHECK(score_format(answered(letter('A'))) == 1);
    CHECK(score_format(answered(letter('A'), false)) == 0);
    CHECK(score_format(answered(std::nullopt)) == 0);
    CHECK(score_format(answered(dsl::FinalAnswer{"?", std::nullopt, std::nullopt})) == 0);
    episode::EpisodeTrace empty;
    empty.termination = Termination::Answered;
    empty.steps.push_back({});
    empty.final_answer = letter('C');
    CHECK(score_format(empty) == 1);
}

TEST_CASE("total reward and the gate") {
    CHECK(combine_reward(1.0, 1, Termination::Answered, 0.0).total == 2.0);
    CHECK(combine_reward(0.0, 1, Termination::Answered, 0.0).total == 0.0);
    CHECK(combine_reward(0.8, 1, Termination::Answered, 0.0).total == 1.8);
    CHECK(combine_reward(0.3, 1, Termination::Answered, 0.3).gate == 0);
    for (auto t : {Termination::NoOpFault, Termination::ImageCap, Termination::DuplicateOp,
                   Termination::PolicyError}) {
        const auto r = combine_reward(1.0, 1, t, 0.0);
        CHECK(r.total == 0.0);
        CHECK(r.gate == 0);
    }
    const auto cap = combine_reward(1.0, 0, Termination::StepCap, 0.0);
    CHECK(cap.total == 1.0);

    const auto task = numeric_task("10");
    const auto r = total_reward(answered(num(9)), task);
    CHECK(r.s_correct == 0.8);
    CHECK(r.s_format == 1);
    CHECK(r.total == 1.8);
    CHECK_THROWS_AS(total_reward(answered(num(9)), task, 1.0), Error);
    CHECK(reward_from_json(to_json(r)).total == r.total);
}

TEST_CASE("ground truth parsing") {
    Task t;
    t.answer = "(c)";
    CHECK(ground_truth_letter(t) == 'C');
    CHECK(ground_truth_number(numeric_task("-2.5")) == -2.5);
    CHECK_THROWS_AS(ground_truth_number(numeric_task("ten")), Error);
    CHECK_THROWS_AS(ground_truth_number(numeric_task("inf")), Error);
}
