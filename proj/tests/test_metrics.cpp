#include <doctest.h>

#include <vector>

#include "ems/errors.hpp"
#include "ems/metrics.hpp"
#include "ems/types.hpp"

using ems::AlignmentVector;
using ems::compute_metrics;
using ems::ContractError;
using ems::ems_f1;
using ems::ems_precision;
using ems::ems_recall;
using ems::EmsMetrics;
using ems::kUnmatched;
using ems::map_scores_to_answer;
using ems::MatchAssignment;
using ems::Side;

namespace {

MatchAssignment assignment(std::vector<int> a, int answer_count) {
  return MatchAssignment{std::move(a), answer_count};
}

AlignmentVector ref_vec(std::vector<double> s) {
  return AlignmentVector{std::move(s), Side::kReference};
}

AlignmentVector ans_vec(std::vector<double> s) {
  return AlignmentVector{std::move(s), Side::kAnswer};
}

}  // namespace

TEST_CASE("assignment validation") {
  CHECK_NOTHROW(assignment({0, 2, kUnmatched}, 3).validate());
  CHECK_THROWS_AS(assignment({3}, 3).validate(), ContractError);
  CHECK_THROWS_AS(assignment({-2}, 3).validate(), ContractError);
  CHECK_NOTHROW(assignment({kUnmatched, kUnmatched}, 0).validate());
}

TEST_CASE("max-mapping onto the answer side") {
  const auto a = assignment({3, 1, 2, kUnmatched}, 4);
  const auto mapped = map_scores_to_answer(a, ref_vec({0.8, 1.0, 0.5, 0.0}));
  CHECK(mapped.side == Side::kAnswer);
  CHECK(mapped.scores == std::vector<double>{0.0, 1.0, 0.5, 0.8});
}

TEST_CASE("max-mapping takes the maximum over colliding reference points") {
  const auto a = assignment({0, 0, 1}, 2);
  const auto mapped = map_scores_to_answer(a, ref_vec({0.3, 0.9, 0.4}));
  CHECK(mapped.scores == std::vector<double>{0.9, 0.4});
}

TEST_CASE("max-mapping contract checks") {
  const auto a = assignment({0, 1}, 2);
  CHECK_THROWS_AS(map_scores_to_answer(a, ref_vec({0.5})), ContractError);
  CHECK_THROWS_AS(map_scores_to_answer(a, ans_vec({0.5, 0.5})), ContractError);
  CHECK_THROWS_AS(map_scores_to_answer(assignment({0, 2}, 2), ref_vec({0.5, 0.5})),
                  ContractError);
}

TEST_CASE("recall is the mean of reference-side scores") {
  CHECK(ems_recall(ref_vec({0.8, 1.0, 0.5, 0.0})) == doctest::Approx(0.575).epsilon(1e-12));
  CHECK(ems_recall(ref_vec({1.0, 1.0})) == 1.0);
  CHECK(ems_recall(ref_vec({0.0})) == 0.0);
  CHECK_THROWS_AS(ems_recall(ref_vec({})), ContractError);
  CHECK_THROWS_AS(ems_recall(ans_vec({0.5})), ContractError);
  CHECK_THROWS_AS(ems_recall(ref_vec({-0.1})), ContractError);
}

TEST_CASE("precision tolerates an empty answer") {
  CHECK(ems_precision(ans_vec({0.0, 1.0, 0.5, 0.8})) == doctest::Approx(0.575).epsilon(1e-12));
  CHECK(ems_precision(ans_vec({})) == 0.0);
  CHECK_THROWS_AS(ems_precision(ref_vec({0.5})), ContractError);
}

TEST_CASE("f1 is a harmonic mean with a zero guard") {
  CHECK(ems_f1(0.3, 0.5) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(ems_f1(0.0, 0.0) == 0.0);
  CHECK(ems_f1(1.0, 1.0) == 1.0);
  CHECK(ems_f1(0.0, 0.7) == 0.0);
  CHECK_THROWS_AS(ems_f1(1.2, 0.5), ContractError);
  CHECK_THROWS_AS(ems_f1(0.5, -0.1), ContractError);
}

TEST_CASE("compute_metrics bundles the full chain") {
  const auto a = assignment({3, 1, 2, kUnmatched}, 4);
  const auto m = compute_metrics(a, ref_vec({0.8, 1.0, 0.5, 0.0}));
  CHECK(m.n_ref == 4);
  CHECK(m.n_ans == 4);
  CHECK(m.recall == doctest::Approx(0.575).epsilon(1e-12));
  CHECK(m.precision == doctest::Approx(0.575).epsilon(1e-12));
  CHECK(m.f1 == doctest::Approx(0.575).epsilon(1e-12));
}

TEST_CASE("compute_metrics with an empty answer zeroes precision and f1") {
  const auto a = assignment({kUnmatched, kUnmatched}, 0);
  const auto m = compute_metrics(a, ref_vec({0.0, 0.0}));
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.n_ans == 0);
}

TEST_CASE("aggregate_metrics macro-averages") {
  EmsMetrics a{1.0, 0.5, 0.75, 4, 4};
  EmsMetrics b{0.5, 0.25, 0.25, 6, 2};
  const std::vector<EmsMetrics> rows{a, b};
  const auto agg = aggregate_metrics(rows);
  CHECK(agg.precision == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(agg.recall == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(agg.f1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(agg.n_ref == 10);
  CHECK(agg.n_ans == 6);
  CHECK_THROWS_AS(aggregate_metrics(std::vector<EmsMetrics>{}), ContractError);
}
