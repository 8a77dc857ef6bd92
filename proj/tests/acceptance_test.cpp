// Acceptance suite: every threshold pinned here is the exit gate for the
// bundled experiments. One test per criterion; each prints its pass/fail
// line with the measured values.

#include <gtest/gtest.h>

#include <cstdio>

#include "ssm/verify.hpp"

namespace ssm {
namespace {

const std::vector<CriterionOutcome>& outcomes() {
  static const std::vector<CriterionOutcome> cached = [] {
    auto result = run_acceptance_criteria();
    for (const auto& outcome : result) {
      std::printf("%s  criterion %d: %s — %s\n",
                  outcome.passed ? "PASS" : "FAIL", outcome.number,
                  outcome.title.c_str(), outcome.detail.c_str());
    }
    std::fflush(stdout);
    return result;
  }();
  return cached;
}

void expect_criterion(int number) {
  for (const auto& outcome : outcomes()) {
    if (outcome.number == number) {
      EXPECT_TRUE(outcome.passed) << outcome.title << ": " << outcome.detail;
      return;
    }
  }
  FAIL() << "criterion " << number << " missing";
}

TEST(Acceptance, Criterion1CarFollowingSnapshot) { expect_criterion(1); }
TEST(Acceptance, Criterion2MergingSnapshot) { expect_criterion(2); }
TEST(Acceptance, Criterion3ThresholdErrors) { expect_criterion(3); }
TEST(Acceptance, Criterion4Experiment1Errors) { expect_criterion(4); }
TEST(Acceptance, Criterion5Experiment2Error) { expect_criterion(5); }
TEST(Acceptance, Criterion6Experiment4Sequence) { expect_criterion(6); }
TEST(Acceptance, Criterion7PropertySuite) { expect_criterion(7); }
TEST(Acceptance, Criterion8ClosedFormEquivalences) { expect_criterion(8); }

}  // namespace
}  // namespace ssm
