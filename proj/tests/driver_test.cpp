#include "kacfem/driver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace kacfem;

TEST(RunAdaptive, PoissonGlobalSanity) {
  RunConfig config;
  config.problem = "poisson";
  config.marking = {MarkingKind::global, 1.0};
  config.max_iterations = 5;
  const RunResult result = run_adaptive(config);
  ASSERT_EQ(result.records.size(), 5u);
  EXPECT_EQ(result.status, RunStatus::reached_max_iterations);
  for (std::size_t i = 1; i < result.records.size(); ++i) {
    EXPECT_GT(result.records[i].elements, result.records[i - 1].elements);
    EXPECT_GE(result.records[i].dofs, result.records[i - 1].dofs);
    EXPECT_LT(result.records[i].global_eta, result.records[i - 1].global_eta);
    EXPECT_FALSE(result.records[i].h1_error.has_value());
  }
  EXPECT_EQ(result.records.front().k, 1);
  EXPECT_EQ(result.records.back().k, 5);
}

TEST(RunAdaptive, StopsOnMaxDofs) {
  RunConfig config;
  config.problem = "ex1";
  config.marking = {MarkingKind::global, 1.0};
  config.max_dofs = 500;
  config.max_iterations = 50;
  const RunResult result = run_adaptive(config);
  EXPECT_EQ(result.status, RunStatus::reached_max_dofs);
  EXPECT_GT(result.records.back().dofs, 500);
  for (const IterationRecord& r : result.records) {
    ASSERT_TRUE(r.h1_error.has_value());
    EXPECT_GE(r.global_eta, 0.0);
  }
}

TEST(RunAdaptive, DofsAndElementsStrictlyIncreaseOnExampleOne) {
  RunConfig config;
  config.problem = "ex1";
  config.marking = {MarkingKind::maximum, 0.7};
  config.max_iterations = 15;
  const RunResult result = run_adaptive(config);
  for (std::size_t i = 1; i < result.records.size(); ++i) {
    EXPECT_GT(result.records[i].elements, result.records[i - 1].elements);
    if (result.records[i - 1].dofs > 0)
      EXPECT_GT(result.records[i].dofs, result.records[i - 1].dofs);
  }
}

TEST(RunAdaptive, MeshHookSeesEveryIteration) {
  RunConfig config;
  config.problem = "poisson";
  config.marking = {MarkingKind::doerfler, 0.5};
  config.max_iterations = 4;
  std::vector<int> seen;
  const RunResult result =
      run_adaptive(config, [&seen](int k, const Mesh&) { seen.push_back(k); });
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(result.records.size(), 4u);
}

TEST(RunAdaptive, DeterministicRecords) {
  RunConfig config;
  config.problem = "ex1";
  config.marking = {MarkingKind::maximum, 0.7};
  config.max_iterations = 9;
  const std::string a = records_to_csv(run_adaptive(config).records);
  const std::string b = records_to_csv(run_adaptive(config).records);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.empty());
}

TEST(FitRate, SyntheticSlopes) {
  std::vector<IterationRecord> records;
  for (int k = 1; k <= 10; ++k) {
    IterationRecord r;
    r.k = k;
    r.dofs = 50 * k * k;
    r.h1_error = 3.0 / std::sqrt(static_cast<double>(r.dofs));
    records.push_back(r);
  }
  EXPECT_NEAR(fit_rate(records, 10), -0.5, 1e-10);
  EXPECT_NEAR(fit_rate(records, 5), -0.5, 1e-10);

  for (IterationRecord& r : records) r.h1_error = 0.125;
  EXPECT_NEAR(fit_rate(records, 10), 0.0, 1e-12);

  std::vector<IterationRecord> two(records.begin(), records.begin() + 2);
  EXPECT_THROW(fit_rate(two, 10), std::invalid_argument);
  for (IterationRecord& r : records) r.h1_error.reset();
  EXPECT_THROW(fit_rate(records, 10), std::invalid_argument);
}

TEST(FitRate, SyntheticInverseDofs) {
  std::vector<IterationRecord> records;
  for (int k = 1; k <= 8; ++k) {
    IterationRecord r;
    r.k = k;
    r.dofs = 13 << k;
    r.h1_error = 7.25 / static_cast<double>(r.dofs);
    records.push_back(r);
  }
  EXPECT_NEAR(fit_rate(records, 8), -1.0, 1e-9);
  EXPECT_NEAR(fit_rate_final_decade(records), -1.0, 1e-9);
}

TEST(RecordsCsv, SchemaAndRoundTrip) {
  std::vector<IterationRecord> records;
  IterationRecord a;
  a.k = 1;
  a.dofs = 12;
  a.elements = 30;
  a.global_eta = 0.25;
  a.energy = -1.0 / 3.0;
  a.h1_error = 0.125;
  a.succ_diff = 0.5;
  a.solve_iters = 7;
  records.push_back(a);
  IterationRecord b = a;
  b.k = 2;
  b.h1_error.reset();
  records.push_back(b);

  const std::string csv = records_to_csv(records);
  std::istringstream first_line(csv);
  std::string header;
  std::getline(first_line, header);
  EXPECT_EQ(header, "k,dofs,elements,eta,energy,h1_error,succ_diff,solve_iters");

  std::istringstream in(csv);
  const std::vector<IterationRecord> back = parse_records_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].k, 1);
  EXPECT_EQ(back[0].dofs, 12);
  EXPECT_DOUBLE_EQ(back[0].global_eta, 0.25);
  EXPECT_DOUBLE_EQ(back[0].energy, -1.0 / 3.0);
  ASSERT_TRUE(back[0].h1_error.has_value());
  EXPECT_DOUBLE_EQ(*back[0].h1_error, 0.125);
  EXPECT_FALSE(back[1].h1_error.has_value());
  EXPECT_EQ(back[1].solve_iters, 7);
}

TEST(RecordsCsv, RejectsMalformedInput) {
  std::istringstream empty("");
  EXPECT_THROW(parse_records_csv(empty), CsvError);
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(parse_records_csv(bad_header), CsvError);
  std::istringstream bad_row("k,dofs,elements,eta,energy,h1_error,succ_diff,solve_iters\n1,2\n");
  EXPECT_THROW(parse_records_csv(bad_row), CsvError);
  std::istringstream bad_field(
      "k,dofs,elements,eta,energy,h1_error,succ_diff,solve_iters\n1,2,3,x,5,,7,8\n");
  EXPECT_THROW(parse_records_csv(bad_field), CsvError);
}

TEST(RunAdaptive, UnknownProblemThrows) {
  RunConfig config;
  config.problem = "nope";
  EXPECT_THROW(run_adaptive(config), std::invalid_argument);
}
