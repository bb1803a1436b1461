#include "sprac/bench.hpp"
#include "sprac/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace sprac;

namespace {

ExperimentPlan small_plan()
{
    ExperimentPlan plan;
    plan.generation_sizes = {4, 6};
    plan.segment_counts = {1, 2};
    plan.error_counts = {0, 3};
    plan.repetitions = 6;
    plan.seed = 42;
    plan.record_timings = false;
    return plan;
}

std::string csv_of(const ExperimentPlan& plan)
{
    std::ostringstream out;
    const auto table = run_experiment(plan);
    write_csv(out, table.rows);
    return out.str();
}

} // namespace

TEST(MeanStd, Examples)
{
    const std::vector<double> one{5.0};
    EXPECT_DOUBLE_EQ(mean_stddev(one).mean, 5.0);
    EXPECT_DOUBLE_EQ(mean_stddev(one).stddev, 0.0);
    const std::vector<double> two{2.0, 4.0};
    EXPECT_DOUBLE_EQ(mean_stddev(two).mean, 3.0);
    EXPECT_DOUBLE_EQ(mean_stddev(two).stddev, std::sqrt(2.0));   // sample estimator
    const std::vector<double> constant(10000, 7.25);
    EXPECT_DOUBLE_EQ(mean_stddev(constant).mean, 7.25);
    EXPECT_DOUBLE_EQ(mean_stddev(constant).stddev, 0.0);
}

TEST(Bench, CsvHeaderIsExact)
{
    std::ostringstream out;
    write_csv(out, {});
    EXPECT_EQ(out.str(),
              "scheme,generation_size,symbol_size,segment_count,error_count,repetition,status,"
              "estimation_ns,correction_ns,encoding_ns,decoding_ns,crc_evaluations,acr_rounds,overhead\n");
}

TEST(Bench, ZeroErrorsAlwaysRecoverWithoutSearching)
{
    auto plan = small_plan();
    plan.error_counts = {0};
    const auto table = run_experiment(plan);
    ASSERT_EQ(table.rows.size(), 2U * 2U * 6U * 2U);
    for (const auto& row : table.rows) {
        EXPECT_EQ(row.metrics.status, RecoveryStatus::recovered);
        EXPECT_EQ(row.metrics.crc_evaluations, 0U);
    }
}

TEST(Bench, FigureThreeBCell)
{
    ExperimentPlan plan;
    plan.generation_sizes = {6};
    plan.segment_counts = {3};
    plan.error_counts = {6};
    plan.placement = Placement::spread;
    plan.target_packets = {0};
    plan.repetitions = 50;
    plan.record_timings = false;
    const auto summary = aggregate(run_experiment(plan).rows);
    ASSERT_EQ(summary.size(), 2U);
    EXPECT_EQ(summary[0].scheme, Scheme::sprac);
    EXPECT_LE(summary[0].crc_evaluations.mean, 12.0);
    EXPECT_LE(summary[1].crc_evaluations.mean, 64.0);
    EXPECT_DOUBLE_EQ(summary[0].recovered_fraction, 1.0);
    EXPECT_DOUBLE_EQ(summary[1].recovered_fraction, 1.0);
}

TEST(Bench, DeterministicCsv)
{
    const auto plan = small_plan();
    EXPECT_EQ(csv_of(plan), csv_of(plan));
    auto other = plan;
    other.seed = 43;
    EXPECT_NE(csv_of(plan), csv_of(other));
}

TEST(Bench, ThreadsDoNotChangeResults)
{
    auto plan = small_plan();
    const auto serial = csv_of(plan);
    plan.threads = 3;
    EXPECT_EQ(csv_of(plan), serial);
}

TEST(Bench, OverheadColumnMatchesFraming)
{
    const auto plan = small_plan();
    for (const auto& row : run_experiment(plan).rows) {
        GenerationConfig c;
        c.generation_size = row.generation_size;
        c.symbol_size = row.symbol_size;
        EXPECT_DOUBLE_EQ(row.metrics.overhead, overhead_ratio(SegmentLayout::for_config(c, row.segment_count), c));
    }
}

TEST(Bench, RowOrderAndSchemes)
{
    auto plan = small_plan();
    plan.scheme = Scheme::daprac;
    const auto table = run_experiment(plan);
    for (const auto& row : table.rows) {
        EXPECT_EQ(row.scheme, Scheme::daprac);
    }
    EXPECT_EQ(table.rows.front().generation_size, 4U);
    EXPECT_EQ(table.rows.back().generation_size, 6U);
    EXPECT_EQ(table.rows.back().repetition, 5U);
}

TEST(Bench, InfeasibleCellsAreSkipped)
{
    ExperimentPlan plan;
    plan.generation_sizes = {6};
    plan.segment_counts = {3, 4};   // 4 does not divide 6
    plan.error_counts = {2, 100000};
    plan.repetitions = 2;
    plan.record_timings = false;
    const auto table = run_experiment(plan);
    EXPECT_EQ(table.skipped.size(), 3U);
    EXPECT_EQ(table.rows.size(), 2U * 2U);
}

TEST(Bench, PlanValidation)
{
    ExperimentPlan plan;
    plan.repetitions = 0;
    EXPECT_THROW(plan.validate(), Error);
    plan = ExperimentPlan{};
    plan.error_counts.clear();
    EXPECT_THROW(plan.validate(), Error);
    plan = ExperimentPlan{};
    plan.placement = Placement::explicit_positions;
    EXPECT_THROW(plan.validate(), Error);
    EXPECT_EQ(parse_scheme("both"), Scheme::both);
    EXPECT_THROW((void)parse_scheme("nope"), Error);
}

TEST(Bench, AggregateGroupsPerCell)
{
    std::vector<MetricsRow> rows(3);
    rows[0].metrics.crc_evaluations = 2;
    rows[1].metrics.crc_evaluations = 4;
    rows[2].error_count = 1;
    rows[2].metrics.status = RecoveryStatus::unrecoverable;
    const auto summary = aggregate(rows);
    ASSERT_EQ(summary.size(), 2U);
    EXPECT_EQ(summary[0].runs, 2U);
    EXPECT_DOUBLE_EQ(summary[0].crc_evaluations.mean, 3.0);
    EXPECT_DOUBLE_EQ(summary[0].crc_evaluations.stddev, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(summary[1].recovered_fraction, 0.0);
    EXPECT_TRUE(aggregate({}).empty());

    std::ostringstream out;
    write_summary_csv(out, summary);
    const std::string text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Bench, TimingsAreRecordedWhenAsked)
{
    auto plan = small_plan();
    plan.record_timings = true;
    plan.error_counts = {3};
    bool any = false;
    for (const auto& row : run_experiment(plan).rows) {
        EXPECT_GE(row.metrics.decoding_ns, 0);
        EXPECT_GE(row.metrics.encoding_ns, 0);
        any = any || row.metrics.encoding_ns > 0;
    }
    EXPECT_TRUE(any);
}
