#include <gtest/gtest.h>

#include <boost/regex.hpp>
#include <nlohmann/json.hpp>

#include "iebench/error.hpp"
#include "iebench/report.hpp"
#include "test_support.hpp"

using namespace iebench;
using iebench::testutil::data_dir;
using iebench::testutil::slurp;
using iebench::testutil::TempDir;

namespace {

UnitResult unit(const std::string& tool, const char* label, int page, double p, double r, double f, double acc) {
  UnitResult u;
  u.tool = tool;
  u.key = PageKey{"1401.0001", page};
  u.label = ContentLabel(label);
  u.scores.precision = p;
  u.scores.recall = r;
  u.scores.f1 = f;
  u.scores.accuracy = acc;
  return u;
}

UnitResult f1_unit(const std::string& tool, const char* label, double f, int page = 0) {
  return unit(tool, label, page, f, f, f, f);
}

std::vector<UnitResult> journal_results(const std::string& tool) {
  return read_journal(data_dir() / "golden/expected" / (tool + ".jsonl")).results;
}

std::size_t count_matches(const std::string& text, const std::string& pattern) {
  const boost::regex re(pattern);
  return std::distance(boost::sregex_iterator(text.begin(), text.end(), re), boost::sregex_iterator());
}

std::vector<double> bar_heights(const std::string& svg) {
  std::vector<double> heights;
  const boost::regex re(R"re(<rect class="bar"[^>]* height="([0-9.]+)")re");
  for (boost::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it) {
    heights.push_back(std::stod((*it)[1].str()));
  }
  return heights;
}

}  // namespace

TEST(Aggregate, DetectedAndProcessedCounts) {
  std::vector<UnitResult> results;
  for (int i = 0; i < 10; ++i) results.push_back(f1_unit("t", "title", i < 7 ? 0.5 : 0.0, i));
  const auto rows = aggregate(results);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].detected, 10u);
  EXPECT_EQ(rows[0].processed, 7u);
}

TEST(Aggregate, EmptyInput) { EXPECT_TRUE(aggregate({}).empty()); }

TEST(Aggregate, SixUnitFixtureMeans) {
  // f1 values: 0.8, 0, 0.5, 0.6, 0, 1.0 ; processed = 4
  const std::vector<UnitResult> results = {
      unit("t", "author", 0, 1.0, 2.0 / 3.0, 0.8, 0.9),   unit("t", "author", 1, 0.0, 0.0, 0.0, 0.3),
      unit("t", "author", 2, 0.5, 0.5, 0.5, 0.6),         unit("t", "author", 3, 0.75, 0.5, 0.6, 0.7),
      unit("t", "author", 4, 0.0, 0.0, 0.0, 0.0),         unit("t", "author", 5, 1.0, 1.0, 1.0, 1.0),
  };
  const auto rows = aggregate(results);
  ASSERT_EQ(rows.size(), 1u);
  const auto& row = rows[0];
  EXPECT_EQ(row.detected, 6u);
  EXPECT_EQ(row.processed, 4u);
  EXPECT_DOUBLE_EQ(row.over_processed.f1, (0.8 + 0.5 + 0.6 + 1.0) / 4);
  EXPECT_DOUBLE_EQ(row.over_processed.p, (1.0 + 0.5 + 0.75 + 1.0) / 4);
  EXPECT_DOUBLE_EQ(row.over_processed.r, (2.0 / 3.0 + 0.5 + 0.5 + 1.0) / 4);
  EXPECT_DOUBLE_EQ(row.over_processed.acc, (0.9 + 0.6 + 0.7 + 1.0) / 4);
  EXPECT_DOUBLE_EQ(row.over_detected.f1, (0.8 + 0.5 + 0.6 + 1.0) / 6);
  EXPECT_DOUBLE_EQ(row.over_detected.acc, (0.9 + 0.3 + 0.6 + 0.7 + 1.0) / 6);
  EXPECT_DOUBLE_EQ(row.over_detected.p, (1.0 + 0.5 + 0.75 + 1.0) / 6);
}

TEST(Aggregate, RowsOrderedByToolThenLabel) {
  const auto rows = aggregate({f1_unit("b", "title", 1), f1_unit("a", "title", 1), f1_unit("a", "author", 1)});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].tool + "/" + rows[0].label.name(), "a/author");
  EXPECT_EQ(rows[1].tool + "/" + rows[1].label.name(), "a/title");
  EXPECT_EQ(rows[2].tool, "b");
}

TEST(Aggregate, NullToolHasNothingProcessed) {
  const auto rows = aggregate(journal_results("null"));
  std::size_t detected = 0;
  for (const auto& row : rows) {
    EXPECT_EQ(row.processed, 0u);
    detected += row.detected;
  }
  EXPECT_EQ(detected, 13u);
}

TEST(CumulativeF1, PublishedMetadataSum) {
  const auto rows = aggregate({f1_unit("grobid", "title", 0.91), f1_unit("grobid", "abstract", 0.82),
                               f1_unit("grobid", "author", 0.52)});
  const auto summary = cumulative_f1(rows, Task::metadata);
  EXPECT_EQ(summary.cumulative_f1, 2.25);
  EXPECT_NEAR(summary.cumulative_f1_unrounded, 2.25, 1e-12);
  EXPECT_EQ(summary.max_possible, 3.0);
  EXPECT_EQ(summary.tool, "grobid");
}

TEST(CumulativeF1, PerfectMetadataIsThree) {
  const auto rows = aggregate(journal_results("perfect"));
  EXPECT_EQ(cumulative_f1(rows, Task::metadata).cumulative_f1, 3.0);
}

TEST(CumulativeF1, MissingLabelContributesZero) {
  const auto rows = aggregate({f1_unit("t", "title", 0.91), f1_unit("t", "author", 0.52)});
  EXPECT_EQ(cumulative_f1(rows, Task::metadata).cumulative_f1, 1.43);
}

TEST(CumulativeF1, RoundsEachLabelBeforeSumming) {
  // 0.334 + 0.334 + 0.334: rounded terms give 0.99, raw sum 1.002
  const auto rows =
      aggregate({f1_unit("t", "title", 0.334), f1_unit("t", "abstract", 0.334), f1_unit("t", "author", 0.334)});
  const auto summary = cumulative_f1(rows, Task::metadata);
  EXPECT_EQ(summary.cumulative_f1, 0.99);
  EXPECT_NEAR(summary.cumulative_f1_unrounded, 1.002, 1e-12);
}

TEST(CumulativeF1, VariantChangesPopulation) {
  const auto rows = aggregate({f1_unit("t", "table", 0.8, 0), f1_unit("t", "table", 0.0, 1)});
  SummaryOptions detected;
  detected.variant = MeanVariant::detected;
  EXPECT_EQ(cumulative_f1(rows, Task::table).cumulative_f1, 0.8);
  EXPECT_EQ(cumulative_f1(rows, Task::table, detected).cumulative_f1, 0.4);
}

TEST(CumulativeF1, AmbiguousToolIsConfigError) {
  const auto rows = aggregate({f1_unit("a", "title", 1), f1_unit("b", "title", 1)});
  EXPECT_THROW(cumulative_f1(rows, Task::metadata), ConfigError);
  SummaryOptions pick;
  pick.tool = "b";
  EXPECT_EQ(cumulative_f1(rows, Task::metadata, pick).cumulative_f1, 1.0);
}

TEST(Tasks, LabelMapping) {
  auto names = [](Task t) {
    std::vector<std::string> out;
    for (const auto& l : task_labels(t)) out.push_back(l.name());
    return out;
  };
  EXPECT_EQ(names(Task::metadata), (std::vector<std::string>{"title", "abstract", "author"}));
  EXPECT_EQ(names(Task::reference), (std::vector<std::string>{"reference"}));
  EXPECT_EQ(names(Task::table), (std::vector<std::string>{"table"}));
  EXPECT_EQ(names(Task::general).size(), 7u);
  EXPECT_EQ(task_from("general"), Task::general);
  EXPECT_THROW(task_from("tables"), ConfigError);
}

TEST(RenderReport, EmptyRowsGiveHeaderOnlyCsv) {
  EXPECT_EQ(render_report({}, {}, ReportFormat::csv), "tool,label,detected,processed,acc,f1,p,r\n");
}

TEST(RenderReport, GoldenCsvIsByteIdentical) {
  std::vector<UnitResult> all;
  std::vector<ReportSource> sources;
  for (const char* tool : {"null", "partial", "perfect"}) {
    const Journal j = read_journal(data_dir() / "golden/expected" / (std::string(tool) + ".jsonl"));
    all.insert(all.end(), j.results.begin(), j.results.end());
    sources.push_back({j.header.tool, j.header.config_hash, j.header.pruned});
  }
  const auto rows = aggregate(all);
  const auto csv = render_report(rows, summarize_tasks(rows), ReportFormat::csv, sources);
  EXPECT_EQ(csv, slurp(data_dir() / "golden/expected/report.csv"));
  EXPECT_EQ(csv, render_report(rows, summarize_tasks(rows), ReportFormat::csv, sources));
}

TEST(RenderReport, VariantSelectsColumns) {
  const auto rows = aggregate({f1_unit("t", "table", 0.8, 0), f1_unit("t", "table", 0.0, 1)});
  ReportOptions detected;
  detected.variant = MeanVariant::detected;
  EXPECT_NE(render_report(rows, {}, ReportFormat::csv).find("t,table,2,1,0.800000,0.800000"), std::string::npos);
  EXPECT_NE(render_report(rows, {}, ReportFormat::csv, {}, detected).find("t,table,2,1,0.400000,0.400000"),
            std::string::npos);
}

TEST(RenderReport, JsonMirrorsRows) {
  const auto rows = aggregate(journal_results("partial"));
  const auto doc = nlohmann::json::parse(render_report(rows, summarize_tasks(rows), ReportFormat::json));
  ASSERT_EQ(doc.at("rows").size(), rows.size());
  const auto& author = doc.at("rows")[1];
  EXPECT_EQ(author.at("label"), "author");
  EXPECT_EQ(author.at("detected"), 2);
  EXPECT_EQ(author.at("processed"), 1);
  EXPECT_NEAR(author.at("mean_over_processed").at("f1").get<double>(), 6.0 / 7.0, 1e-6);
  EXPECT_NEAR(author.at("mean_over_detected").at("f1").get<double>(), 3.0 / 7.0, 1e-6);
  EXPECT_EQ(doc.at("task_summaries").size(), 4u);
}

TEST(RenderReport, TableShowsTwoDecimals) {
  const auto rows = aggregate({f1_unit("grobid", "title", 0.9149)});
  const auto table = render_report(rows, {}, ReportFormat::table);
  EXPECT_NE(table.find("0.91"), std::string::npos);
  EXPECT_EQ(table.find("0.9149"), std::string::npos);
}

TEST(EmitReport, UnwritablePathIsIoError) {
  EXPECT_THROW(emit_report({}, {}, ReportFormat::csv, "/nonexistent/dir/report.csv"), IoError);
  TempDir dir;
  emit_report({}, {}, ReportFormat::csv, dir / "r.csv");
  EXPECT_EQ(slurp(dir / "r.csv"), render_report({}, {}, ReportFormat::csv));
}

TEST(BarChart, HalfValueIsHalfHeight) {
  const auto svg = render_bar_chart(aggregate({f1_unit("t", "title", 0.5)}), {}, ChartMetric::f1);
  const auto heights = bar_heights(svg);
  ASSERT_EQ(heights.size(), 1u);
  EXPECT_EQ(heights[0], chart::kPlotHeight / 2);
  EXPECT_NE(svg.find("height=\"150.00\""), std::string::npos);
}

TEST(BarChart, EmptyInputHasAxesOnly) {
  const auto svg = render_bar_chart({}, {}, ChartMetric::f1);
  EXPECT_EQ(count_matches(svg, R"(class="bar")"), 0u);
  EXPECT_EQ(count_matches(svg, R"(<line class="axis")"), 2u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(BarChart, ThreeToolsTwoLabels) {
  std::vector<UnitResult> results;
  for (const char* tool : {"cermine", "grobid", "pdfact"}) {
    results.push_back(f1_unit(tool, "title", 0.9));
    results.push_back(f1_unit(tool, "author", 0.4));
  }
  const auto svg = render_bar_chart(aggregate(results), {}, ChartMetric::f1);
  EXPECT_EQ(count_matches(svg, R"(<rect class="bar")"), 6u);
  EXPECT_EQ(count_matches(svg, R"(<g class="group")"), 2u);
  EXPECT_EQ(count_matches(svg, R"(data-label="title")"), 4u);  // group plus three bars
  EXPECT_EQ(count_matches(svg, R"(class="bar" data-tool="grobid")"), 2u);
  EXPECT_EQ(count_matches(svg, R"(<rect class="legend")"), 3u);
  EXPECT_EQ(svg, render_bar_chart(aggregate(results), {}, ChartMetric::f1));
}

TEST(BarChart, CumulativeGroupsByTask) {
  const auto rows = aggregate(journal_results("perfect"));
  const auto svg = render_bar_chart(rows, summarize_tasks(rows), ChartMetric::cumulative_f1);
  EXPECT_EQ(count_matches(svg, R"(<g class="group")"), 4u);
  // metadata scores 3 against an axis maximum of 7 (the general task)
  const auto heights = bar_heights(svg);
  ASSERT_EQ(heights.size(), 4u);
  EXPECT_NEAR(heights[0], 3.0 / 7.0 * chart::kPlotHeight, 0.005);
  EXPECT_NEAR(heights[1], 1.0 / 7.0 * chart::kPlotHeight, 0.005);
}

TEST(BarChart, MetricNames) {
  EXPECT_EQ(chart_metric_from("cumulative_f1"), ChartMetric::cumulative_f1);
  EXPECT_THROW(chart_metric_from("f2"), ConfigError);
}
