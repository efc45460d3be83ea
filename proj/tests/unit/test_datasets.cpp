#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fixtures.h"
#include "multisiam/datasets.h"
#include "multisiam/errors.h"

using namespace multisiam;

namespace {

const char* kTable = R"(text,category,group_id
"Company A announces new product, Software A beta 2",Business,1
Software A is now available in beta 2 by Company A,Business,1
Company A is launching a beta 2 version of Software A,Business,1
"Company A releases Software A, beta 2",Business,1
New AI model gets 99% accuracy,Tech,2
Latest model gets 99% accuracy on benchmark,Tech,2
"AI model achieves 99% accuracy, ""state of the art""",Tech,2
)";

std::vector<PairRecord> pairs(std::size_t dup, std::size_t neg) {
  std::vector<PairRecord> out;
  for (std::size_t i = 0; i < dup + neg; ++i) {
    out.push_back({"q" + std::to_string(i), "p" + std::to_string(i), i < dup, static_cast<std::int64_t>(2 * i),
                   static_cast<std::int64_t>(2 * i + 1)});
  }
  return out;
}

}  // namespace

TEST(QuoraTsv, TwoRows) {
  const auto d = parse_quora_tsv(
      "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n0\t1\t2\tHow?\tWhat?\t1\n1\t3\t4\tA\tB\t0\n");
  ASSERT_EQ(d.records.size(), 2u);
  EXPECT_TRUE(d.records[0].is_duplicate);
  EXPECT_FALSE(d.records[1].is_duplicate);
  EXPECT_EQ(d.records[1].qid2, 4);
  EXPECT_EQ(d.duplicate_count(), 1u);
}

TEST(QuoraTsv, SkipsMalformedRows) {
  const auto d = parse_quora_tsv(
      "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\r\n0\t1\t2\tHow?\t\t1\r\n1\t3\t4\tA\tB\t7\r\n2\t5\t6\tA\tB\r\n"
      "3\t7\t8\t\"tab\there\"\tB\t0\r\n");
  EXPECT_EQ(d.records.size(), 1u);
  EXPECT_EQ(d.skipped_rows, 3u);
  EXPECT_EQ(d.records[0].q1, "tab\there");
}

TEST(QuoraTsv, MissingHeaderOrFile) {
  EXPECT_THROW(parse_quora_tsv("a\tb\n"), DataError);
  EXPECT_THROW(parse_quora_tsv(""), DataError);
  EXPECT_THROW(load_quora_tsv("/nonexistent/file.tsv"), DataError);
}

TEST(SplitQuora, FloorSplitAndNegatives) {
  SeededRng rng(1);
  const auto s = split_quora(pairs(100, 40), 0.9, 10, rng);
  EXPECT_EQ(s.train.size(), 90u);
  EXPECT_EQ(s.test_duplicates, 10u);
  EXPECT_EQ(s.test.size(), 20u);
  for (const auto& r : s.train) EXPECT_TRUE(r.is_duplicate);
  for (std::size_t i = 0; i < s.test.size(); ++i) EXPECT_EQ(s.test[i].is_duplicate, i < 10);
  std::set<std::string> seen;
  for (const auto& r : s.train) seen.insert(r.q1);
  for (const auto& r : s.test) EXPECT_TRUE(seen.insert(r.q1).second);
}

TEST(SplitQuora, PaperCountsArithmetic) {
  // floor(0.9 * 149306) duplicates train; the rest are held out.
  const std::size_t n = 149306;
  const auto train = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n)));
  EXPECT_EQ(train, 134375u);
  EXPECT_EQ(n - train, 14931u);
}

TEST(SplitQuora, EdgeCases) {
  SeededRng rng(2);
  const auto all = split_quora(pairs(10, 5), 1.0, 0, rng);
  EXPECT_EQ(all.train.size(), 10u);
  EXPECT_TRUE(all.test.empty());
  EXPECT_THROW(split_quora(pairs(10, 5), 0.9, 6, rng), DataError);
}

TEST(SplitQuora, SeededDeterminism) {
  SeededRng a(9), b(9);
  const auto s1 = split_quora(pairs(50, 50), 0.8, 10, a);
  const auto s2 = split_quora(pairs(50, 50), 0.8, 10, b);
  ASSERT_EQ(s1.test.size(), s2.test.size());
  for (std::size_t i = 0; i < s1.test.size(); ++i) EXPECT_EQ(s1.test[i].q1, s2.test[i].q1);
}

TEST(ReduceSplit, Caps) {
  SeededRng rng(3);
  const auto s = reduce_split(split_quora(pairs(100, 40), 0.5, 20, rng), 30, 5);
  EXPECT_EQ(s.train.size(), 30u);
  EXPECT_EQ(s.test_duplicates, 5u);
  EXPECT_EQ(s.test.size(), 25u);
}

TEST(GroupedCsv, TableSample) {
  const auto csv = parse_grouped_csv(kTable);
  ASSERT_EQ(csv.records.size(), 7u);
  EXPECT_EQ(csv.categories, (std::vector<std::string>{"Business", "Tech"}));
  EXPECT_EQ(csv.records[0].text, "Company A announces new product, Software A beta 2");
  EXPECT_EQ(csv.records[6].text, "AI model achieves 99% accuracy, \"state of the art\"");
  const auto groups = collect_groups(csv);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].texts.size(), 4u);
  EXPECT_EQ(groups[1].category, 1u);
  EXPECT_EQ(groups[1].sources, (std::vector<std::int64_t>{4, 5, 6}));
}

TEST(GroupedCsv, Errors) {
  EXPECT_THROW(parse_grouped_csv(""), DataError);
  EXPECT_THROW(parse_grouped_csv("text,category,group_id\n"), DataError);
  EXPECT_THROW(parse_grouped_csv("text,category,group_id\na,B,x\n"), DataError);
  try {
    parse_grouped_csv("text,category,group_id\na,Business,17\nb,Tech,17\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("17"), std::string::npos);
  }
}

TEST(GroupedCsv, FormatRoundTrip) {
  const auto csv = parse_grouped_csv(kTable);
  const auto again = parse_grouped_csv(format_grouped_csv(csv.records));
  ASSERT_EQ(again.records.size(), csv.records.size());
  for (std::size_t i = 0; i < csv.records.size(); ++i) {
    EXPECT_EQ(again.records[i].text, csv.records[i].text);
    EXPECT_EQ(again.records[i].group_id, csv.records[i].group_id);
  }
}

TEST(GroupedCsv, LoadFromFile) {
  const auto path = fixtures::temp_path("table.csv");
  fixtures::write_bytes(path, std::string("\xEF\xBB\xBF") + kTable);
  EXPECT_EQ(load_grouped_csv(path).records.size(), 7u);
}
