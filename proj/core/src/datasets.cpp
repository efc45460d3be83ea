#include "multisiam/datasets.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "delimited.h"
#include "multisiam/errors.h"

namespace multisiam {
namespace {

bool parse_int(const std::string& s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::size_t QuoraData::duplicate_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const PairRecord& r) { return r.is_duplicate; }));
}

QuoraData parse_quora_tsv(const std::string& content) {
  const auto rows = detail::parse_delimited(content, '\t');
  if (rows.empty()) throw DataError("quora tsv: file is empty");
  const std::vector<std::string> expected{"id", "qid1", "qid2", "question1", "question2", "is_duplicate"};
  if (rows.front().fields != expected) {
    throw DataError("quora tsv: line 1: expected header id, qid1, qid2, question1, question2, is_duplicate");
  }
  QuoraData data;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    std::int64_t qid1 = 0, qid2 = 0, label = 0;
    if (f.size() != 6 || f[3].empty() || f[4].empty() || !parse_int(f[1], qid1) || !parse_int(f[2], qid2) ||
        !parse_int(f[5], label) || (label != 0 && label != 1)) {
      ++data.skipped_rows;
      continue;
    }
    data.records.push_back(PairRecord{f[3], f[4], label == 1, qid1, qid2});
  }
  return data;
}

QuoraData load_quora_tsv(const std::string& path) {
  try {
    return parse_quora_tsv(detail::read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

QuoraSplit split_quora(const std::vector<PairRecord>& records, double train_ratio, std::size_t extra_negatives,
                       SeededRng& rng) {
  if (!(train_ratio >= 0.0 && train_ratio <= 1.0)) throw std::invalid_argument("split_quora: train_ratio must be in [0,1]");
  std::vector<std::size_t> dup, neg;
  for (std::size_t i = 0; i < records.size(); ++i) (records[i].is_duplicate ? dup : neg).push_back(i);
  if (extra_negatives > neg.size()) {
    throw DataError("split_quora: requested " + std::to_string(extra_negatives) + " negatives but only " +
                    std::to_string(neg.size()) + " non-duplicate pairs exist");
  }
  rng.shuffle(dup);
  const auto n_train = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(dup.size())));
  QuoraSplit split;
  for (std::size_t i = 0; i < dup.size(); ++i) (i < n_train ? split.train : split.test).push_back(records[dup[i]]);
  split.test_duplicates = split.test.size();
  // Partial Fisher-Yates: the first extra_negatives slots become the sample.
  for (std::size_t i = 0; i < extra_negatives; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(neg.size() - i));
    std::swap(neg[i], neg[j]);
    split.test.push_back(records[neg[i]]);
  }
  return split;
}

QuoraSplit reduce_split(QuoraSplit split, std::size_t max_train, std::size_t max_test_duplicates) {
  if (split.train.size() > max_train) split.train.resize(max_train);
  if (split.test_duplicates > max_test_duplicates) {
    split.test.erase(split.test.begin() + static_cast<std::ptrdiff_t>(max_test_duplicates),
                     split.test.begin() + static_cast<std::ptrdiff_t>(split.test_duplicates));
    split.test_duplicates = max_test_duplicates;
  }
  return split;
}

std::size_t GroupedCsv::category_index(const std::string& name) const {
  const auto it = std::find(categories.begin(), categories.end(), name);
  if (it == categories.end()) throw DataError("unknown category '" + name + "'");
  return static_cast<std::size_t>(it - categories.begin());
}

GroupedCsv parse_grouped_csv(const std::string& content) {
  const auto rows = detail::parse_delimited(content, ',');
  if (rows.empty()) throw DataError("grouped csv: file is empty");
  if (rows.front().fields != std::vector<std::string>{"text", "category", "group_id"}) {
    throw DataError("grouped csv: line 1: expected header text,category,group_id");
  }
  if (rows.size() == 1) throw DataError("grouped csv: no data rows");
  GroupedCsv csv;
  std::unordered_map<std::int64_t, std::string> group_category;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const auto where = "grouped csv: line " + std::to_string(rows[r].line) + ": ";
    if (f.size() != 3) throw DataError(where + "expected 3 fields, got " + std::to_string(f.size()));
    GroupRecord rec{f[0], f[1], 0};
    if (!parse_int(f[2], rec.group_id)) throw DataError(where + "group_id '" + f[2] + "' is not an integer");
    if (rec.category.empty()) throw DataError(where + "empty category");
    const auto [it, inserted] = group_category.emplace(rec.group_id, rec.category);
    if (!inserted && it->second != rec.category) {
      throw DataError(where + "group " + std::to_string(rec.group_id) + " spans categories '" + it->second +
                      "' and '" + rec.category + "'");
    }
    if (std::find(csv.categories.begin(), csv.categories.end(), rec.category) == csv.categories.end()) {
      csv.categories.push_back(rec.category);
    }
    csv.records.push_back(std::move(rec));
  }
  return csv;
}

GroupedCsv load_grouped_csv(const std::string& path) {
  try {
    return parse_grouped_csv(detail::read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string format_grouped_csv(const std::vector<GroupRecord>& records) {
  std::string out = "text,category,group_id\n";
  for (const auto& r : records) {
    out += quote_csv(r.text) + ',' + quote_csv(r.category) + ',' + std::to_string(r.group_id) + '\n';
  }
  return out;
}

std::vector<TextGroup> collect_groups(const GroupedCsv& csv) {
  std::vector<TextGroup> groups;
  std::unordered_map<std::int64_t, std::size_t> slot;
  for (std::size_t i = 0; i < csv.records.size(); ++i) {
    const auto& rec = csv.records[i];
    auto [it, inserted] = slot.emplace(rec.group_id, groups.size());
    if (inserted) groups.push_back(TextGroup{rec.group_id, csv.category_index(rec.category), {}, {}});
    auto& g = groups[it->second];
    g.texts.push_back(rec.text);
    g.sources.push_back(static_cast<std::int64_t>(i));
  }
  return groups;
}

}  // namespace multisiam
