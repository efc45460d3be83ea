#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "multisiam/rng.h"

namespace multisiam {

/// One row of the Quora question-pairs TSV.
struct PairRecord {
  std::string q1;
  std::string q2;
  bool is_duplicate = false;
  std::int64_t qid1 = -1;
  std::int64_t qid2 = -1;
};

struct QuoraData {
  std::vector<PairRecord> records;
  std::size_t skipped_rows = 0;

  std::size_t duplicate_count() const;
};

/// Header: id qid1 qid2 question1 question2 is_duplicate (tab separated).
/// Rows with a missing or empty field, or a label outside {0,1}, are skipped
/// and counted.
QuoraData load_quora_tsv(const std::string& path);
QuoraData parse_quora_tsv(const std::string& content);

struct QuoraSplit {
  std::vector<PairRecord> train;  // duplicates only
  std::vector<PairRecord> test;   // held-out duplicates, then sampled non-duplicates
  std::size_t test_duplicates = 0;
};

/// Shuffles the duplicate pairs, sends floor(train_ratio * n) to train and the
/// rest to test, then appends `extra_negatives` non-duplicates sampled without
/// replacement.
QuoraSplit split_quora(const std::vector<PairRecord>& records, double train_ratio,
                       std::size_t extra_negatives, SeededRng& rng);

/// Keep at most `max_train` training pairs and `max_test_duplicates` held-out
/// duplicates; sampled negatives are kept as they are.
QuoraSplit reduce_split(QuoraSplit split, std::size_t max_train, std::size_t max_test_duplicates);

/// One row of the grouped CSV (text,category,group_id).
struct GroupRecord {
  std::string text;
  std::string category;
  std::int64_t group_id = 0;
};

struct GroupedCsv {
  std::vector<GroupRecord> records;
  /// Category names in first-appearance order; the position is the label.
  std::vector<std::string> categories;

  std::size_t category_index(const std::string& name) const;
};

GroupedCsv load_grouped_csv(const std::string& path);
GroupedCsv parse_grouped_csv(const std::string& content);
std::string format_grouped_csv(const std::vector<GroupRecord>& records);

/// Texts of one duplicate group, in file order.
struct TextGroup {
  std::int64_t group_id = 0;
  std::size_t category = 0;
  std::vector<std::string> texts;
  /// Row index in the source file of each text, used as its identity.
  std::vector<std::int64_t> sources;
};

/// Groups in order of first appearance of their group_id.
std::vector<TextGroup> collect_groups(const GroupedCsv& csv);

}  // namespace multisiam
