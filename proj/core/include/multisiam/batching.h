#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "multisiam/datasets.h"
#include "multisiam/rng.h"
#include "multisiam/text.h"

namespace multisiam {

/// A duplicate group already encoded and padded to the batch group size.
struct EncodedGroup {
  std::vector<EncodedText> members;
  /// Identity of the underlying source text in each slot (Quora qid or file
  /// row); a padded slot repeats the identity of the member it copies.
  std::vector<std::int64_t> sources;
  /// Category label, or -1 when the data has none.
  std::int32_t category = -1;
};

/// Token block of shape batch_size x group_size x text_size.
struct GroupedBatch {
  std::size_t batch_size = 0;
  std::size_t group_size = 0;
  std::size_t text_size = 0;
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> token_mask;
  /// batch_size x group_size labels, empty when unlabeled.
  std::vector<std::int32_t> category_labels;

  std::size_t rows() const noexcept { return batch_size * group_size; }
  TokenId id(std::size_t b, std::size_t g, std::size_t t) const {
    return ids[(b * group_size + g) * text_size + t];
  }
};

/// Assemble a batch from groups that all have `group_size` members of length
/// `text_size`.
GroupedBatch assemble_batch(const std::vector<const EncodedGroup*>& groups, std::size_t group_size,
                            std::size_t text_size);

/// Batch of single-text groups (group_size 1), used for flat inference.
GroupedBatch flat_batch(const std::vector<EncodedText>& texts);

enum class BatchMode { kTraining, kEvaluation };

/// One epoch of batches. Groups are shuffled by `rng`; with `qid_disjoint`, a
/// group sharing a source id with a group already in the batch is deferred to a
/// later batch. Training drops the trailing partial batch, evaluation keeps it.
std::vector<GroupedBatch> make_batches(const std::vector<EncodedGroup>& groups, std::size_t batch_size,
                                       std::size_t group_size, std::size_t text_size, SeededRng& rng,
                                       bool qid_disjoint, BatchMode mode = BatchMode::kTraining);

/// Duplicate pairs as groups of two: [q1, q2] with sources [qid1, qid2].
std::vector<EncodedGroup> encode_pair_groups(const std::vector<PairRecord>& pairs, const Vocabulary& vocab,
                                             std::size_t text_size);

/// Text groups encoded and padded (or truncated) to `group_size`.
std::vector<EncodedGroup> encode_text_groups(const std::vector<TextGroup>& groups, const Vocabulary& vocab,
                                             std::size_t text_size, std::size_t group_size, SeededRng& rng);

struct EncodedPair {
  EncodedText a;
  EncodedText b;
  bool is_duplicate = false;
};

std::vector<EncodedPair> encode_pairs(const std::vector<PairRecord>& pairs, const Vocabulary& vocab,
                                      std::size_t text_size);

}  // namespace multisiam
