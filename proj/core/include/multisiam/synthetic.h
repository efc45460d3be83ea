#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "multisiam/datasets.h"

namespace multisiam {

/// The thirteen post categories, in the order used for generation.
const std::vector<std::string>& default_categories();

struct SyntheticConfig {
  std::size_t num_categories = 13;
  std::size_t total_groups = 201;
  std::size_t min_texts = 2;
  std::size_t max_texts = 4;
  std::uint64_t seed = 1;
};

struct SyntheticDataset {
  std::vector<GroupRecord> records;
  std::size_t groups = 0;
  std::size_t texts = 0;
  /// Texts needed to bring every group to `pad_to` members.
  std::size_t padded_texts(std::size_t pad_to) const;
};

/// Template paraphrase corpus in the grouped CSV schema. Groups are spread
/// round-robin over categories; each group has its own invented entity name and
/// event, rendered through different sentence templates.
SyntheticDataset generate_synthetic(const SyntheticConfig& cfg);

}  // namespace multisiam
