#include "multisiam/batching.h"

#include <algorithm>
#include <list>
#include <stdexcept>
#include <unordered_set>

#include "multisiam/errors.h"

namespace multisiam {

GroupedBatch assemble_batch(const std::vector<const EncodedGroup*>& groups, std::size_t group_size,
                            std::size_t text_size) {
  GroupedBatch batch;
  batch.batch_size = groups.size();
  batch.group_size = group_size;
  batch.text_size = text_size;
  batch.ids.reserve(groups.size() * group_size * text_size);
  batch.token_mask.reserve(batch.ids.capacity());
  const bool labeled = !groups.empty() && groups.front()->category >= 0;
  for (const auto* g : groups) {
    if (g->members.size() != group_size) {
      throw DimensionError("assemble_batch: group has " + std::to_string(g->members.size()) +
                           " members, expected " + std::to_string(group_size));
    }
    for (const auto& m : g->members) {
      if (m.ids.size() != text_size) {
        throw DimensionError("assemble_batch: text of length " + std::to_string(m.ids.size()) +
                             ", expected " + std::to_string(text_size));
      }
      for (std::size_t t = 0; t < text_size; ++t) {
        batch.ids.push_back(m.ids[t]);
        batch.token_mask.push_back(t < m.valid_len ? 1 : 0);
      }
      if (labeled) batch.category_labels.push_back(g->category);
    }
  }
  return batch;
}

GroupedBatch flat_batch(const std::vector<EncodedText>& texts) {
  std::vector<EncodedGroup> groups;
  groups.reserve(texts.size());
  for (const auto& t : texts) groups.push_back(EncodedGroup{{t}, {0}, -1});
  std::vector<const EncodedGroup*> ptrs;
  for (const auto& g : groups) ptrs.push_back(&g);
  const std::size_t text_size = texts.empty() ? 0 : texts.front().ids.size();
  return assemble_batch(ptrs, 1, text_size);
}

std::vector<GroupedBatch> make_batches(const std::vector<EncodedGroup>& groups, std::size_t batch_size,
                                       std::size_t group_size, std::size_t text_size, SeededRng& rng,
                                       bool qid_disjoint, BatchMode mode) {
  if (batch_size < 2) throw std::invalid_argument("make_batches: batch_size must be at least 2");
  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  std::list<std::size_t> pending(order.begin(), order.end());
  std::vector<GroupedBatch> batches;
  while (!pending.empty()) {
    std::vector<const EncodedGroup*> members;
    std::unordered_set<std::int64_t> seen;
    for (auto it = pending.begin(); it != pending.end() && members.size() < batch_size;) {
      const auto& g = groups[*it];
      bool clash = false;
      if (qid_disjoint) {
        for (auto s : g.sources) clash = clash || seen.count(s) != 0;
      }
      if (clash) {
        ++it;
        continue;
      }
      if (qid_disjoint) seen.insert(g.sources.begin(), g.sources.end());
      members.push_back(&g);
      it = pending.erase(it);
    }
    if (members.size() < batch_size && mode == BatchMode::kTraining) break;
    batches.push_back(assemble_batch(members, group_size, text_size));
  }
  return batches;
}

std::vector<EncodedGroup> encode_pair_groups(const std::vector<PairRecord>& pairs, const Vocabulary& vocab,
                                             std::size_t text_size) {
  std::vector<EncodedGroup> groups;
  groups.reserve(pairs.size());
  for (const auto& p : pairs) {
    groups.push_back(EncodedGroup{{encode_text(p.q1, vocab, text_size), encode_text(p.q2, vocab, text_size)},
                                  {p.qid1, p.qid2},
                                  -1});
  }
  return groups;
}

std::vector<EncodedGroup> encode_text_groups(const std::vector<TextGroup>& groups, const Vocabulary& vocab,
                                             std::size_t text_size, std::size_t group_size, SeededRng& rng) {
  std::vector<EncodedGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    EncodedGroup eg;
    eg.category = static_cast<std::int32_t>(g.category);
    for (auto idx : pad_group_indices(g.texts.size(), group_size, rng)) {
      eg.members.push_back(encode_text(g.texts[idx], vocab, text_size));
      eg.sources.push_back(g.sources.empty() ? static_cast<std::int64_t>(idx) : g.sources[idx]);
    }
    out.push_back(std::move(eg));
  }
  return out;
}

std::vector<EncodedPair> encode_pairs(const std::vector<PairRecord>& pairs, const Vocabulary& vocab,
                                      std::size_t text_size) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back(EncodedPair{encode_text(p.q1, vocab, text_size), encode_text(p.q2, vocab, text_size),
                              p.is_duplicate});
  }
  return out;
}

}  // namespace multisiam
