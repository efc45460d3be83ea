#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "multisiam/rng.h"

namespace multisiam {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;

/// Lowercases ASCII letters, splits on Unicode whitespace and strips leading
/// and trailing ASCII punctuation from each token. Interior punctuation stays.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
 public:
  /// Just the reserved PAD and UNK entries.
  Vocabulary();
  /// Rebuild from an id-ordered token list whose first two entries are the
  /// reserved tokens.
  static Vocabulary from_tokens(std::vector<std::string> id_to_token);

  TokenId lookup(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const noexcept { return id_to_token_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return id_to_token_; }

  TokenId add(std::string token);

  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

 private:
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::vector<std::string> id_to_token_;
};

/// Frequency-ranked vocabulary: ids 2.. go to tokens seen at least `min_freq`
/// times, highest count first, ties in byte order.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq = 2);

struct EncodedText {
  std::vector<TokenId> ids;
  std::size_t valid_len = 0;

  friend bool operator==(const EncodedText&, const EncodedText&) = default;
};

EncodedText encode(const std::vector<std::string>& tokens, const Vocabulary& vocab, std::size_t text_size);

/// tokenize + encode; a text with no tokens becomes a single UNK so every
/// encoded text has at least one valid step.
EncodedText encode_text(std::string_view text, const Vocabulary& vocab, std::size_t text_size);

/// Bring a group to exactly `group_size` members: truncate to the first
/// members, or append members drawn uniformly with replacement.
std::vector<EncodedText> pad_group(const std::vector<EncodedText>& texts, std::size_t group_size,
                                   SeededRng& rng);

/// Index form of pad_group: which original member fills each slot.
std::vector<std::size_t> pad_group_indices(std::size_t group_len, std::size_t group_size, SeededRng& rng);

}  // namespace multisiam
