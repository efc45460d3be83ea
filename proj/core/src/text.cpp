#include "multisiam/text.h"

#include <algorithm>
#include <map>

#include "multisiam/errors.h"

namespace multisiam {
namespace {

// Byte length of a whitespace code point starting at s[i], or 0.
std::size_t whitespace_len(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || (c >= 0x09 && c <= 0x0d)) return 1;
  auto byte = [&](std::size_t k) {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u;
  };
  if (c == 0xc2 && (byte(1) == 0x85 || byte(1) == 0xa0)) return 2;  // NEL, NBSP
  if (c == 0xe1 && byte(1) == 0x9a && byte(2) == 0x80) return 3;    // U+1680
  if (c == 0xe2 && byte(1) == 0x80) {
    const auto b2 = byte(2);
    if ((b2 >= 0x80 && b2 <= 0x8a) || b2 == 0xa8 || b2 == 0xa9 || b2 == 0xaf) return 3;
  }
  if (c == 0xe2 && byte(1) == 0x81 && byte(2) == 0x9f) return 3;  // U+205F
  if (c == 0xe3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;  // U+3000
  return 0;
}

bool is_ascii_punct(char ch) {
  const auto c = static_cast<unsigned char>(ch);
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
         (c >= 0x7b && c <= 0x7e);
}

void flush_token(std::string& current, std::vector<std::string>& out) {
  std::size_t b = 0, e = current.size();
  while (b < e && is_ascii_punct(current[b])) ++b;
  while (e > b && is_ascii_punct(current[e - 1])) --e;
  if (e > b) out.emplace_back(current.substr(b, e - b));
  current.clear();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    if (const auto ws = whitespace_len(text, i); ws != 0) {
      flush_token(current, out);
      i += ws;
      continue;
    }
    char c = text[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    current.push_back(c);
    ++i;
  }
  flush_token(current, out);
  return out;
}

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> id_to_token) {
  if (id_to_token.size() < 2 || id_to_token[0] != kPadToken || id_to_token[1] != kUnkToken) {
    throw DataError("vocabulary must start with the reserved <pad> and <unk> tokens");
  }
  Vocabulary v;
  for (std::size_t i = 2; i < id_to_token.size(); ++i) {
    if (v.contains(id_to_token[i])) throw DataError("duplicate vocabulary token '" + id_to_token[i] + "'");
    v.add(std::move(id_to_token[i]));
  }
  return v;
}

TokenId Vocabulary::lookup(std::string_view token) const {
  const auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw DimensionError("token id " + std::to_string(id) + " outside vocabulary of size " +
                         std::to_string(id_to_token_.size()));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

TokenId Vocabulary::add(std::string token) {
  if (const auto it = token_to_id_.find(token); it != token_to_id_.end()) return it->second;
  const auto id = static_cast<TokenId>(id_to_token_.size());
  token_to_id_.emplace(token, id);
  id_to_token_.push_back(std::move(token));
  return id;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq) {
  if (min_freq < 1) throw std::invalid_argument("build_vocab: min_freq must be at least 1");
  std::map<std::string, std::size_t> counts;
  bool any = false;
  for (const auto& doc : corpus) {
    for (const auto& tok : doc) {
      ++counts[tok];
      any = true;
    }
  }
  if (!any) throw DataError("build_vocab: empty corpus");

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts) {
    if (n >= min_freq && tok != Vocabulary::kPadToken && tok != Vocabulary::kUnkToken) ranked.emplace_back(tok, n);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (auto& [tok, n] : ranked) vocab.add(tok);
  return vocab;
}

EncodedText encode(const std::vector<std::string>& tokens, const Vocabulary& vocab, std::size_t text_size) {
  if (text_size < 1) throw std::invalid_argument("encode: text_size must be at least 1");
  EncodedText out;
  out.ids.assign(text_size, kPadId);
  out.valid_len = std::min(tokens.size(), text_size);
  for (std::size_t i = 0; i < out.valid_len; ++i) out.ids[i] = vocab.lookup(tokens[i]);
  return out;
}

EncodedText encode_text(std::string_view text, const Vocabulary& vocab, std::size_t text_size) {
  auto tokens = tokenize(text);
  if (tokens.empty()) tokens.emplace_back(Vocabulary::kUnkToken);
  return encode(tokens, vocab, text_size);
}

std::vector<std::size_t> pad_group_indices(std::size_t group_len, std::size_t group_size, SeededRng& rng) {
  if (group_len == 0) throw DataError("pad_group: empty group");
  std::vector<std::size_t> slots;
  slots.reserve(group_size);
  for (std::size_t i = 0; i < std::min(group_len, group_size); ++i) slots.push_back(i);
  while (slots.size() < group_size) slots.push_back(static_cast<std::size_t>(rng.below(group_len)));
  return slots;
}

std::vector<EncodedText> pad_group(const std::vector<EncodedText>& texts, std::size_t group_size,
                                   SeededRng& rng) {
  std::vector<EncodedText> out;
  for (auto idx : pad_group_indices(texts.size(), group_size, rng)) out.push_back(texts[idx]);
  return out;
}

}  // namespace multisiam
