#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "multisiam/config.h"
#include "multisiam/multisiam.h"
#include "multisiam/smcd.h"
#include "multisiam/text.h"

namespace multisiam {

struct MultiSiamBundle {
  MultiSiamModel model;
  Vocabulary vocab;
  TrainConfig config;
};

struct SmcdBundle {
  SmcdModel model;
  Vocabulary vocab;
  /// Category names by label index.
  std::vector<std::string> categories;
  TrainConfig config;
};

using ModelBundle = std::variant<MultiSiamBundle, SmcdBundle>;

inline constexpr char kCheckpointMagic[4] = {'M', 'S', 'I', 'A'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout: "MSIA", u32 LE version, u64 LE header length, UTF-8 JSON header
/// (kind, config, model dimensions, vocabulary, categories, tensor manifest),
/// then every tensor in manifest order as little-endian IEEE-754 doubles.
std::string serialize_checkpoint(const ModelBundle& bundle);
ModelBundle parse_checkpoint(std::string_view bytes);

void save_checkpoint(const ModelBundle& bundle, const std::string& path);
ModelBundle load_checkpoint(const std::string& path);

}  // namespace multisiam
