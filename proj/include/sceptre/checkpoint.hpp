#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sceptre/corpus.hpp"
#include "sceptre/hierarchy.hpp"
#include "sceptre/model.hpp"

namespace sceptre {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  TopicAllocation allocation;
  Vocabulary vocabulary;
  std::vector<std::string> product_ids;  // index-aligned with params' products
  std::vector<std::string> node_ids;     // index-aligned with allocation's nodes
  double smoothing = 1e-6;
};

// Text format: a "SCEPTRE-CHECKPOINT<TAB>version" line, a
// "crc32<TAB>hex<TAB>bytes" line and a body in which every double is written
// as a hexadecimal float, so values survive the round trip bit for bit.
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
// Throws VersionError for a newer format and ChecksumError for corrupt or truncated input.
Checkpoint read_checkpoint(std::istream& in);

void save_model(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_model(const std::filesystem::path& path);

}  // namespace sceptre
