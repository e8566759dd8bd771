#pragma once

#include <string>
#include <vector>

#include "signrec/model.hpp"

namespace signrec {

struct Checkpoint {
  ModelParameters params;
  ModelConfig config;
  std::vector<HeadSpec> heads;
  std::vector<int> subset_ids;
};

// Self-describing binary: magic "SRC1", u32 JSON header length, JSON header
// (config, heads, subset, pooling), then named tensors as little-endian f32
// (column-major). Round-trip exact.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace signrec
