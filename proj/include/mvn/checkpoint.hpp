#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mvn/optim.hpp"

namespace mvn {

// Self-describing binary container: versioned header, string metadata map,
// named parameter blocks (shape + precision + raw little-endian values).
// Byte layout is documented in docs/FORMATS.md; round-trips are bit-exact.
struct Checkpoint {
  uint32_t version = 1;
  std::map<std::string, std::string> meta;  // sorted, so serialization is canonical
  ParamSet params;
  std::vector<uint8_t> dtypes;  // per param: 0 = f64, 1 = f32 (storage only)

  std::string meta_or(const std::string& key, const std::string& fallback) const;
};

std::vector<uint8_t> serialize_checkpoint(const Checkpoint& c);
Checkpoint deserialize_checkpoint(const std::vector<uint8_t>& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mvn
