#pragma once

#include <map>
#include <string>

#include "opsum/params.hpp"

namespace opsum {

/// Parameters plus free-form metadata (model dimensions, flags).
///
/// On disk: a text header
///
///     opsum-checkpoint
///     version 1
///     precision f32
///     meta <key> <value>          (zero or more)
///     tensor <name> <rank> <d0> ...  (one per parameter, name order)
///     end
///
/// followed by every tensor's values as 32-bit little-endian floats, in
/// header order. Loading rejects any byte-length mismatch.
struct Checkpoint {
  ParameterSet params;
  std::map<std::string, std::string> meta;
  Precision precision = Precision::kFloat32;
};

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace opsum
