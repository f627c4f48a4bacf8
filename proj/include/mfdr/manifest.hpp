#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfdr {

inline constexpr const char* kVersion = "0.1.0";

// Everything needed to replay a run: the exact invocation, resolved
// parameters, seeds, and input fingerprints.  Result files are functions of
// these alone (thread count never changes them); created_utc is
// informational and excluded from reproducibility comparisons.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::string> input_sha256;
  nlohmann::json params;
  int threads_used = 1;

  nlohmann::json to_json() const;
  void write(const std::string& path) const;
};

}  // namespace mfdr
