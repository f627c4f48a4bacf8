#pragma once

#include <string>

namespace mfdr {

// SHA-256 digest as lowercase hex; used to fingerprint input files in run
// manifests.
std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::string& path);

}  // namespace mfdr
