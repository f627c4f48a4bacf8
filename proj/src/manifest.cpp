#include "mfdr/manifest.hpp"

#include <chrono>
#include <ctime>

#include "mfdr/csv.hpp"

namespace mfdr {

namespace {
std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}
}  // namespace

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["argv"] = argv;
  j["inputs"] = input_sha256;
  j["params"] = params;
  j["threads_used"] = threads_used;
  j["version"] = kVersion;
  j["created_utc"] = utc_now();
  return j;
}

void RunManifest::write(const std::string& path) const {
  write_text_file(path, to_json().dump(2) + "\n");
}

}  // namespace mfdr
