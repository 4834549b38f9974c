/**
 * @file cache.hpp
 * @brief Content-addressed result cache. Needs libcrypto for SHA-256.
 */
#pragma once
#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace ruelle {

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) fail(ErrorKind::Io, "SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// Key over the canonical config text (comments and whitespace already
// stripped), the subcommand and its parameters in a fixed order.
inline std::string cache_key(const std::string& canonical_config, const std::string& command,
                             const std::vector<std::pair<std::string, std::string>>& params) {
  std::string s = "ruelle-cache-v1\n" + command + "\n" + canonical_config + "\n";
  for (const auto& [k, v] : params) s += k + "=" + v + "\n";
  return sha256_hex(s);
}

// RUELLE_CACHE_DIR overrides; then XDG_CACHE_HOME/ruelle, then ~/.cache/ruelle.
inline std::filesystem::path cache_dir() {
  if (const char* d = std::getenv("RUELLE_CACHE_DIR"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "ruelle";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "ruelle";
  return std::filesystem::temp_directory_path() / "ruelle-cache";
}

struct CacheEntry {
  std::string summary, report;
};

inline std::optional<CacheEntry> cache_load(const std::string& key) {
  auto dir = cache_dir();
  std::ifstream s(dir / (key + ".summary")), r(dir / (key + ".report"));
  if (!s || !r) return std::nullopt;
  std::stringstream a, b;
  a << s.rdbuf();
  b << r.rdbuf();
  return CacheEntry{a.str(), b.str()};
}

// Best effort: an unwritable cache directory only loses the cache.
inline bool cache_store(const std::string& key, const CacheEntry& e) {
  std::error_code ec;
  auto dir = cache_dir();
  std::filesystem::create_directories(dir, ec);
  if (ec) return false;
  auto tmp = dir / (key + ".tmp");
  {
    std::ofstream r(tmp);
    if (!(r << e.report)) return false;
  }
  std::filesystem::rename(tmp, dir / (key + ".report"), ec);
  std::ofstream s(dir / (key + ".summary"));
  return static_cast<bool>(s << e.summary) && !ec;
}

}  // namespace ruelle
