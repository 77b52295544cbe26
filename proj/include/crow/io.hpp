#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crow {

// Fixed 12-significant-digit scientific formatting; locale-independent, so
// identical configs produce byte-identical CSVs.
inline std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.11e", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

// Collects emitted files so the manifest can record content hashes; nothing
// touches the filesystem until flush().
class OutputBundle {
 public:
  explicit OutputBundle(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }

  const std::map<std::string, std::string>& files() const { return files_; }

  std::map<std::string, std::string> hashes() const {
    std::map<std::string, std::string> h;
    for (const auto& [name, content] : files_) h[name] = fnv1a64_hex(content);
    return h;
  }

  void flush() const {
    std::filesystem::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      const std::filesystem::path path = dir_ / name;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open output file: " + path.string());
      out << content;
      if (!out) throw std::runtime_error("write failed: " + path.string());
    }
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
};

}  // namespace crow
