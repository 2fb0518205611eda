#pragma once

#include <cstdint>
#include <cstring>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

namespace critspec {

// 64-bit FNV-1a, used for reproducibility tags on meshes, matrices and configs.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001b3ULL;
    }
  }

  void update(std::string_view text) { update(text.data(), text.size()); }

  void update(double value) {
    if (value == 0.0) value = 0.0;  // fold -0.0
    update(&value, sizeof value);
  }

  void update(std::span<const double> values) {
    for (double v : values) update(v);
  }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hex_digest(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << value;
  return os.str();
}

inline std::uint64_t hash_text(std::string_view text) {
  Fnv1a h;
  h.update(text);
  return h.digest();
}

}  // namespace critspec
