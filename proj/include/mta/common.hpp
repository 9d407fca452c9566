#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mta {

using NodeId = int;

// Physical subnetworks. Every link belongs to exactly one.
enum class Subnet { RN, MN, WN, BN };

std::string to_string(Subnet n);
Subnet subnet_from_string(const std::string& s);

// Elementary travel modes. A trip may chain several of them (one leg each).
enum class BaseMode { car, bus, metro, walk, bike, CD, CP, EH, RS };

constexpr int kNumBaseModes = 9;

std::string to_string(BaseMode m);
BaseMode base_mode_from_string(const std::string& s);

// Subnetwork a leg of the given mode travels on.
Subnet subnet_of(BaseMode m);

inline bool is_sms(BaseMode m) { return m == BaseMode::CP || m == BaseMode::RS || m == BaseMode::EH; }
inline bool is_pt(BaseMode m) { return m == BaseMode::bus || m == BaseMode::metro; }
// Modes whose travelers occupy a road vehicle of their own (counted in x_a).
inline bool is_vehicle_mode(BaseMode m) {
  return m == BaseMode::car || m == BaseMode::CD || m == BaseMode::walk || m == BaseMode::bike;
}

// A travel mode: one leg, or a chain of legs joined at transfer nodes.
struct Mode {
  std::vector<BaseMode> legs;

  bool simple() const { return legs.size() == 1; }
  BaseMode base() const { return legs.front(); }
  bool contains(BaseMode m) const {
    for (auto l : legs)
      if (l == m) return true;
    return false;
  }
  std::string name() const;
  bool operator==(const Mode&) const = default;
};

Mode mode_from_string(const std::string& s);

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// FNV-1a, used for manifest and matrix hashes.
struct Fnv64 {
  std::uint64_t h = 1469598103934665603ull;
  void feed(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  }
  void feed(const std::string& s) { feed(s.data(), s.size()); }
  std::string hex() const;
};

std::string format_double(double v);  // shortest round-trip representation

}  // namespace mta
