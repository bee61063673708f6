#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>

namespace leadsel {

/// Vehicle identifier. Unique for the lifetime of a run and never reused.
enum class VehicleId : std::uint32_t {};

constexpr std::uint32_t to_int(VehicleId id) noexcept {
  return static_cast<std::uint32_t>(id);
}

/// Planar coordinates in meters; the intersection center is the origin.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(const Position& a, const Position& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double norm(const Position& p) noexcept { return std::hypot(p.x, p.y); }

inline bool is_finite(const Position& p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

enum class Variant { basic, optimized };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

}  // namespace leadsel
