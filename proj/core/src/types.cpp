#include "leadsel/types.hpp"

#include "leadsel/error.hpp"

namespace leadsel {

std::string to_string(Variant v) { return v == Variant::basic ? "basic" : "optimized"; }

Variant parse_variant(const std::string& text) {
  if (text == "basic") return Variant::basic;
  if (text == "optimized") return Variant::optimized;
  throw ConfigError("variant must be one of {basic, optimized}, got '" + text + "'");
}

}  // namespace leadsel
