#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "folia/types.hpp"

namespace folia {

/// Fixed 17-significant-digit float format used for every numeric value we
/// emit (JSON and CSV), so identical inputs produce byte-identical outputs.
std::string format_double(double v);

/// Minimal JSON document builder.  Object keys keep insertion order and
/// doubles go through format_double, which nlohmann's dumper does not offer.
class JsonValue {
 public:
  using Array = std::vector<JsonValue>;
  using Object = std::vector<std::pair<std::string, JsonValue>>;

  JsonValue() : v_(nullptr) {}
  JsonValue(std::nullptr_t) : v_(nullptr) {}
  JsonValue(bool b) : v_(b) {}
  JsonValue(int i) : v_(static_cast<int64_t>(i)) {}
  JsonValue(int64_t i) : v_(i) {}
  JsonValue(size_t i) : v_(static_cast<int64_t>(i)) {}
  JsonValue(double d) : v_(d) {}
  JsonValue(const char* s) : v_(std::string(s)) {}
  JsonValue(std::string s) : v_(std::move(s)) {}
  JsonValue(Array a) : v_(std::move(a)) {}
  JsonValue(Object o) : v_(std::move(o)) {}
  static JsonValue complex(Complex z) { return JsonValue(Array{z.real(), z.imag()}); }

  JsonValue& set(const std::string& key, JsonValue value);
  void push_back(JsonValue value);

  std::string dump(int indent = 0) const;

 private:
  void dump_to(std::string& out, int indent, int level) const;
  std::variant<std::nullptr_t, bool, int64_t, double, std::string, Array, Object> v_;
};

std::string json_escape(const std::string& s);

}  // namespace folia
