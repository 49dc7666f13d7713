#include "folia/jsonfmt.hpp"

#include <cmath>
#include <cstdio>

namespace folia {

std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue value) {
  if (!std::holds_alternative<Object>(v_)) v_ = Object{};
  std::get<Object>(v_).emplace_back(key, std::move(value));
  return *this;
}

void JsonValue::push_back(JsonValue value) {
  if (!std::holds_alternative<Array>(v_)) v_ = Array{};
  std::get<Array>(v_).push_back(std::move(value));
}

void JsonValue::dump_to(std::string& out, int indent, int level) const {
  auto newline = [&](int lvl) {
    if (indent > 0) {
      out += '\n';
      out.append(static_cast<size_t>(indent) * lvl, ' ');
    }
  };
  if (std::holds_alternative<std::nullptr_t>(v_)) {
    out += "null";
  } else if (std::holds_alternative<bool>(v_)) {
    out += std::get<bool>(v_) ? "true" : "false";
  } else if (std::holds_alternative<int64_t>(v_)) {
    out += std::to_string(std::get<int64_t>(v_));
  } else if (std::holds_alternative<double>(v_)) {
    out += format_double(std::get<double>(v_));
  } else if (std::holds_alternative<std::string>(v_)) {
    out += '"';
    out += json_escape(std::get<std::string>(v_));
    out += '"';
  } else if (std::holds_alternative<Array>(v_)) {
    const auto& arr = std::get<Array>(v_);
    if (arr.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    for (size_t i = 0; i < arr.size(); ++i) {
      if (i) out += ',';
      newline(level + 1);
      arr[i].dump_to(out, indent, level + 1);
    }
    newline(level);
    out += ']';
  } else {
    const auto& obj = std::get<Object>(v_);
    if (obj.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    for (size_t i = 0; i < obj.size(); ++i) {
      if (i) out += ',';
      newline(level + 1);
      out += '"';
      out += json_escape(obj[i].first);
      out += "\":";
      if (indent > 0) out += ' ';
      obj[i].second.dump_to(out, indent, level + 1);
    }
    newline(level);
    out += '}';
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  return out;
}

}  // namespace folia
