#include "ocdesign/toml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ocdesign/errors.hpp"

namespace ocdesign::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

std::string_view strip(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_bare_key(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

Value parse_scalar(std::string_view token, int line);

Value parse_array(std::string_view body, int line) {
  Value v;
  v.kind = Value::Kind::kArray;
  v.line = line;
  size_t pos = 0;
  while (pos < body.size()) {
    size_t next = pos;
    int depth = 0;
    bool in_string = false;
    while (next < body.size()) {
      const char c = body[next];
      if (in_string) {
        if (c == '"') in_string = false;
      } else if (c == '"') {
        in_string = true;
      } else if (c == '[') {
        ++depth;
      } else if (c == ']') {
        --depth;
      } else if (c == ',' && depth == 0) {
        break;
      }
      ++next;
    }
    const std::string_view item = strip(body.substr(pos, next - pos));
    if (!item.empty()) {
      v.array.push_back(parse_scalar(item, line));
    } else if (next < body.size()) {
      fail(line, "empty array element");
    }
    pos = next + 1;
  }
  return v;
}

Value parse_scalar(std::string_view token, int line) {
  Value v;
  v.line = line;
  if (token.empty()) fail(line, "missing value");
  if (token.front() == '"') {
    if (token.size() < 2 || token.back() != '"') {
      fail(line, "unterminated string");
    }
    v.kind = Value::Kind::kString;
    v.str = std::string(token.substr(1, token.size() - 2));
    return v;
  }
  if (token.front() == '[') {
    if (token.back() != ']') fail(line, "unterminated array");
    return parse_array(token.substr(1, token.size() - 2), line);
  }
  if (token == "true" || token == "false") {
    v.kind = Value::Kind::kBool;
    v.boolean = token == "true";
    return v;
  }
  if (token == "inf" || token == "+inf" || token == "-inf") {
    v.kind = Value::Kind::kFloat;
    v.number = token[0] == '-' ? -std::numeric_limits<double>::infinity()
                               : std::numeric_limits<double>::infinity();
    return v;
  }
  const std::string text(token);
  const bool looks_float = text.find_first_of(".eE") != std::string::npos;
  if (!looks_float) {
    long long parsed = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), parsed);
    if (ec == std::errc() && ptr == text.data() + text.size()) {
      v.kind = Value::Kind::kInteger;
      v.integer = parsed;
      v.number = static_cast<double>(parsed);
      return v;
    }
  }
  try {
    size_t used = 0;
    const double parsed = std::stod(text, &used);
    if (used == text.size()) {
      v.kind = Value::Kind::kFloat;
      v.number = parsed;
      return v;
    }
  } catch (const std::exception&) {
  }
  fail(line, "cannot parse value '" + text + "'");
}

// Removes a trailing comment that is not inside a string literal.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

}  // namespace

void Table::insert(const std::string& key, Value value) {
  if (values_.count(key)) {
    fail(value.line, "duplicate key '" + key + "'");
  }
  values_.emplace(key, std::move(value));
}

const Value* Table::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::vector<std::string> Table::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

Table parse_string(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      const std::string_view name = strip(line.substr(1, line.size() - 2));
      if (!valid_bare_key(name)) {
        fail(line_no, "invalid section name '" + std::string(name) + "'");
      }
      section = std::string(name);
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, "expected 'key = value'");
    }
    const std::string_view key = strip(line.substr(0, eq));
    if (!valid_bare_key(key)) {
      fail(line_no, "invalid key '" + std::string(key) + "'");
    }
    Value value = parse_scalar(strip(line.substr(eq + 1)), line_no);
    const std::string full =
        section.empty() ? std::string(key) : section + "." + std::string(key);
    table.insert(full, std::move(value));
  }
  return table;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

}  // namespace ocdesign::toml
