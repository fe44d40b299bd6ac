#pragma once

#include <map>
#include <string>
#include <vector>

namespace ocdesign::toml {

// Minimal strict TOML subset: [sections], bare keys, strings, integers,
// floats (inf/-inf accepted), booleans, and single-line arrays of scalars.
// Exactly what the design config schema needs; anything else is an error.
struct Value {
  enum class Kind { kString, kInteger, kFloat, kBool, kArray };
  Kind kind = Kind::kString;
  std::string str;
  long long integer = 0;
  double number = 0.0;
  bool boolean = false;
  std::vector<Value> array;
  int line = 0;

  bool is_number() const {
    return kind == Kind::kInteger || kind == Kind::kFloat;
  }
  double as_number() const {
    return kind == Kind::kInteger ? static_cast<double>(integer) : number;
  }
};

class Table {
 public:
  void insert(const std::string& key, Value value);
  const Value* find(const std::string& key) const;
  std::vector<std::string> keys() const;

 private:
  std::map<std::string, Value> values_;
};

Table parse_string(const std::string& text);
Table parse_file(const std::string& path);

}  // namespace ocdesign::toml
