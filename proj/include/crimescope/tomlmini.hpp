#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace crimescope::tomlmini {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Small TOML subset: [tables], key = value with strings, integers, floats,
// booleans and single-line arrays; # comments. Keys are returned flattened
// as "table.key".
struct Value {
    enum class Kind { Bool, Int, Float, String, Array };
    Kind kind = Kind::Int;
    bool b = false;
    long long i = 0;
    double f = 0.0;
    std::string s;
    std::vector<Value> arr;

    bool as_bool() const;
    long long as_int() const;
    double as_double() const;  // accepts Int
    const std::string& as_string() const;
    const std::vector<Value>& as_array() const;
    std::string repr() const;  // canonical text form
};

using Table = std::map<std::string, Value>;

Table parse(const std::string& text);
Table parse_file(const std::string& path);

}  // namespace crimescope::tomlmini
