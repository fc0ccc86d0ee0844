#include "crimescope/tomlmini.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace crimescope::tomlmini {

bool Value::as_bool() const {
    if (kind != Kind::Bool) throw ParseError("expected boolean");
    return b;
}

long long Value::as_int() const {
    if (kind != Kind::Int) throw ParseError("expected integer");
    return i;
}

double Value::as_double() const {
    if (kind == Kind::Float) return f;
    if (kind == Kind::Int) return static_cast<double>(i);
    throw ParseError("expected number");
}

const std::string& Value::as_string() const {
    if (kind != Kind::String) throw ParseError("expected string");
    return s;
}

const std::vector<Value>& Value::as_array() const {
    if (kind != Kind::Array) throw ParseError("expected array");
    return arr;
}

std::string Value::repr() const {
    switch (kind) {
        case Kind::Bool: return b ? "true" : "false";
        case Kind::Int: return std::to_string(i);
        case Kind::Float: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", f);
            return buf;
        }
        case Kind::String: return "\"" + s + "\"";
        case Kind::Array: {
            std::string out = "[";
            for (std::size_t k = 0; k < arr.size(); ++k) {
                if (k) out += ",";
                out += arr[k].repr();
            }
            return out + "]";
        }
    }
    return "";
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) take();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("toml parse error at line " + std::to_string(line) + ": " + msg);
    }
};

void skip_to_eol(Cursor& c) {
    while (!c.eof() && c.peek() != '\n') c.take();
    if (!c.eof()) c.take();
}

std::string parse_key(Cursor& c) {
    std::string key;
    while (!c.eof()) {
        char ch = c.peek();
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.') {
            key.push_back(c.take());
        } else {
            break;
        }
    }
    if (key.empty()) c.fail("expected key");
    return key;
}

Value parse_value(Cursor& c);

Value parse_string(Cursor& c) {
    c.take();  // opening quote
    Value v;
    v.kind = Value::Kind::String;
    while (true) {
        if (c.eof()) c.fail("unterminated string");
        char ch = c.take();
        if (ch == '"') break;
        if (ch == '\\') {
            if (c.eof()) c.fail("bad escape");
            char e = c.take();
            switch (e) {
                case 'n': v.s.push_back('\n'); break;
                case 't': v.s.push_back('\t'); break;
                case '"': v.s.push_back('"'); break;
                case '\\': v.s.push_back('\\'); break;
                default: c.fail("unsupported escape");
            }
        } else {
            v.s.push_back(ch);
        }
    }
    return v;
}

Value parse_array(Cursor& c) {
    c.take();  // '['
    Value v;
    v.kind = Value::Kind::Array;
    while (true) {
        c.skip_ws_inline();
        if (c.eof()) c.fail("unterminated array");
        if (c.peek() == ']') {
            c.take();
            break;
        }
        v.arr.push_back(parse_value(c));
        c.skip_ws_inline();
        if (!c.eof() && c.peek() == ',') {
            c.take();
            continue;
        }
        c.skip_ws_inline();
        if (c.eof() || c.peek() != ']') c.fail("expected ',' or ']' in array");
    }
    return v;
}

Value parse_scalar_token(Cursor& c) {
    std::string tok;
    while (!c.eof()) {
        char ch = c.peek();
        if (ch == ',' || ch == ']' || ch == '#' || ch == '\n' || ch == ' ' || ch == '\t') break;
        tok.push_back(c.take());
    }
    if (tok.empty()) c.fail("expected value");
    Value v;
    if (tok == "true" || tok == "false") {
        v.kind = Value::Kind::Bool;
        v.b = (tok == "true");
        return v;
    }
    // integer?
    {
        long long out = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
        if (ec == std::errc() && p == tok.data() + tok.size()) {
            v.kind = Value::Kind::Int;
            v.i = out;
            return v;
        }
    }
    // float
    try {
        std::size_t used = 0;
        const double d = std::stod(tok, &used);
        if (used == tok.size() && std::isfinite(d)) {
            v.kind = Value::Kind::Float;
            v.f = d;
            return v;
        }
    } catch (const std::exception&) {
    }
    c.fail("cannot parse value '" + tok + "'");
}

Value parse_value(Cursor& c) {
    c.skip_ws_inline();
    if (c.eof()) c.fail("expected value");
    const char ch = c.peek();
    if (ch == '"') return parse_string(c);
    if (ch == '[') return parse_array(c);
    return parse_scalar_token(c);
}

}  // namespace

Table parse(const std::string& text) {
    Table table;
    Cursor c{text};
    std::string prefix;
    while (!c.eof()) {
        c.skip_ws_inline();
        if (c.eof()) break;
        const char ch = c.peek();
        if (ch == '\n' || ch == '\r') {
            c.take();
            continue;
        }
        if (ch == '#') {
            skip_to_eol(c);
            continue;
        }
        if (ch == '[') {
            c.take();
            prefix = parse_key(c);
            c.skip_ws_inline();
            if (c.eof() || c.peek() != ']') c.fail("expected ']' after table name");
            c.take();
            skip_to_eol(c);
            continue;
        }
        const std::string key = parse_key(c);
        c.skip_ws_inline();
        if (c.eof() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
        c.take();
        Value v = parse_value(c);
        c.skip_ws_inline();
        if (!c.eof() && c.peek() == '#') skip_to_eol(c);
        else if (!c.eof() && c.peek() == '\r') c.take();
        else if (!c.eof() && c.peek() != '\n') c.fail("trailing characters after value for '" + key + "'");

        const std::string full = prefix.empty() ? key : prefix + "." + key;
        if (table.count(full)) c.fail("duplicate key '" + full + "'");
        table.emplace(full, std::move(v));
    }
    return table;
}

Table parse_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

}  // namespace crimescope::tomlmini
