#include "ergo/toml_lite.hpp"

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergo {

namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    for (;;) {
      skip_blank(true);
      if (eof()) break;
      if (peek() == '[')
        table = header(root);
      else
        keyval(*table);
      end_of_line();
    }
    return root;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("line " + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  char get() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  // Skip spaces/tabs; with newlines also skip line breaks and comments.
  void skip_blank(bool newlines) {
    for (;;) {
      while (!eof() && (peek() == ' ' || peek() == '\t')) get();
      if (eof()) return;
      if (peek() == '#') {
        while (!eof() && peek() != '\n') get();
        continue;
      }
      if (newlines && (peek() == '\n' || peek() == '\r')) {
        get();
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_blank(false);
    if (eof()) return;
    if (peek() == '\r') get();
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "' after value");
    get();
  }

  static bool is_bare(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string bare_key() {
    std::string k;
    while (!eof() && is_bare(peek())) k += get();
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_key()};
    for (;;) {
      skip_blank(false);
      if (peek() != '.') break;
      get();
      skip_blank(false);
      parts.push_back(bare_key());
    }
    return parts;
  }

  // Walk (creating as needed) all but the last segment; arrays-of-tables
  // resolve to their last element, matching TOML header semantics.
  json* walk(json* node, const std::vector<std::string>& parts, std::size_t upto) {
    for (std::size_t i = 0; i < upto; ++i) {
      json& slot = (*node)[parts[i]];
      if (slot.is_null()) slot = json::object();
      if (slot.is_array()) {
        if (slot.empty() || !slot.back().is_object())
          fail("key '" + parts[i] + "' is an array, not a table");
        node = &slot.back();
      } else if (slot.is_object()) {
        node = &slot;
      } else {
        fail("key '" + parts[i] + "' already holds a value");
      }
    }
    return node;
  }

  json* header(json& root) {
    get();  // '['
    const bool aot = peek() == '[';
    if (aot) get();
    skip_blank(false);
    const auto parts = dotted_key();
    skip_blank(false);
    if (peek() != ']') fail("expected ']' to close table header");
    get();
    if (aot) {
      if (peek() != ']') fail("expected ']]' to close array-of-tables header");
      get();
    }
    json* parent = walk(&root, parts, parts.size() - 1);
    json& slot = (*parent)[parts.back()];
    if (aot) {
      if (slot.is_null()) slot = json::array();
      if (!slot.is_array()) fail("key '" + parts.back() + "' is not an array of tables");
      slot.push_back(json::object());
      return &slot.back();
    }
    if (slot.is_null()) {
      slot = json::object();
    } else if (!slot.is_object() || !slot.empty()) {
      fail("table '" + parts.back() + "' is already defined");
    }
    return &slot;
  }

  void keyval(json& table) {
    const auto parts = dotted_key();
    skip_blank(false);
    if (peek() != '=') fail("expected '=' after key '" + parts.back() + "'");
    get();
    skip_blank(false);
    json* node = walk(&table, parts, parts.size() - 1);
    if (node->contains(parts.back())) fail("duplicate key '" + parts.back() + "'");
    (*node)[parts.back()] = value();
  }

  json value() {
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '[') return array_value();
    if (c == '{') return inline_table();
    if (c == 't' || c == 'f') return bool_value();
    if (c == '+' || c == '-' || std::isdigit(static_cast<unsigned char>(c))) return number();
    if (c == '\'') fail("literal strings are not supported; use \"...\"");
    fail(std::string("unexpected character '") + c + "' at start of value");
  }

  json string_value() {
    get();  // '"'
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      const char e = get();
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
  }

  json bool_value() {
    if (s_.compare(pos_, 4, "true") == 0 && !(pos_ + 4 < s_.size() && is_bare(s_[pos_ + 4]))) {
      pos_ += 4;
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0 && !(pos_ + 5 < s_.size() && is_bare(s_[pos_ + 5]))) {
      pos_ += 5;
      return false;
    }
    fail("expected 'true' or 'false'");
  }

  json number() {
    std::string tok;
    if (peek() == '+' || peek() == '-') tok += get();
    bool is_float = false;
    while (!eof()) {
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        tok += get();
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_float = true;
        tok += get();
        if ((c == 'e' || c == 'E') && (peek() == '+' || peek() == '-')) tok += get();
      } else if (c == '_') {
        fail("underscores in numbers are not supported");
      } else {
        break;
      }
    }
    if (tok.empty() || tok == "+" || tok == "-") fail("expected a number");
    if (!std::isdigit(static_cast<unsigned char>(tok.back()))) fail("malformed number '" + tok + "'");
    errno = 0;
    char* end = nullptr;
    if (is_float) {
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || errno == ERANGE) fail("malformed number '" + tok + "'");
      return v;
    }
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size() || errno == ERANGE) fail("malformed integer '" + tok + "'");
    return static_cast<std::int64_t>(v);
  }

  json array_value() {
    get();  // '['
    json arr = json::array();
    skip_blank(true);
    if (peek() == ']') {
      get();
      return arr;
    }
    for (;;) {
      arr.push_back(value());
      skip_blank(true);
      if (peek() == ',') {
        get();
        skip_blank(true);
        if (peek() == ']') {  // trailing comma
          get();
          return arr;
        }
        continue;
      }
      if (peek() == ']') {
        get();
        return arr;
      }
      fail("expected ',' or ']' in array");
    }
  }

  json inline_table() {
    get();  // '{'
    json obj = json::object();
    skip_blank(false);
    if (peek() == '}') {
      get();
      return obj;
    }
    for (;;) {
      if (peek() == '\n') fail("inline tables must stay on one line");
      const std::string k = bare_key();
      skip_blank(false);
      if (peek() != '=') fail("expected '=' in inline table after key '" + k + "'");
      get();
      skip_blank(false);
      if (obj.contains(k)) fail("duplicate key '" + k + "' in inline table");
      obj[k] = value();
      skip_blank(false);
      if (peek() == ',') {
        get();
        skip_blank(false);
        continue;
      }
      if (peek() == '}') {
        get();
        return obj;
      }
      fail("expected ',' or '}' in inline table");
    }
  }
};

}  // namespace

nlohmann::json toml_lite_parse(const std::string& text) { return Parser(text).parse(); }

}  // namespace ergo
