#include "occutime/function_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

#include "occutime/errors.hpp"

namespace occutime {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double to_double(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("expected a number for " + context + ", got '" + text + "'");
  }
  return v;
}

// Positional and named arguments bound against an ordered parameter list.
class Args {
 public:
  Args(std::string fname, const std::vector<std::string>& raw,
       std::vector<std::string> params)
      : fname_(std::move(fname)), params_(std::move(params)) {
    std::size_t position = 0;
    for (const auto& piece : raw) {
      const auto eq = piece.find('=');
      const bool named = eq != std::string::npos && piece.find('(') > eq;
      std::string key, value;
      if (named) {
        key = trim(std::string_view(piece).substr(0, eq));
        value = trim(std::string_view(piece).substr(eq + 1));
        if (std::find(params_.begin(), params_.end(), key) == params_.end()) {
          throw ConfigError("unknown parameter '" + key + "' for " + fname_);
        }
      } else {
        if (position >= params_.size()) {
          throw ConfigError("too many arguments for " + fname_);
        }
        key = params_[position++];
        value = piece;
      }
      if (!values_.emplace(key, value).second) {
        throw ConfigError("parameter '" + key + "' given twice for " + fname_);
      }
    }
  }

  std::optional<double> number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return to_double(it->second, fname_ + "." + key);
  }
  double number(const std::string& key, double fallback) const {
    return number(key).value_or(fallback);
  }
  double required(const std::string& key) const {
    auto v = number(key);
    if (!v) throw ConfigError(fname_ + " requires parameter '" + key + "'");
    return *v;
  }
  int integer(const std::string& key, int fallback) const {
    const double v = number(key, fallback);
    if (v != static_cast<double>(static_cast<int>(v))) {
      throw ConfigError(fname_ + "." + key + " must be an integer");
    }
    return static_cast<int>(v);
  }
  std::string text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(fname_ + " requires parameter '" + key + "'");
    return it->second;
  }

 private:
  std::string fname_;
  std::vector<std::string> params_;
  std::map<std::string, std::string> values_;
};

}  // namespace

std::vector<std::string> split_top_level(std::string_view text, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '(') ++depth;
    if (c == ')') {
      if (--depth < 0) throw ConfigError("unbalanced ')' in '" + std::string(text) + "'");
    }
    if (c == sep && depth == 0) {
      out.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw ConfigError("unbalanced '(' in '" + std::string(text) + "'");
  std::string last = trim(text.substr(start));
  if (!last.empty() || !out.empty()) out.push_back(std::move(last));
  return out;
}

TestFunction parse_function(std::string_view input) {
  std::string text = trim(input);
  if (text.empty()) throw ConfigError("empty function expression");
  std::replace(text.begin(), text.end(), ';', ',');

  std::string fname;
  std::vector<std::string> raw;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    fname = text;
  } else {
    if (text.back() != ')') throw ConfigError("malformed function expression '" + text + "'");
    fname = trim(std::string_view(text).substr(0, open));
    raw = split_top_level(std::string_view(text).substr(open + 1, text.size() - open - 2), ',');
    for (const auto& piece : raw) {
      if (piece.empty()) throw ConfigError("empty argument in '" + text + "'");
    }
  }

  try {
    if (fname == "gaussian_bump" || fname == "gaussian") {
      Args(fname, raw, {});
      return gaussian_bump();
    }
    if (fname == "hat") {
      Args(fname, raw, {});
      return hat();
    }
    if (fname == "indicator") {
      Args a(fname, raw, {"a", "b"});
      return indicator(a.number("a", 0.0), a.number("b", 1.0));
    }
    if (fname == "power") {
      Args a(fname, raw, {"alpha", "width"});
      return power_singularity(a.required("alpha"), a.number("width", 1.0));
    }
    if (fname == "lacunary") {
      Args a(fname, raw, {"s", "J", "width"});
      return lacunary_series(a.required("s"), a.integer("J", 12), a.number("width", 2.0));
    }
    if (fname == "exponential") {
      Args a(fname, raw, {"u"});
      std::istringstream in(a.text("u"));
      std::vector<double> u;
      std::string tok;
      while (in >> tok) u.push_back(to_double(tok, "exponential.u"));
      return complex_exponential(std::move(u));
    }
    if (fname == "identity") {
      Args(fname, raw, {});
      return identity_function();
    }
    if (fname == "quadratic") {
      Args(fname, raw, {});
      return quadratic_function();
    }
    if (fname == "constant") {
      Args a(fname, raw, {"c", "d"});
      return constant_function(a.number("c", 1.0), a.integer("d", 1));
    }
    if (fname == "zero") {
      Args a(fname, raw, {"d"});
      return constant_function(0.0, a.integer("d", 1));
    }
    if (fname == "scaled") {
      if (raw.size() != 2) throw ConfigError("scaled takes (c, function)");
      std::string c = raw[0];
      if (c.rfind("c=", 0) == 0) c = trim(std::string_view(c).substr(2));
      return scaled(to_double(c, "scaled.c"), parse_function(raw[1]));
    }
    if (fname == "sum") {
      if (raw.size() < 2) throw ConfigError("sum takes at least two functions");
      TestFunction acc = parse_function(raw[0]);
      for (std::size_t i = 1; i < raw.size(); ++i) acc = sum(acc, parse_function(raw[i]));
      return acc;
    }
    if (fname == "tensor") {
      std::vector<TestFunction> factors;
      for (const auto& piece : raw) factors.push_back(parse_function(piece));
      return tensor_product(std::move(factors));
    }
  } catch (const ArgumentError& e) {
    throw ConfigError("invalid function '" + text + "': " + e.what());
  }
  throw ConfigError("unknown function '" + fname + "'");
}

}  // namespace occutime
