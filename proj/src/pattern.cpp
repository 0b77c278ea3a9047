#include "evagg/pattern.hpp"

#include <unordered_map>

#include "evagg/errors.hpp"

namespace evagg {

namespace {

const std::unordered_map<std::string_view, std::string_view>& macros() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"INT", R"([+-]?\d+)"},
      {"NUMBER", R"([+-]?(?:\d+(?:\.\d*)?|\.\d+))"},
      {"WORD", R"(\w+)"},
      {"NOTSPACE", R"(\S+)"},
      {"SPACE", R"(\s*)"},
      {"DATA", R"(.*?)"},
      {"GREEDYDATA", R"(.*)"},
      {"IPV4", R"((?:\d{1,3}\.){3}\d{1,3})"},
      {"IPV6", R"([0-9A-Fa-f:.]*:[0-9A-Fa-f:.]*)"},
      {"IP", R"((?:(?:\d{1,3}\.){3}\d{1,3}|[0-9A-Fa-f:.]*:[0-9A-Fa-f:.]*))"},
      {"HOSTNAME", R"([0-9A-Za-z][0-9A-Za-z._-]*)"},
      {"PATH", R"((?:/[^\s]*|[A-Za-z]:\\[^"]*))"},
      {"TIMESTAMP_ISO8601", R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(?:\.\d+)?Z?)"},
      {"SYSLOGTIMESTAMP", R"([A-Z][a-z]{2} +\d{1,2} \d{2}:\d{2}:\d{2})"},
      {"SNORTTIME", R"(\d{2}/\d{2}(?:/\d{2})?-\d{2}:\d{2}:\d{2}(?:\.\d+)?)"},
  };
  return table;
}

}  // namespace

std::string expand_grok(std::string_view pattern) {
  std::string out;
  out.reserve(pattern.size() * 2);
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] == '\\' && i + 1 < pattern.size()) {
      out.append(pattern.substr(i, 2));
      i += 2;
      continue;
    }
    if (pattern.compare(i, 2, "%{") != 0) {
      out.push_back(pattern[i++]);
      continue;
    }
    auto close = pattern.find('}', i + 2);
    if (close == std::string_view::npos) {
      throw ConfigError("unterminated grok macro in '" + std::string(pattern) + "'");
    }
    auto body = pattern.substr(i + 2, close - i - 2);
    auto colon = body.find(':');
    auto name = body.substr(0, colon);
    auto it = macros().find(name);
    if (it == macros().end()) throw ConfigError("unknown grok macro '" + std::string(name) + "'");
    if (colon == std::string_view::npos) {
      out += "(?:";
    } else {
      auto capture = body.substr(colon + 1);
      if (capture.empty()) throw ConfigError("empty capture name in grok macro");
      out += "(?<";
      out += capture;
      out += '>';
    }
    out += it->second;
    out += ')';
    i = close + 1;
  }
  return out;
}

}  // namespace evagg
