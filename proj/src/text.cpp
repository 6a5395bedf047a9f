#include "vcalib/text.hpp"

#include <cctype>

namespace vcalib {

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(b, e - b + 1);
}

std::string collapse_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out.push_back(' ');
    in_ws = false;
    out.push_back(c);
  }
  return out;
}

std::string replace_all(std::string haystack, std::string_view needle, std::string_view repl) {
  if (needle.empty()) return haystack;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    haystack.replace(pos, needle.size(), repl);
    pos += repl.size();
  }
  return haystack;
}

std::size_t ifind(const std::string& haystack, const std::string& needle, std::size_t pos) {
  return lowercase(haystack).find(lowercase(needle), pos);
}

}  // namespace vcalib
