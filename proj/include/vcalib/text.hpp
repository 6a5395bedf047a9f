#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace vcalib {

std::string lowercase(std::string s);
std::string trim(const std::string& s);

// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_whitespace(const std::string& s);

std::string replace_all(std::string haystack, std::string_view needle, std::string_view repl);

// ASCII case-insensitive find; returns npos when absent.
std::size_t ifind(const std::string& haystack, const std::string& needle, std::size_t pos = 0);

}  // namespace vcalib
