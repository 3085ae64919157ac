#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace semunit {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// ASCII letters count as alphabetic, and so does every byte of a multibyte
// UTF-8 sequence, so accented words keep their letters.
inline bool is_alpha_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool is_upper_byte(unsigned char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_digit_byte(unsigned char c) { return c >= '0' && c <= '9'; }

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string keep_alpha(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (is_alpha_byte(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

// Optional sign, digits (optionally grouped by thousands commas), at most one
// decimal point. ".5" and "5." are accepted; "1,23" is not.
inline bool is_number(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t digits = 0;
  bool grouped = false;
  std::size_t group_len = 0;
  for (; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (is_digit_byte(c)) {
      ++digits;
      ++group_len;
    } else if (c == ',') {
      if (group_len == 0 || (!grouped && group_len > 3) || (grouped && group_len != 3)) return false;
      grouped = true;
      group_len = 0;
    } else {
      break;
    }
  }
  if (grouped && group_len != 3) return false;
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size(); ++i) {
      if (!is_digit_byte(static_cast<unsigned char>(s[i]))) return false;
      ++digits;
    }
  }
  return i == s.size() && digits > 0;
}

}  // namespace semunit
