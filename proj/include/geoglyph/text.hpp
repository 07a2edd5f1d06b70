#pragma once

// UTF-8 handling, join-key normalization and locale-free number formatting.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace geoglyph::text {

inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
      return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F);
    };
    if (c < 0x80) {
      out.push_back(c);
      i += 1;
    } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
      out.push_back((static_cast<char32_t>(c & 0x1F) << 6) | cont(1));
      i += 2;
    } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
      out.push_back((static_cast<char32_t>(c & 0x0F) << 12) | (cont(1) << 6) | cont(2));
      i += 3;
    } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
      out.push_back((static_cast<char32_t>(c & 0x07) << 18) | (cont(1) << 12) |
                    (cont(2) << 6) | cont(3));
      i += 4;
    } else {
      out.push_back(0xFFFD);
      i += 1;
    }
  }
  return out;
}

inline std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    if (cp <= 0x7F) {
      out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

constexpr bool is_space(char32_t c) {
  return c == 0x09 || c == 0x0A || c == 0x0B || c == 0x0C || c == 0x0D || c == 0x20 ||
         c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

// Simple (one-to-one) Unicode case folding for the Latin, Greek and Cyrillic
// blocks. Other code points pass through unchanged.
constexpr char32_t fold_case(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c == 0xB5) return 0x3BC;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130) return U'i';
    if (c == 0x178) return 0xFF;
    if (c == 0x17F) return U's';
    const bool even_upper = (c <= 0x137) || (c >= 0x14A && c <= 0x177);
    const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (even_upper && c % 2 == 0) return c + 1;
    if (odd_upper && c % 2 == 1) return c + 1;
    return c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c == 0x3C2) return 0x3C3;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

inline std::u32string trim(std::u32string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::u32string(s.substr(b, e - b));
}

inline std::string trim(std::string_view s) { return encode_utf8(trim(decode_utf8(s))); }

/// Join key: trimmed, case-folded name.
inline std::string normalize_key(std::string_view name) {
  std::u32string cps = trim(decode_utf8(name));
  for (auto& c : cps) c = fold_case(c);
  return encode_utf8(cps);
}

inline std::size_t codepoint_count(std::string_view s) { return decode_utf8(s).size(); }

/// Greedy whitespace wrap. A word longer than the limit keeps its own line.
inline std::vector<std::string> wrap(std::string_view s, std::size_t max_codepoints) {
  std::vector<std::u32string> words;
  std::u32string current;
  for (char32_t c : decode_utf8(s)) {
    if (is_space(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));

  std::vector<std::string> lines;
  std::u32string line;
  for (auto& w : words) {
    if (line.empty()) {
      line = w;
    } else if (line.size() + 1 + w.size() <= max_codepoints) {
      line.push_back(U' ');
      line += w;
    } else {
      lines.push_back(encode_utf8(line));
      line = w;
    }
  }
  if (!line.empty()) lines.push_back(encode_utf8(line));
  return lines;
}

/// Decimal representation of |v| rounded half-up at `decimals` places,
/// working on the shortest round-trip digits so 1.005 rounds to 1.01.
struct Decimal {
  bool negative = false;
  std::string integer;   // no leading zeros except a single "0"
  std::string fraction;  // exactly `decimals` digits
};

inline Decimal round_half_up(double v, int decimals) {
  Decimal d;
  if (!std::isfinite(v)) v = 0.0;
  std::array<char, 512> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  std::string s(buf.data(), res.ptr);
  if (!s.empty() && s[0] == '-') {
    d.negative = true;
    s.erase(0, 1);
  }
  auto dot = s.find('.');
  std::string ip = dot == std::string::npos ? s : s.substr(0, dot);
  std::string fp = dot == std::string::npos ? std::string() : s.substr(dot + 1);
  const auto keep = static_cast<std::size_t>(decimals);
  bool round_up = fp.size() > keep && fp[keep] >= '5';
  fp.resize(keep, '0');
  std::string digits = ip + fp;
  if (round_up) {
    int i = static_cast<int>(digits.size()) - 1;
    while (i >= 0) {
      if (digits[static_cast<std::size_t>(i)] == '9') {
        digits[static_cast<std::size_t>(i)] = '0';
        --i;
      } else {
        ++digits[static_cast<std::size_t>(i)];
        break;
      }
    }
    if (i < 0) digits.insert(digits.begin(), '1');
  }
  d.integer = digits.substr(0, digits.size() - keep);
  d.fraction = digits.substr(digits.size() - keep);
  auto nz = d.integer.find_first_not_of('0');
  d.integer = nz == std::string::npos ? "0" : d.integer.substr(nz);
  if (d.integer == "0" && d.fraction.find_first_not_of('0') == std::string::npos) {
    d.negative = false;
  }
  return d;
}

/// Fixed two-decimal coordinate formatting used by the SVG writer.
inline std::string fixed2(double v) {
  Decimal d = round_half_up(v, 2);
  return (d.negative ? "-" : "") + d.integer + "." + d.fraction;
}

/// Human-facing value formatting: thousands separators, at most two
/// decimals (half-up), trailing zeros trimmed.
inline std::string format_value(double v) {
  Decimal d = round_half_up(v, 2);
  std::string grouped;
  const std::size_t n = d.integer.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) grouped.push_back(',');
    grouped.push_back(d.integer[i]);
  }
  while (!d.fraction.empty() && d.fraction.back() == '0') d.fraction.pop_back();
  std::string out = d.negative ? "-" : "";
  out += grouped;
  if (!d.fraction.empty()) out += "." + d.fraction;
  return out;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // Control characters are not representable in XML 1.0.
        if (static_cast<unsigned char>(c) >= 0x20 || c == '\t' || c == '\n' || c == '\r') {
          out.push_back(c);
        }
    }
  }
  return out;
}

// FNV-1a, used for stable per-key hashing.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace geoglyph::text
