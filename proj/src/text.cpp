#include "ems/text.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace ems::text {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

// Words that end with '.' mid-sentence. Compared lowercase, dot stripped.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "inc",  "corp", "co",   "ltd", "llc", "plc", "u.s", "u.k",  "e.g",
      "i.e",  "vs",   "etc",  "mr",  "mrs", "ms",  "dr",  "st",   "no",
      "fig",  "approx", "est", "dept", "govt", "jan", "feb", "mar", "apr",
      "jun",  "jul",  "aug",  "sep", "sept", "oct", "nov", "dec",  "q1",
      "q2",   "q3",   "q4",   "fy",  "vol",
  };
  return set;
}

bool guards_dot(std::string_view input, size_t dot) {
  // Word immediately before the '.', dots allowed inside ("U.S.").
  size_t begin = dot;
  while (begin > 0) {
    char c = input[begin - 1];
    if (is_alnum(c) || c == '.') {
      --begin;
    } else {
      break;
    }
  }
  if (begin == dot) return false;
  std::string word = to_lower(input.substr(begin, dot - begin));
  while (!word.empty() && word.back() == '.') word.pop_back();
  if (word.size() == 1 && !is_digit(word[0])) return true;  // initials
  return abbreviations().count(word) > 0;
}

}  // namespace

std::string to_lower(std::string_view input) {
  std::string out(input);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view input) {
  size_t b = 0;
  size_t e = input.size();
  while (b < e && is_space(input[b])) ++b;
  while (e > b && is_space(input[e - 1])) --e;
  return std::string(input.substr(b, e - b));
}

std::vector<std::string> tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  std::string current;
  for (size_t i = 0; i < input.size(); ++i) {
    char c = input[i];
    if (is_alnum(c)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      continue;
    }
    bool joins_digits = (c == '.' || c == ',') && i > 0 && i + 1 < input.size() &&
                        is_digit(input[i - 1]) && is_digit(input[i + 1]);
    if (joins_digits) {
      current.push_back(c);
      continue;
    }
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool is_numeric_token(std::string_view token) {
  for (char c : token) {
    if (is_digit(c)) return true;
  }
  return false;
}

std::vector<std::string> split_paragraphs(std::string_view input) {
  std::vector<std::string> paragraphs;
  std::string current;
  size_t pos = 0;
  auto flush = [&] {
    std::string p = trim(current);
    if (!p.empty()) paragraphs.push_back(std::move(p));
    current.clear();
  };
  while (pos <= input.size()) {
    size_t eol = input.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? input.substr(pos) : input.substr(pos, eol - pos);
    if (trim(line).empty()) {
      flush();
    } else {
      if (!current.empty()) current.push_back('\n');
      current.append(line);
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  flush();
  return paragraphs;
}

std::vector<std::string> split_sentences(std::string_view input) {
  std::vector<std::string> sentences;
  size_t start = 0;
  for (size_t i = 0; i < input.size(); ++i) {
    char c = input[i];
    if (c != '.' && c != '!' && c != '?') continue;
    size_t j = i + 1;
    while (j < input.size() && (input[j] == '.' || input[j] == '!' || input[j] == '?' ||
                                input[j] == '"' || input[j] == '\'' || input[j] == ')')) {
      ++j;
    }
    if (j >= input.size()) break;  // trailing terminator: handled after loop
    if (!is_space(input[j])) continue;
    size_t k = j;
    while (k < input.size() && is_space(input[k])) ++k;
    if (k >= input.size()) break;
    if (!is_upper(input[k]) && !is_digit(input[k])) continue;
    if (c == '.' && guards_dot(input, i)) continue;
    std::string sentence = trim(input.substr(start, j - start));
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
    start = k;
    i = k - 1;
  }
  std::string tail = trim(input.substr(start));
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

bool is_bullet_line(std::string_view line) {
  std::string t = trim(line);
  if (t.empty()) return false;
  if (t.size() >= 2 && (t[0] == '-' || t[0] == '*') && is_space(t[1])) return true;
  static constexpr std::string_view kDot = "\xE2\x80\xA2";  // "•"
  if (t.size() >= kDot.size() && std::string_view(t).substr(0, kDot.size()) == kDot) return true;
  size_t d = 0;
  while (d < t.size() && is_digit(t[d])) ++d;
  if (d >= 1 && d <= 3 && d + 1 < t.size() && (t[d] == '.' || t[d] == ')') &&
      is_space(t[d + 1])) {
    return true;
  }
  return false;
}

std::string strip_bullet_marker(std::string_view line) {
  std::string t = trim(line);
  if (!is_bullet_line(t)) return t;
  size_t skip = 0;
  static constexpr std::string_view kDot = "\xE2\x80\xA2";
  if (t[0] == '-' || t[0] == '*') {
    skip = 1;
  } else if (std::string_view(t).substr(0, kDot.size()) == kDot) {
    skip = kDot.size();
  } else {
    while (skip < t.size() && is_digit(t[skip])) ++skip;
    ++skip;  // '.' or ')'
  }
  return trim(std::string_view(t).substr(skip));
}

}  // namespace ems::text
