#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ems::text {

/// Shared token normalizer used by the lexical matcher, the exact scorer and
/// the n-gram baselines: lowercase, split on non-alphanumeric runs, but keep
/// '.'/',' sitting between two digits inside the token so amounts like
/// "11.4" or "1,250" survive as single tokens. "35%" normalizes to "35".
std::vector<std::string> tokenize(std::string_view input);

/// True if the token carries at least one digit.
bool is_numeric_token(std::string_view token);

std::string to_lower(std::string_view input);
std::string trim(std::string_view input);

/// Split on blank lines. Paragraphs are trimmed; empty ones are dropped.
std::vector<std::string> split_paragraphs(std::string_view input);

/// Sentence splitter tuned for financial prose: a sentence ends at '.', '!'
/// or '?' followed by whitespace and an uppercase letter or digit. Common
/// abbreviations ("Inc.", "U.S.", "Q3.", "vs.") and single-letter initials
/// do not end a sentence, and decimals never split because no whitespace
/// follows the dot.
std::vector<std::string> split_sentences(std::string_view input);

/// True if the line opens with a bullet marker: "-", "*", "•" or a
/// number followed by '.' or ')'.
bool is_bullet_line(std::string_view line);

/// Remove the bullet marker (and following spaces) from a line.
std::string strip_bullet_marker(std::string_view line);

}  // namespace ems::text
