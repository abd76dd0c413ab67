#include "ems/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ems/errors.hpp"
#include "ems/gateway.hpp"
#include "ems/text.hpp"

namespace ems {

namespace {

constexpr double kEpsilon = 1e-9;

double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

// n-grams as separator-joined keys; '\x1f' cannot appear in normalized tokens.
std::unordered_map<std::string, int> ngram_counts(std::span<const std::string> tokens, int n) {
  std::unordered_map<std::string, int> counts;
  if (n <= 0 || tokens.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (size_t j = 1; j < static_cast<size_t>(n); ++j) {
      key.push_back('\x1f');
      key.append(tokens[i + j]);
    }
    ++counts[key];
  }
  return counts;
}

PrfScore rouge_ngram(std::span<const std::string> candidate,
                     std::span<const std::string> reference, int n) {
  auto cand = ngram_counts(candidate, n);
  auto ref = ngram_counts(reference, n);
  long long cand_total = 0;
  long long ref_total = 0;
  for (const auto& [k, v] : cand) cand_total += v;
  for (const auto& [k, v] : ref) ref_total += v;
  long long overlap = 0;
  for (const auto& [key, count] : cand) {
    auto it = ref.find(key);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  PrfScore s;
  s.precision = cand_total == 0 ? 0.0 : static_cast<double>(overlap) / cand_total;
  s.recall = ref_total == 0 ? 0.0 : static_cast<double>(overlap) / ref_total;
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

}  // namespace

RougeVariant rouge_variant_from_string(std::string_view name) {
  std::string n = text::to_lower(name);
  if (n == "rouge-1" || n == "rouge1" || n == "1") return RougeVariant::kRouge1;
  if (n == "rouge-2" || n == "rouge2" || n == "2") return RougeVariant::kRouge2;
  if (n == "rouge-l" || n == "rougel" || n == "l") return RougeVariant::kRougeL;
  throw ConfigError("unknown rouge variant: " + std::string(name));
}

std::string to_string(RougeVariant variant) {
  switch (variant) {
    case RougeVariant::kRouge1: return "rouge-1";
    case RougeVariant::kRouge2: return "rouge-2";
    case RougeVariant::kRougeL: return "rouge-l";
  }
  throw ContractError("invalid rouge variant");
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

PrfScore rouge_tokens(std::span<const std::string> candidate,
                      std::span<const std::string> reference, RougeVariant variant) {
  if (variant == RougeVariant::kRouge1) return rouge_ngram(candidate, reference, 1);
  if (variant == RougeVariant::kRouge2) return rouge_ngram(candidate, reference, 2);
  PrfScore s;
  double lcs = static_cast<double>(lcs_length(candidate, reference));
  s.precision = candidate.empty() ? 0.0 : lcs / static_cast<double>(candidate.size());
  s.recall = reference.empty() ? 0.0 : lcs / static_cast<double>(reference.size());
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

PrfScore rouge(std::string_view candidate, std::string_view reference, RougeVariant variant) {
  return rouge_tokens(text::tokenize(candidate), text::tokenize(reference), variant);
}

double bleu_tokens(std::span<const std::string> candidate,
                   std::span<const std::string> reference, int max_n) {
  if (max_n < 1) throw ContractError("bleu requires max_n >= 1");
  if (candidate.empty() || reference.empty()) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    if (candidate.size() < static_cast<size_t>(n)) break;
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    long long total = static_cast<long long>(candidate.size()) - n + 1;
    long long clipped = 0;
    for (const auto& [key, count] : cand) {
      auto it = ref.find(key);
      if (it != ref.end()) clipped += std::min(count, it->second);
    }
    double p = clipped == 0 ? kEpsilon : static_cast<double>(clipped) / static_cast<double>(total);
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  double geo_mean = std::exp(log_sum / orders);
  double c = static_cast<double>(candidate.size());
  double r = static_cast<double>(reference.size());
  double bp = std::min(1.0, std::exp(1.0 - r / c));
  return bp * geo_mean;
}

double bleu(std::string_view candidate, std::string_view reference, int max_n) {
  return bleu_tokens(text::tokenize(candidate), text::tokenize(reference), max_n);
}

double cosine01(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("embedding dimension mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double cos = (na == 0.0 || nb == 0.0) ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
  cos = std::clamp(cos, -1.0, 1.0);
  return (cos + 1.0) / 2.0;
}

double embed_similarity(const std::string& candidate, const std::string& reference,
                        Gateway& gateway) {
  auto vectors = gateway.embed({candidate, reference});
  return cosine01(vectors[0], vectors[1]);
}

}  // namespace ems
