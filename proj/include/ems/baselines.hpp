#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ems {

class Gateway;

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class RougeVariant { kRouge1, kRouge2, kRougeL };

RougeVariant rouge_variant_from_string(std::string_view name);
std::string to_string(RougeVariant variant);

/// Length of the longest common subsequence of two token sequences.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// ROUGE over pre-tokenized sequences. rouge-1/rouge-2 use n-gram multiset
/// overlap, rouge-l uses LCS length. Empty sides give the affected
/// component 0.
PrfScore rouge_tokens(std::span<const std::string> candidate,
                      std::span<const std::string> reference,
                      RougeVariant variant);

/// ROUGE over raw text through the shared tokenizer.
PrfScore rouge(std::string_view candidate, std::string_view reference,
               RougeVariant variant);

/// BLEU over pre-tokenized sequences: geometric mean of clipped n-gram
/// precisions for n = 1..max_n (orders longer than the candidate are
/// skipped; zero clipped counts contribute epsilon = 1e-9 to the log
/// mean), times brevity penalty min(1, e^(1 - r/c)). Either side empty
/// gives 0.
double bleu_tokens(std::span<const std::string> candidate,
                   std::span<const std::string> reference, int max_n);

/// BLEU over raw text through the shared tokenizer.
double bleu(std::string_view candidate, std::string_view reference, int max_n = 4);

/// Cosine similarity mapped affinely from [-1,1] to [0,1]. Zero-norm
/// vectors are treated as orthogonal.
double cosine01(std::span<const double> a, std::span<const double> b);

/// Whole-text embedding similarity via the gateway's embedding endpoint.
double embed_similarity(const std::string& candidate, const std::string& reference,
                        Gateway& gateway);

}  // namespace ems
