#include "ems/perturb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ems/errors.hpp"
#include "ems/text.hpp"

namespace ems {

namespace {

// Unbiased bounded draw. std::uniform_int_distribution is not specified
// bit-for-bit across standard libraries; this is.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % n;
}

void fisher_yates(std::mt19937_64& rng, std::vector<size_t>& values) {
  for (size_t i = values.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(bounded(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

int ceil_count(int n, double intensity) {
  return static_cast<int>(std::ceil(intensity * n - 1e-9));
}

std::array<char, 10> digit_derangement(std::mt19937_64& rng) {
  std::array<char, 10> perm{};
  for (;;) {
    for (int i = 0; i < 10; ++i) perm[static_cast<size_t>(i)] = static_cast<char>('0' + i);
    for (size_t i = 10; i > 1; --i) {
      size_t j = static_cast<size_t>(bounded(rng, i));
      std::swap(perm[i - 1], perm[j]);
    }
    bool fixed_point = false;
    for (int i = 0; i < 10; ++i) {
      if (perm[static_cast<size_t>(i)] == '0' + i) {
        fixed_point = true;
        break;
      }
    }
    if (!fixed_point) return perm;
  }
}

std::string apply_digit_permutation(const std::string& s, const std::array<char, 10>& perm) {
  std::string out = s;
  for (char& c : out) {
    if (c >= '0' && c <= '9') c = perm[static_cast<size_t>(c - '0')];
  }
  return out;
}

bool has_digit(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

PerturbationKind perturbation_from_string(const std::string& name) {
  std::string n = text::to_lower(name);
  if (n == "delete-points" || n == "delete") return PerturbationKind::kDeletePoints;
  if (n == "duplicate-points" || n == "duplicate") return PerturbationKind::kDuplicatePoints;
  if (n == "corrupt-numbers" || n == "corrupt") return PerturbationKind::kCorruptNumbers;
  if (n == "shuffle-points" || n == "shuffle") return PerturbationKind::kShufflePoints;
  throw ConfigError("unknown perturbation kind: " + name);
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kDeletePoints: return "delete-points";
    case PerturbationKind::kDuplicatePoints: return "duplicate-points";
    case PerturbationKind::kCorruptNumbers: return "corrupt-numbers";
    case PerturbationKind::kShufflePoints: return "shuffle-points";
  }
  throw ContractError("invalid perturbation kind");
}

int delete_count(int n_points, double intensity) {
  if (n_points < 1) throw ContractError("delete_count needs at least one point");
  if (n_points == 1) return 0;  // the survivor guard wins
  return std::clamp(ceil_count(n_points, intensity), 1, n_points - 1);
}

SaliencyPoints perturb_points(const SaliencyPoints& points, const PerturbationSpec& spec) {
  if (points.empty()) throw ContractError("cannot perturb an empty point list");
  if (!(spec.intensity > 0.0) || spec.intensity > 1.0) {
    throw ContractError("perturbation intensity must be in (0,1]");
  }
  std::mt19937_64 rng(spec.seed);
  size_t n = points.size();
  switch (spec.kind) {
    case PerturbationKind::kDeletePoints: {
      int k = delete_count(static_cast<int>(n), spec.intensity);
      std::vector<size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      fisher_yates(rng, order);
      std::vector<bool> deleted(n, false);
      for (int i = 0; i < k; ++i) deleted[order[static_cast<size_t>(i)]] = true;
      SaliencyPoints out;
      for (size_t i = 0; i < n; ++i) {
        if (!deleted[i]) out.push_back(points[i]);
      }
      return out;
    }
    case PerturbationKind::kDuplicatePoints: {
      int k = std::clamp(ceil_count(static_cast<int>(n), spec.intensity), 1,
                         static_cast<int>(n));
      SaliencyPoints out = points;
      for (int i = 0; i < k; ++i) out.push_back(points[bounded(rng, n)]);
      return out;
    }
    case PerturbationKind::kCorruptNumbers: {
      int k = std::clamp(ceil_count(static_cast<int>(n), spec.intensity), 1,
                         static_cast<int>(n));
      std::vector<size_t> numeric;
      for (size_t i = 0; i < n; ++i) {
        if (has_digit(points[i])) numeric.push_back(i);
      }
      fisher_yates(rng, numeric);
      auto perm = digit_derangement(rng);
      std::vector<bool> corrupt(n, false);
      for (size_t i = 0; i < numeric.size() && i < static_cast<size_t>(k); ++i) {
        corrupt[numeric[i]] = true;
      }
      SaliencyPoints out;
      out.reserve(n);
      for (size_t i = 0; i < n; ++i) {
        out.push_back(corrupt[i] ? apply_digit_permutation(points[i], perm) : points[i]);
      }
      return out;
    }
    case PerturbationKind::kShufflePoints: {
      std::vector<size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      fisher_yates(rng, order);
      SaliencyPoints out;
      out.reserve(n);
      for (size_t i : order) out.push_back(points[i]);
      return out;
    }
  }
  throw ContractError("invalid perturbation kind");
}

std::string perturb_text(const std::string& text_in, const PerturbationSpec& spec) {
  SaliencyPoints paragraphs = text::split_paragraphs(text_in);
  SaliencyPoints out = perturb_points(paragraphs, spec);
  std::string joined;
  for (size_t i = 0; i < out.size(); ++i) {
    if (i > 0) joined += "\n\n";
    joined += out[i];
  }
  return joined;
}

std::string corrupt_numbers(const std::string& text_in, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return apply_digit_permutation(text_in, digit_derangement(rng));
}

}  // namespace ems
