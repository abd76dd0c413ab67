#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ems/types.hpp"

namespace ems {

enum class PerturbationKind {
  kDeletePoints,
  kDuplicatePoints,
  kCorruptNumbers,
  kShufflePoints,
};

PerturbationKind perturbation_from_string(const std::string& name);
std::string to_string(PerturbationKind kind);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kDeletePoints;
  double intensity = 0.5;  // fraction in (0,1]
  std::uint64_t seed = 0;
};

/// Number of points removed by delete-points at a given intensity:
/// ceil(intensity * n) nudged against float error, floored at 1 and capped
/// at n - 1 so at least one point survives.
int delete_count(int n_points, double intensity);

/// Apply a perturbation to an ordered list of points. Deterministic in
/// (points, spec). Empty point lists and intensities outside (0,1] are
/// ContractErrors.
SaliencyPoints perturb_points(const SaliencyPoints& points, const PerturbationSpec& spec);

/// Perturb free text by splitting into paragraphs, treating each paragraph
/// as one point, and re-joining with blank lines.
std::string perturb_text(const std::string& text, const PerturbationSpec& spec);

/// Rewrite every digit in the string through a seeded permutation of 0-9
/// with no fixed points, so every number present changes value.
std::string corrupt_numbers(const std::string& text, std::uint64_t seed);

}  // namespace ems
