#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riplm/pl_core.hpp"

namespace riplm {

/// One round of the sleeping-experts game. losses are aligned with
/// awake.members() and lie in [0, 1].
struct Round {
  AwakeSet awake;
  std::vector<double> losses;

  bool operator==(const Round&) const = default;
};

/// (E_t, l_t) for t = 1..T over a fixed pool of experts.
struct LossHistory {
  std::size_t n_experts = 0;
  std::vector<Round> rounds;

  std::size_t horizon() const { return rounds.size(); }
  /// Throws std::invalid_argument naming the first bad round/expert.
  void validate() const;

  bool operator==(const LossHistory&) const = default;
};

/// Throws std::invalid_argument if any loss is outside [0, 1] or the vector
/// is not aligned with `awake`.
void validate_losses(const AwakeSet& awake, std::span<const double> losses);

}  // namespace riplm
