#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "riplm/pl_core.hpp"

namespace riplm {

/// Central differences of s -> <restricted_softmax(s, tau, awake), losses>
/// in each awake coordinate; aligned with awake.members().
std::vector<double> finite_difference_gradient(std::span<const double> scores,
                                               Temperature tau,
                                               const AwakeSet& awake,
                                               std::span<const double> losses,
                                               double step = 1e-6);

struct GradcheckSummary {
  std::size_t instances = 0;
  /// max over instances of |fd - g|_inf / |g|_inf (0 when both vanish).
  double max_relative_error = 0.0;
  std::size_t worst_instance = 0;
  double seconds = 0.0;
};

/// Random instances with N in [2, max_experts], a random nonempty awake set,
/// tau uniform in [tau_lo, tau_hi], logits s_i / tau uniform in [-2, 2] and
/// losses uniform in [0, 1].
GradcheckSummary gradient_check_sweep(std::size_t instances, std::uint64_t seed,
                                      std::size_t max_experts = 16,
                                      double tau_lo = 0.05, double tau_hi = 5.0);

}  // namespace riplm
