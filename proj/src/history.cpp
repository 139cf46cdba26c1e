#include "riplm/history.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace riplm {

void validate_losses(const AwakeSet& awake, std::span<const double> losses) {
  if (losses.size() != awake.size())
    throw std::invalid_argument(
        "loss vector has " + std::to_string(losses.size()) +
        " entries for an awake set of size " + std::to_string(awake.size()));
  for (std::size_t k = 0; k < losses.size(); ++k) {
    const double l = losses[k];
    if (!(l >= 0.0 && l <= 1.0))
      throw std::invalid_argument("loss of expert " + std::to_string(awake[k]) +
                                  " outside [0,1]");
  }
}

void LossHistory::validate() const {
  if (n_experts == 0) throw std::invalid_argument("history has no experts");
  for (std::size_t t = 0; t < rounds.size(); ++t) {
    const Round& r = rounds[t];
    if (r.awake.n_total() != n_experts)
      throw std::invalid_argument("round " + std::to_string(t + 1) +
                                  ": awake set built for a different N");
    try {
      validate_losses(r.awake, r.losses);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("round " + std::to_string(t + 1) + ": " +
                                  e.what());
    }
  }
}

}  // namespace riplm
