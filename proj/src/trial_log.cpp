#include "riplm/trial_log.hpp"

namespace riplm {

LossHistory TrialLog::history() const {
  LossHistory h{n_experts, {}};
  h.rounds.reserve(rounds.size());
  for (const RoundRecord& r : rounds) h.rounds.push_back(r.round);
  return h;
}

std::vector<Distribution> TrialLog::played() const {
  std::vector<Distribution> out;
  out.reserve(rounds.size());
  for (const RoundRecord& r : rounds) out.push_back(r.played);
  return out;
}

}  // namespace riplm
