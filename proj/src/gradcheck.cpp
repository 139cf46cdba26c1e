#include "riplm/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "riplm/learner.hpp"
#include "riplm/random.hpp"

namespace riplm {

std::vector<double> finite_difference_gradient(std::span<const double> scores,
                                               Temperature tau,
                                               const AwakeSet& awake,
                                               std::span<const double> losses,
                                               double step) {
  std::vector<double> s(scores.begin(), scores.end());
  auto value = [&] {
    return expected_loss(restricted_softmax(s, tau, awake), losses);
  };
  std::vector<double> fd(awake.size());
  for (std::size_t k = 0; k < awake.size(); ++k) {
    const ExpertIndex i = awake[k];
    const double orig = s[i];
    s[i] = orig + step;
    const double up = value();
    s[i] = orig - step;
    const double down = value();
    s[i] = orig;
    fd[k] = (up - down) / (2.0 * step);
  }
  return fd;
}

GradcheckSummary gradient_check_sweep(std::size_t instances, std::uint64_t seed,
                                      std::size_t max_experts, double tau_lo,
                                      double tau_hi) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng = make_stream(seed, {0x67726164ULL});
  GradcheckSummary out;
  out.instances = instances;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const std::size_t n = 2 + uniform_index(rng, max_experts - 1);
    std::vector<ExpertIndex> members;
    while (members.empty())
      for (std::size_t i = 0; i < n; ++i)
        if (uniform01(rng) < 0.7) members.push_back(i);
    const AwakeSet awake(std::move(members), n);
    const Temperature tau(uniform(rng, tau_lo, tau_hi));
    std::vector<double> s(n);
    for (double& v : s) v = tau.value() * uniform(rng, -2.0, 2.0);
    std::vector<double> losses(awake.size());
    for (double& l : losses) l = uniform01(rng);

    const auto g =
        surrogate_gradient(restricted_softmax(s, tau, awake), losses, tau);
    const auto fd = finite_difference_gradient(s, tau, awake, losses);
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      err = std::max(err, std::abs(fd[k] - g[k]));
      scale = std::max(scale, std::abs(g[k]));
    }
    const double rel = scale > 0.0 ? err / scale : err;
    if (rel > out.max_relative_error) {
      out.max_relative_error = rel;
      out.worst_instance = inst;
    }
  }
  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

}  // namespace riplm
