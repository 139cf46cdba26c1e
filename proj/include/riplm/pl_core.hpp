#pragma once

// Restricted-softmax / Plackett-Luce primitives over a set of N experts.
//
// Everything here is a pure function of its arguments. Vectors indexed by
// expert (scores, comparators over [N]) have length N; per-round vectors
// (probabilities, losses) are aligned with the ascending member order of an
// AwakeSet.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace riplm {

using ExpertIndex = std::size_t;
using ScoreVector = std::vector<double>;

/// Absolute tolerance on the total mass of a Distribution.
inline constexpr double kNormalizationTolerance = 1e-12;

/// Nonempty subset of [0, n_total), stored sorted ascending.
class AwakeSet {
 public:
  /// Members may be given in any order; duplicates, out-of-range indices
  /// and an empty list are rejected with std::invalid_argument.
  AwakeSet(std::vector<ExpertIndex> members, std::size_t n_total);

  static AwakeSet all(std::size_t n_total);

  std::span<const ExpertIndex> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  std::size_t n_total() const { return n_total_; }
  ExpertIndex operator[](std::size_t k) const { return members_[k]; }

  bool contains(ExpertIndex i) const;
  /// Position of expert i within members(), if awake.
  std::optional<std::size_t> position(ExpertIndex i) const;

  bool operator==(const AwakeSet&) const = default;

 private:
  std::vector<ExpertIndex> members_;
  std::size_t n_total_;
};

/// Softmax temperature with its floor; tau >= tau_min > 0.
class Temperature {
 public:
  explicit Temperature(double tau) : Temperature(tau, tau) {}
  Temperature(double tau, double tau_min);

  double value() const { return tau_; }
  double floor() const { return tau_min_; }

  /// Same floor, new value clamped to it.
  Temperature with_value(double tau) const;

  bool operator==(const Temperature&) const = default;

 private:
  double tau_;
  double tau_min_;
};

/// Probability vector supported on an AwakeSet.
class Distribution {
 public:
  /// probs are aligned with support.members(). Entries must be finite and
  /// nonnegative with positive total; the vector is renormalized when its
  /// total drifts from 1 by more than kNormalizationTolerance.
  Distribution(AwakeSet support, std::vector<double> probs);

  static Distribution uniform(AwakeSet support);
  static Distribution point_mass(AwakeSet support, ExpertIndex expert);

  const AwakeSet& support() const { return support_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  /// Mass on expert i (zero outside the support).
  double operator()(ExpertIndex i) const;
  /// Total mass on the experts of `set`.
  double mass(const AwakeSet& set) const;
  /// Length-N dense vector, zero off-support.
  std::vector<double> dense() const;

  bool operator==(const Distribution&) const = default;

 private:
  AwakeSet support_;
  std::vector<double> probs_;
};

/// A permutation of [0, N); sigma[k] is the expert in rank position k.
class Ranking {
 public:
  explicit Ranking(std::vector<ExpertIndex> order);
  static Ranking identity(std::size_t n);

  std::span<const ExpertIndex> order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  ExpertIndex operator[](std::size_t k) const { return order_[k]; }
  /// Rank position (0 = top) of expert i.
  std::size_t rank_of(ExpertIndex i) const { return rank_[i]; }

  /// Highest-ranked member of `awake`.
  ExpertIndex top(const AwakeSet& awake) const;
  /// Members of `awake` sorted by rank, best first.
  std::vector<ExpertIndex> order_within(const AwakeSet& awake) const;

  bool operator==(const Ranking& other) const { return order_ == other.order_; }
  auto operator<=>(const Ranking& other) const { return order_ <=> other.order_; }

 private:
  std::vector<ExpertIndex> order_;
  std::vector<std::size_t> rank_;
};

/// p(i) proportional to exp(s_i / tau) on `awake`, zero elsewhere.
/// Max-shifted so logits of any magnitude are safe.
Distribution restricted_softmax(std::span<const double> scores, Temperature tau,
                                const AwakeSet& awake);

/// Inverse of restricted_softmax on u's support: s_i = tau * log u_i + shift.
/// Off-support entries are set to `shift`; they do not affect the forward map
/// restricted to u.support(). Throws if any supported entry of u is zero.
ScoreVector scores_from_distribution(const Distribution& u, Temperature tau,
                                     double shift = 0.0);

/// Geometric rank weights (1, eps, eps^2, ...) in sigma order over the awake
/// experts, normalized. Requires 0 < eps < 1.
Distribution rank_induced_distribution(const Ranking& sigma, double eps,
                                       const AwakeSet& awake);

/// Rank-k weight proportional to exp(-(k-1)/tau); the eps = exp(-1/tau)
/// member of the rank-induced family.
Distribution pl_from_ranking_at_temperature(const Ranking& sigma,
                                            Temperature tau,
                                            const AwakeSet& awake);

/// u(i) 1{i in awake} / u(awake). Throws if u(awake) == 0.
Distribution restrict_comparator(const Distribution& u, const AwakeSet& awake);

/// (1 - eps_mix) * restrict(u, awake) + eps_mix * Unif(awake).
/// When u puts no mass on `awake` the restriction is taken to be uniform.
Distribution smooth_comparator(const Distribution& u, const AwakeSet& awake,
                               double eps_mix);

/// <p, losses> with losses aligned to p.support().
double expected_loss(const Distribution& p, std::span<const double> losses);

}  // namespace riplm
