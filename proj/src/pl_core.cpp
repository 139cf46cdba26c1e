#include "riplm/pl_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace riplm {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument(what);
}

}  // namespace

// ---------------------------------------------------------------------------
// AwakeSet

AwakeSet::AwakeSet(std::vector<ExpertIndex> members, std::size_t n_total)
    : members_(std::move(members)), n_total_(n_total) {
  if (members_.empty()) fail("awake set must be nonempty");
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    fail("awake set contains duplicate expert indices");
  if (members_.back() >= n_total_)
    fail("awake expert index " + std::to_string(members_.back()) +
         " out of range for N=" + std::to_string(n_total_));
}

AwakeSet AwakeSet::all(std::size_t n_total) {
  std::vector<ExpertIndex> m(n_total);
  std::iota(m.begin(), m.end(), ExpertIndex{0});
  return AwakeSet(std::move(m), n_total);
}

bool AwakeSet::contains(ExpertIndex i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

std::optional<std::size_t> AwakeSet::position(ExpertIndex i) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), i);
  if (it == members_.end() || *it != i) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

// ---------------------------------------------------------------------------
// Temperature

Temperature::Temperature(double tau, double tau_min)
    : tau_(tau), tau_min_(tau_min) {
  if (!(tau_min_ > 0.0) || !std::isfinite(tau_min_))
    fail("temperature floor must be positive and finite");
  if (!(tau_ >= tau_min_) || !std::isfinite(tau_))
    fail("temperature must be finite and at least its floor");
}

Temperature Temperature::with_value(double tau) const {
  return Temperature(std::max(tau, tau_min_), tau_min_);
}

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(AwakeSet support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (probs_.size() != support_.size())
    fail("distribution has " + std::to_string(probs_.size()) +
         " entries for a support of size " + std::to_string(support_.size()));
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0)
      fail("distribution entries must be finite and nonnegative");
    total += p;
  }
  if (!(total > 0.0)) fail("distribution has zero total mass");
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    for (double& p : probs_) p /= total;
  }
}

Distribution Distribution::uniform(AwakeSet support) {
  const std::size_t k = support.size();
  return Distribution(std::move(support),
                      std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Distribution Distribution::point_mass(AwakeSet support, ExpertIndex expert) {
  auto pos = support.position(expert);
  if (!pos) fail("point mass on an expert outside the support");
  std::vector<double> p(support.size(), 0.0);
  p[*pos] = 1.0;
  return Distribution(std::move(support), std::move(p));
}

double Distribution::operator()(ExpertIndex i) const {
  auto pos = support_.position(i);
  return pos ? probs_[*pos] : 0.0;
}

double Distribution::mass(const AwakeSet& set) const {
  double m = 0.0;
  for (ExpertIndex i : set.members()) m += (*this)(i);
  return m;
}

std::vector<double> Distribution::dense() const {
  std::vector<double> d(support_.n_total(), 0.0);
  for (std::size_t k = 0; k < probs_.size(); ++k) d[support_[k]] = probs_[k];
  return d;
}

// ---------------------------------------------------------------------------
// Ranking

Ranking::Ranking(std::vector<ExpertIndex> order)
    : order_(std::move(order)), rank_(order_.size(), order_.size()) {
  if (order_.empty()) fail("ranking must be nonempty");
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const ExpertIndex e = order_[k];
    if (e >= order_.size() || rank_[e] != order_.size())
      fail("ranking is not a permutation of [0, N)");
    rank_[e] = k;
  }
}

Ranking Ranking::identity(std::size_t n) {
  std::vector<ExpertIndex> o(n);
  std::iota(o.begin(), o.end(), ExpertIndex{0});
  return Ranking(std::move(o));
}

ExpertIndex Ranking::top(const AwakeSet& awake) const {
  if (awake.n_total() != order_.size())
    fail("ranking and awake set disagree on N");
  return *std::min_element(
      awake.members().begin(), awake.members().end(),
      [&](ExpertIndex a, ExpertIndex b) { return rank_[a] < rank_[b]; });
}

std::vector<ExpertIndex> Ranking::order_within(const AwakeSet& awake) const {
  if (awake.n_total() != order_.size())
    fail("ranking and awake set disagree on N");
  std::vector<ExpertIndex> out(awake.members().begin(), awake.members().end());
  std::sort(out.begin(), out.end(), [&](ExpertIndex a, ExpertIndex b) {
    return rank_[a] < rank_[b];
  });
  return out;
}

// ---------------------------------------------------------------------------
// Maps

Distribution restricted_softmax(std::span<const double> scores, Temperature tau,
                                const AwakeSet& awake) {
  if (scores.size() != awake.n_total())
    fail("score vector length does not match N");
  for (double s : scores)
    if (!std::isfinite(s)) fail("non-finite score");

  double s_max = scores[awake[0]];
  for (ExpertIndex i : awake.members()) s_max = std::max(s_max, scores[i]);

  // Differences are taken before dividing by tau so that adding the same
  // constant to every score leaves the result bit-identical whenever the
  // additions themselves are exact.
  const double t = tau.value();
  std::vector<double> p(awake.size());
  double z = 0.0;
  for (std::size_t k = 0; k < awake.size(); ++k) {
    p[k] = std::exp((scores[awake[k]] - s_max) / t);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return Distribution(awake, std::move(p));
}

ScoreVector scores_from_distribution(const Distribution& u, Temperature tau,
                                     double shift) {
  if (!std::isfinite(shift)) fail("shift must be finite");
  const AwakeSet& sup = u.support();
  ScoreVector s(sup.n_total(), shift);
  const auto probs = u.probs();
  for (std::size_t k = 0; k < sup.size(); ++k) {
    if (!(probs[k] > 0.0))
      fail("comparator has zero mass on supported expert " +
           std::to_string(sup[k]) + "; apply smooth_comparator first");
    s[sup[k]] = tau.value() * std::log(probs[k]) + shift;
  }
  return s;
}

Distribution rank_induced_distribution(const Ranking& sigma, double eps,
                                       const AwakeSet& awake) {
  if (!(eps > 0.0 && eps < 1.0)) fail("eps must lie in (0, 1)");
  const auto order = sigma.order_within(awake);
  std::vector<double> w(awake.size());
  double weight = 1.0;
  for (ExpertIndex e : order) {
    w[*awake.position(e)] = weight;
    weight *= eps;
  }
  return Distribution(awake, std::move(w));
}

Distribution pl_from_ranking_at_temperature(const Ranking& sigma,
                                            Temperature tau,
                                            const AwakeSet& awake) {
  const auto order = sigma.order_within(awake);
  std::vector<double> w(awake.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    w[*awake.position(order[k])] =
        std::exp(-static_cast<double>(k) / tau.value());
  return Distribution(awake, std::move(w));
}

Distribution restrict_comparator(const Distribution& u, const AwakeSet& awake) {
  if (u.support().n_total() != awake.n_total())
    fail("comparator and awake set disagree on N");
  std::vector<double> w(awake.size());
  double m = 0.0;
  for (std::size_t k = 0; k < awake.size(); ++k) {
    w[k] = u(awake[k]);
    m += w[k];
  }
  if (!(m > 0.0))
    fail("comparator has zero mass on the awake set; apply smooth_comparator");
  for (double& v : w) v /= m;
  return Distribution(awake, std::move(w));
}

Distribution smooth_comparator(const Distribution& u, const AwakeSet& awake,
                               double eps_mix) {
  if (!(eps_mix > 0.0 && eps_mix < 1.0)) fail("eps_mix must lie in (0, 1)");
  const Distribution base = u.mass(awake) > 0.0
                                ? restrict_comparator(u, awake)
                                : Distribution::uniform(awake);
  const double unif = 1.0 / static_cast<double>(awake.size());
  std::vector<double> w(awake.size());
  const auto b = base.probs();
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = (1.0 - eps_mix) * b[k] + eps_mix * unif;
  return Distribution(awake, std::move(w));
}

double expected_loss(const Distribution& p, std::span<const double> losses) {
  if (losses.size() != p.size())
    fail("loss vector is not aligned with the distribution's support");
  const auto probs = p.probs();
  double m = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) m += probs[k] * losses[k];
  return m;
}

}  // namespace riplm
