#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "riplm/pl_core.hpp"

using namespace riplm;

namespace {

void expect_probs(const Distribution& p, const std::vector<double>& want,
                  double tol = 1e-12) {
  ASSERT_EQ(p.size(), want.size());
  for (std::size_t k = 0; k < want.size(); ++k)
    EXPECT_NEAR(p.probs()[k], want[k], tol) << "coordinate " << k;
}

double sum(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

// --- types ------------------------------------------------------------------

TEST(AwakeSet, SortsAndValidates) {
  AwakeSet a({3, 0, 2}, 4);
  EXPECT_EQ(std::vector<ExpertIndex>(a.members().begin(), a.members().end()),
            (std::vector<ExpertIndex>{0, 2, 3}));
  EXPECT_TRUE(a.contains(2));
  EXPECT_FALSE(a.contains(1));
  EXPECT_EQ(a.position(3), 2u);
  EXPECT_FALSE(a.position(1).has_value());
  EXPECT_THROW(AwakeSet({}, 3), std::invalid_argument);
  EXPECT_THROW(AwakeSet({1, 1}, 3), std::invalid_argument);
  EXPECT_THROW(AwakeSet({3}, 3), std::invalid_argument);
}

TEST(Temperature, RejectsNonPositiveAndClampsToFloor) {
  EXPECT_THROW(Temperature(0.0), std::invalid_argument);
  EXPECT_THROW(Temperature(-1.0), std::invalid_argument);
  EXPECT_THROW(Temperature(0.01, 0.05), std::invalid_argument);
  Temperature t(1.0, 0.05);
  EXPECT_EQ(t.with_value(0.001).value(), 0.05);
  EXPECT_EQ(t.with_value(2.0).value(), 2.0);
}

TEST(Distribution, RejectsBadEntries) {
  EXPECT_THROW(Distribution(AwakeSet::all(2), {0.5}), std::invalid_argument);
  EXPECT_THROW(Distribution(AwakeSet::all(2), {-0.1, 1.1}), std::invalid_argument);
  EXPECT_THROW(Distribution(AwakeSet::all(2), {0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(Distribution(AwakeSet::all(2), {NAN, 1.0}), std::invalid_argument);
}

TEST(Distribution, OffSupportMassIsZero) {
  Distribution d(AwakeSet({1, 3}, 4), {0.25, 0.75});
  EXPECT_EQ(d(0), 0.0);
  EXPECT_EQ(d(1), 0.25);
  EXPECT_EQ(d.dense(), (std::vector<double>{0, 0.25, 0, 0.75}));
}

TEST(Ranking, RejectsNonPermutation) {
  EXPECT_THROW(Ranking({0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(Ranking({0, 3}), std::invalid_argument);
  Ranking r({2, 0, 1});
  EXPECT_EQ(r.rank_of(2), 0u);
  EXPECT_EQ(r.top(AwakeSet({0, 1}, 3)), 0u);
}

// --- restricted_softmax -------------------------------------------------------

TEST(RestrictedSoftmax, SymmetricScoresGiveUniform) {
  const std::vector<double> s{0, 0, 0};
  expect_probs(restricted_softmax(s, Temperature(1), AwakeSet::all(3)),
               {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

TEST(RestrictedSoftmax, SingletonSupport) {
  const std::vector<double> s{-4.2, 17.0};
  const auto p = restricted_softmax(s, Temperature(1), AwakeSet({0}, 2));
  EXPECT_EQ(p(0), 1.0);
  EXPECT_EQ(p(1), 0.0);
}

TEST(RestrictedSoftmax, MatchesLongDoubleOracle) {
  const std::vector<double> s{0.7, 0.0};
  const auto p = restricted_softmax(s, Temperature(1), AwakeSet::all(2));
  const auto want = oracle::softmax(s, 1.0, {0, 1});
  EXPECT_NEAR(p.probs()[0], static_cast<double>(want[0]), 1e-15);
  EXPECT_NEAR(p.probs()[1], static_cast<double>(want[1]), 1e-15);
  // closed form as a second opinion
  EXPECT_NEAR(p.probs()[0], std::exp(0.7) / (std::exp(0.7) + 1), 1e-15);
}

TEST(RestrictedSoftmax, Errors) {
  const std::vector<double> s{1.0, INFINITY};
  EXPECT_THROW(restricted_softmax(s, Temperature(1), AwakeSet::all(2)),
               std::invalid_argument);
  const std::vector<double> short_s{1.0};
  EXPECT_THROW(restricted_softmax(short_s, Temperature(1), AwakeSet::all(2)),
               std::invalid_argument);
}

TEST(RestrictedSoftmax, NoOverflowAtExtremeRatios) {
  const std::vector<double> s{1e6, -1e6, 1e6 - 1};
  const auto p = restricted_softmax(s, Temperature(1), AwakeSet::all(3));
  for (double v : p.probs()) EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(p(0), 1 / (1 + std::exp(-1.0)), 1e-15);
  EXPECT_EQ(p(1), 0.0);
}

TEST(RestrictedSoftmax, PropertySumsToOneAndMatchesOracle) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> U(-50, 50), T(0.05, 5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + g() % 32;
    std::vector<double> s(n);
    for (auto& v : s) v = U(g);
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < n; ++i)
      if (g() % 2) m.push_back(i);
    if (m.empty()) m.push_back(g() % n);
    const double tau = T(g);
    const auto p = restricted_softmax(s, Temperature(tau), AwakeSet(m, n));
    EXPECT_NEAR(sum(p.probs()), 1.0, 1e-12);
    const auto want = oracle::softmax(s, tau, m);
    for (std::size_t k = 0; k < m.size(); ++k)
      ASSERT_NEAR(p.probs()[k], static_cast<double>(want[k]), 1e-13);
  }
}

// Dyadic scores and integer shifts keep every max-shifted logit exact, so the
// result must not change by a single bit.
TEST(RestrictedSoftmax, ShiftInvarianceIsExact) {
  std::mt19937_64 g(12);
  std::uniform_int_distribution<int> num(-4096, 4096), shift(-1000000, 1000000);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + g() % 10;
    std::vector<double> s(n);
    for (auto& v : s) v = num(g) / 64.0;
    const double c = shift(g);
    std::vector<double> sc(s);
    for (auto& v : sc) v += c;
    const AwakeSet all = AwakeSet::all(n);
    for (double tau : {1.0, 0.5, 0.25, 2.0}) {
      const auto a = restricted_softmax(s, Temperature(tau), all);
      const auto b = restricted_softmax(sc, Temperature(tau), all);
      ASSERT_EQ(a, b) << "trial " << trial << " tau " << tau << " c " << c;
    }
  }
}

// --- scores_from_distribution ---------------------------------------------------

TEST(ScoresFromDistribution, Uniform) {
  const auto s =
      scores_from_distribution(Distribution::uniform(AwakeSet::all(3)), Temperature(1));
  for (double v : s) EXPECT_NEAR(v, std::log(1.0 / 3), 1e-15);
}

TEST(ScoresFromDistribution, TemperatureAndShift) {
  const Distribution u(AwakeSet::all(2), {2.0 / 3, 1.0 / 3});
  const auto s = scores_from_distribution(u, Temperature(2), 5.0);
  EXPECT_NEAR(s[0], 2 * std::log(2.0 / 3) + 5, 1e-14);
  EXPECT_NEAR(s[1], 2 * std::log(1.0 / 3) + 5, 1e-14);
  expect_probs(restricted_softmax(s, Temperature(2), u.support()), {2.0 / 3, 1.0 / 3});
}

TEST(ScoresFromDistribution, ZeroMassPointsToSmoothing) {
  const Distribution u(AwakeSet::all(2), {1.0, 0.0});
  try {
    scores_from_distribution(u, Temperature(1));
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("smooth_comparator"), std::string::npos);
  }
}

TEST(ScoresFromDistribution, RoundTripProperty) {
  std::mt19937_64 g(13);
  std::uniform_real_distribution<double> T(0.05, 5), C(-100, 100);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + g() % 32;
    const Distribution u(AwakeSet::all(n), oracle::random_simplex(g, n));
    const Temperature tau(T(g));
    for (int k = 0; k < 3; ++k) {
      const auto s = scores_from_distribution(u, tau, C(g));
      const auto back = restricted_softmax(s, tau, u.support());
      for (std::size_t i = 0; i < n; ++i)
        ASSERT_NEAR(back.probs()[i], u.probs()[i], 1e-12);
    }
  }
}

// --- rank-induced distributions -----------------------------------------------------

TEST(RankInduced, GeometricWeights) {
  expect_probs(rank_induced_distribution(Ranking::identity(3), 0.5, AwakeSet::all(3)),
               {4.0 / 7, 2.0 / 7, 1.0 / 7});
}

TEST(RankInduced, RestrictionRenormalizes) {
  const auto p = rank_induced_distribution(Ranking::identity(3), 0.5, AwakeSet({1, 2}, 3));
  expect_probs(p, {2.0 / 3, 1.0 / 3});
  EXPECT_EQ(p(0), 0.0);
}

TEST(RankInduced, SingletonAndFollowsRanking) {
  expect_probs(rank_induced_distribution(Ranking::identity(4), 0.3, AwakeSet({2}, 4)), {1});
  // sigma = (2,0,1): expert 2 first, then 0, then 1
  const auto p = rank_induced_distribution(Ranking({2, 0, 1}), 0.5, AwakeSet::all(3));
  EXPECT_NEAR(p(2), 4.0 / 7, 1e-15);
  EXPECT_NEAR(p(0), 2.0 / 7, 1e-15);
  EXPECT_NEAR(p(1), 1.0 / 7, 1e-15);
}

TEST(RankInduced, EpsOutsideOpenInterval) {
  for (double eps : {0.0, 1.0, -0.5, 2.0})
    EXPECT_THROW(rank_induced_distribution(Ranking::identity(2), eps, AwakeSet::all(2)),
                 std::invalid_argument);
}

TEST(RankInduced, TopMassIncreasesMonotonicallyAsEpsShrinks) {
  std::mt19937_64 g(14);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + g() % 8;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), g);
    const Ranking sigma(order);
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < n; ++i)
      if (g() % 3) m.push_back(i);
    if (m.empty()) m.push_back(0);
    const AwakeSet awake(m, n);
    double prev = 0.0;
    for (double eps = 1e-1; eps >= 1e-8; eps /= 10) {
      const double top = rank_induced_distribution(sigma, eps, awake)(sigma.top(awake));
      ASSERT_GE(top, prev);
      prev = top;
    }
    EXPECT_GT(prev, 1 - 1e-7);
  }
}

TEST(PlAtTemperature, EquivalentToRankInduced) {
  const double tau = 1 / std::log(2.0);
  expect_probs(pl_from_ranking_at_temperature(Ranking::identity(3), Temperature(tau),
                                              AwakeSet::all(3)),
               {4.0 / 7, 2.0 / 7, 1.0 / 7});
  std::mt19937_64 g(15);
  std::uniform_real_distribution<double> T(0.05, 5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + g() % 10;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), g);
    const double t = T(g);
    const auto a = pl_from_ranking_at_temperature(Ranking(order), Temperature(t),
                                                  AwakeSet::all(n));
    const auto b = rank_induced_distribution(Ranking(order), std::exp(-1 / t),
                                             AwakeSet::all(n));
    for (std::size_t k = 0; k < n; ++k) ASSERT_NEAR(a.probs()[k], b.probs()[k], 1e-12);
  }
}

TEST(PlAtTemperature, TopMassAtLowTemperature) {
  for (double t : {0.05, 0.1, 0.2}) {
    const double e = std::exp(-1 / t);
    const auto p = pl_from_ranking_at_temperature(Ranking::identity(8), Temperature(t),
                                                  AwakeSet::all(8));
    EXPECT_GE(p(0), 1 - e / (1 - e) - 1e-15);  // both sides round near 1
  }
  expect_probs(pl_from_ranking_at_temperature(Ranking::identity(3), Temperature(0.3),
                                              AwakeSet({1}, 3)),
               {1});
}

// --- comparators -------------------------------------------------------------------

TEST(RestrictComparator, Examples) {
  expect_probs(restrict_comparator(Distribution::uniform(AwakeSet::all(4)),
                                   AwakeSet({0, 1}, 4)),
               {0.5, 0.5});
  const Distribution u(AwakeSet::all(3), {0.5, 0.3, 0.2});
  expect_probs(restrict_comparator(u, AwakeSet({1, 2}, 3)), {0.6, 0.4});
  expect_probs(restrict_comparator(u, AwakeSet::all(3)), {0.5, 0.3, 0.2});
}

TEST(RestrictComparator, ZeroMassOnAwakeSet) {
  const Distribution u(AwakeSet::all(3), {1.0, 0.0, 0.0});
  try {
    restrict_comparator(u, AwakeSet({1, 2}, 3));
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("smooth_comparator"), std::string::npos);
  }
}

TEST(SmoothComparator, Examples) {
  const Distribution u(AwakeSet::all(2), {1.0, 0.0});
  expect_probs(smooth_comparator(u, AwakeSet::all(2), 0.1), {0.95, 0.05});
  const auto uni = Distribution::uniform(AwakeSet::all(5));
  expect_probs(smooth_comparator(uni, AwakeSet::all(5), 0.3), {0.2, 0.2, 0.2, 0.2, 0.2});
  // no mass on the awake set: fall back to uniform there
  expect_probs(smooth_comparator(u, AwakeSet({1}, 2), 0.2), {1});
  EXPECT_THROW(smooth_comparator(u, AwakeSet::all(2), 0.0), std::invalid_argument);
}

TEST(SmoothComparator, L1WithinTwiceEpsAndStrictlyPositive) {
  std::mt19937_64 g(16);
  std::uniform_real_distribution<double> E(1e-4, 0.999);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + g() % 12;
    auto w = oracle::random_simplex(g, n);
    w[g() % n] = 0.0;  // zeros are the point of smoothing
    const Distribution u(AwakeSet::all(n), w);
    const AwakeSet awake = AwakeSet::all(n);
    const double eps = E(g);
    const auto base = restrict_comparator(u, awake);
    const auto sm = smooth_comparator(u, awake, eps);
    double l1 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      ASSERT_GT(sm.probs()[k], 0.0);
      l1 += std::abs(sm.probs()[k] - base.probs()[k]);
    }
    ASSERT_LE(l1, 2 * eps + 1e-15);
  }
}

TEST(ExpectedLoss, AlignedWithSupport) {
  const Distribution p(AwakeSet({0, 2}, 3), {0.25, 0.75});
  const std::vector<double> l{1.0, 0.0};
  EXPECT_EQ(expected_loss(p, l), 0.25);
  const std::vector<double> bad{1.0, 0.0, 0.5};
  EXPECT_THROW(expected_loss(p, bad), std::invalid_argument);
}
