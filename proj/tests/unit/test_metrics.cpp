#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "tpp/metrics.hpp"

using namespace tpp;

namespace {

FeedbackRecord gap_record(double predicted, double best) {
  FeedbackRecord r;
  r.s_predicted = predicted;
  r.s_best = best;
  r.s_feedback = best;
  return r;
}

double ndcg_by_hand(const std::vector<int>& l, std::size_t k) {
  double dcg = 0, idcg = 0;
  std::vector<int> ideal = l;
  std::sort(ideal.rbegin(), ideal.rend());
  for (std::size_t i = 1; i <= k; ++i) {
    dcg += l[i - 1] / std::log2(i + 1.0);
    idcg += ideal[i - 1] / std::log2(i + 1.0);
  }
  return dcg / idcg;
}

}  // namespace

TEST_CASE("regret") {
  const std::vector<FeedbackRecord> optimal{gap_record(1, 1), gap_record(2, 2)};
  CHECK(regret(optimal) == 0.0);
  const std::vector<FeedbackRecord> single{gap_record(0.25, 1.0)};
  CHECK(regret(single) == 0.75);
  const std::vector<FeedbackRecord> three{gap_record(0, 1), gap_record(0, 2), gap_record(1, 4)};
  CHECK(regret(three) == doctest::Approx(2.0));
}

TEST_CASE("regret bound") {
  const std::vector<double> none(4, 0.0);
  CHECK(regret_bound(1.0, 1.0, 1.0, none, 4) == doctest::Approx(1.0));
  const std::vector<double> none16(16, 0.0);
  CHECK(regret_bound(1.0, 1.0, 1.0, none16, 16) == doctest::Approx(0.5));
  CHECK(regret_bound(1.0, 1.0, 0.5, none, 4) == doctest::Approx(2.0));
  const std::vector<double> slack{0.1, 0.2, 0.0, 0.1};
  CHECK(regret_bound(2.0, 0.5, 0.4, slack, 4) == doctest::Approx(2 * 2.0 * 0.5 / (0.4 * 2) + 0.4 / (0.4 * 4)));
}

TEST_CASE("feature norm bound") {
  FeatureVector zero{Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(3)};
  CHECK(feature_norm_bound(std::vector<FeatureVector>{zero}) == 0.0);
  FeatureVector one = zero, three = zero;
  one.phi_O[0] = 1.0;
  three.phi_E[2] = 3.0;
  CHECK(feature_norm_bound(std::vector<FeatureVector>{one, three}) == 3.0);

  std::mt19937_64 rng(1);
  std::vector<std::vector<FeatureVector>> sets(4);
  double expected = 0;
  for (auto& set : sets)
    for (int i = 0; i < 7; ++i) {
      FeatureVector f{Eigen::VectorXd::Random(10), Eigen::VectorXd::Random(5)};
      expected = std::max(expected, std::sqrt(f.phi_O.squaredNorm() + f.phi_E.squaredNorm()));
      set.push_back(f);
    }
  CHECK(feature_norm_bound(sets) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("nDCG hand cases") {
  const std::vector<int> ideal{5, 4, 3};
  CHECK(ndcg_at_k(ideal, 3) == 1.0);
  const std::vector<int> swapped{3, 5};
  CHECK(ndcg_at_k(swapped, 2) == doctest::Approx(0.89291).epsilon(1e-5));
  CHECK(std::abs(ndcg_at_k(swapped, 2) - (3 + 5 / std::log2(3.0)) / (5 + 3 / std::log2(3.0))) < 1e-15);
  const std::vector<int> single{2};
  CHECK(ndcg_at_k(single, 1) == 1.0);
  CHECK_THROWS_AS(ndcg_at_k(single, 2), std::domain_error);
  CHECK_THROWS_AS(ndcg_at_k(single, 0), std::domain_error);
  const std::vector<int> zero{0, 3};
  CHECK_THROWS_AS(ndcg_at_k(zero, 1), std::domain_error);
}

TEST_CASE("nDCG equals 1 exactly when the prefix is ideal") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> l(2 + rng() % 8);
    for (auto& v : l) v = 1 + static_cast<int>(rng() % 5);
    const std::size_t k = 1 + rng() % l.size();
    std::vector<int> sorted = l;
    std::sort(sorted.rbegin(), sorted.rend());
    const bool ideal_prefix = std::equal(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(k), sorted.begin());
    const double v = ndcg_at_k(l, k);
    CHECK((v == 1.0) == ideal_prefix);
    CHECK(v <= 1.0);
    CHECK(v > 0.0);
    CHECK(v == doctest::Approx(ndcg_by_hand(l, k)).epsilon(1e-12));
  }
}

TEST_CASE("Likert labels") {
  const std::vector<double> spaced{0.1, 0.5, 0.2, 0.4, 0.3};
  CHECK(likert_labels(spaced) == std::vector<int>{1, 5, 2, 4, 3});
  const std::vector<double> flat(7, 0.3);
  CHECK(likert_labels(flat) == std::vector<int>(7, 1));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> u(20);
    for (auto& v : u) v = g(rng);
    // Sort and bucket: position p in ascending order lands in quintile p / 4.
    std::vector<std::size_t> idx(20);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    std::vector<int> expected(20);
    for (std::size_t p = 0; p < 20; ++p) expected[idx[p]] = 1 + static_cast<int>(p / 4);
    CHECK(likert_labels(u) == expected);
  }
}
