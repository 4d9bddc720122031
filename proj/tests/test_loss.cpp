#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "cdprune/errors.hpp"
#include "cdprune/loss.hpp"
#include "cdprune/scenario.hpp"
#include "oracles.hpp"

using namespace cdprune;

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Matrix random_logits(std::mt19937_64& rng, Eigen::Index n, double scale = 3.0) {
  Matrix m(n, 2);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * (2.0 * unit(rng) - 1.0);
  return m;
}

}  // namespace

TEST_CASE("gamma_from_beta special values") {
  for (long long n : {1LL, 10LL, 10000LL}) CHECK(gamma_from_beta(0.0, n) == 1.0);
  for (double beta : {0.0, 0.3, 0.99997, 1.0 - 1e-9}) CHECK(gamma_from_beta(beta, 1) == 1.0);
  CHECK(gamma_from_beta(0.5, 2) == doctest::Approx(0.5 / 0.75).epsilon(1e-15));
}

TEST_CASE("gamma_from_beta approaches inverse frequency as beta -> 1") {
  const double beta = 1.0 - 1e-9;
  // Series oracle: gamma * n = n (1 - b) / (1 - b^n), with 1 - b^n = -expm1(n log b);
  // values computed at 50 digits and frozen.
  CHECK(gamma_from_beta(beta, 10) * 10 == doctest::Approx(1.0000000045).epsilon(1e-9));
  CHECK(gamma_from_beta(beta, 1000) * 1000 == doctest::Approx(1.0000004995).epsilon(1e-9));
  CHECK(gamma_from_beta(beta, 10000) * 10000 == doctest::Approx(1.0000049995).epsilon(1e-9));
}

TEST_CASE("gamma_from_beta for the large-dataset beta") {
  CHECK(gamma_from_beta(0.99997, 2800) == doctest::Approx(3.7234747843e-4).epsilon(1e-9));
  CHECK(gamma_from_beta(0.99997, 14000) == doctest::Approx(8.7474441515e-5).epsilon(1e-9));
  const auto g = gammas_from_beta(0.99997, 14000, 2800);
  CHECK(g.neg == 1.0);
  CHECK(g.pos == doctest::Approx(3.7234747843e-4 / 8.7474441515e-5).epsilon(1e-8));
}

TEST_CASE("gamma_from_beta rejects bad input") {
  CHECK_THROWS_AS(gamma_from_beta(1.0, 5), DomainError);
  CHECK_THROWS_AS(gamma_from_beta(-0.1, 5), DomainError);
  CHECK_THROWS_AS(gamma_from_beta(0.5, 0), DomainError);
}

TEST_CASE("class_weight_ratio") {
  CHECK(class_weight_ratio(727, 173) == doctest::Approx(4.2023121387));
  CHECK(class_weight_ratio(14000, 2800) == 5.0);
  CHECK(class_weight_ratio(100, 100) == 1.0);
  CHECK_THROWS_AS(class_weight_ratio(0, 3), DomainError);
}

TEST_CASE("weighted_ce on uniform logits is log 2") {
  const Matrix logits = Matrix::Zero(1, 2);
  const Labels y{1};
  const auto term = weighted_ce(logits, y, ClassWeights{1, 1});
  CHECK(term.loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(term.grad_logits(0, 0) == doctest::Approx(0.5));
  CHECK(term.grad_logits(0, 1) == doctest::Approx(-0.5));
}

TEST_CASE("weighted_ce three-sample hand computation") {
  const Matrix logits{{0.0, 0.0}, {1.0, -1.0}, {0.5, 2.0}};
  const Labels y{1, 0, 1};
  // (5 log 2 + log(1 + e^-2) + 5 log(1 + e^-1.5)) / 3, evaluated at high precision.
  const auto term = weighted_ce(logits, y, ClassWeights{1, 5});
  CHECK(term.loss == doctest::Approx(1.533243434585487).epsilon(1e-14));
  CHECK(term.loss == doctest::Approx(oracle::weighted_ce(logits, y, 1, 5)).epsilon(1e-14));
}

TEST_CASE("weighted_ce is linear in the true-class weight") {
  std::mt19937_64 rng(4);
  const Matrix logits = random_logits(rng, 1);
  const Labels y{1};
  const auto a = weighted_ce(logits, y, ClassWeights{1, 2});
  const auto b = weighted_ce(logits, y, ClassWeights{1, 4});
  CHECK(b.loss == doctest::Approx(2 * a.loss).epsilon(1e-15));
  CHECK((b.grad_logits - 2 * a.grad_logits).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("weighted_ce gamma scaling equivariance") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix logits = random_logits(rng, 9);
    const auto y = oracle::random_labels(rng, 9);
    const double t = 0.25 + 4.0 * unit(rng);
    const auto a = weighted_ce(logits, y, ClassWeights{1.5, 3.0});
    const auto b = weighted_ce(logits, y, ClassWeights{1.5 * t, 3.0 * t});
    CHECK(b.loss == doctest::Approx(t * a.loss).epsilon(1e-13));
  }
}

TEST_CASE("weighted_ce is stable for huge logits") {
  const Matrix logits{{1000.0, -1000.0}, {-800.0, 900.0}};
  const Labels y{1, 1};
  const auto term = weighted_ce(logits, y, ClassWeights{1, 1});
  CHECK(std::isfinite(term.loss));
  CHECK(term.loss == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(term.grad_logits.allFinite());
}

TEST_CASE("squared hinge dead zone") {
  const Matrix logits{{-1.0, 0.5}, {2.0, 0.0}};  // s = 1.5 for a positive, -2 for a negative
  const Labels y{1, 0};
  const auto term = squared_hinge_surrogate(logits, y, ClassWeights{5, 5});
  CHECK(term.loss == 0.0);
  CHECK(term.grad_logits.isZero(0.0));
}

TEST_CASE("squared hinge single positive at s = 0") {
  const Matrix logits = Matrix::Zero(1, 2);
  const Labels y{1};
  const auto term = squared_hinge_surrogate(logits, y, ClassWeights{1, 1});
  CHECK(term.loss == 1.0);
  // ds = -2, routed (+) to the positive logit and (-) to the negative logit.
  CHECK(term.grad_logits(0, 1) == -2.0);
  CHECK(term.grad_logits(0, 0) == 2.0);
}

TEST_CASE("squared hinge with zero lambda vanishes") {
  std::mt19937_64 rng(6);
  const Matrix logits = random_logits(rng, 12);
  const auto y = oracle::random_labels(rng, 12);
  const auto term = squared_hinge_surrogate(logits, y, ClassWeights{0, 0});
  CHECK(term.loss == 0.0);
  CHECK(term.grad_logits.isZero(0.0));
}

TEST_CASE("losses are non-negative on random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix logits = random_logits(rng, 1 + static_cast<Eigen::Index>(rng() % 20), 10.0);
    const auto y = oracle::random_labels(rng, static_cast<std::size_t>(logits.rows()) + 1);
    const Labels yy(y.begin(), y.begin() + logits.rows());
    const auto b = combined_loss(logits, yy, ClassWeights{1, 5}, ClassWeights{5, 5});
    CHECK(b.wce >= 0.0);
    CHECK(b.shr >= 0.0);
    CHECK(b.total == b.wce + b.shr);
  }
}

TEST_CASE("red objective is plain cross-entropy bit-for-bit") {
  std::mt19937_64 rng(8);
  const Matrix logits = random_logits(rng, 15);
  const auto y = oracle::random_labels(rng, 15);
  const auto red = preset("red");
  const auto total = combined_loss(logits, y, red.loss, 0);
  const auto ce = weighted_ce(logits, y, ClassWeights{1, 1});
  CHECK(total.total == ce.loss);
  CHECK(total.shr == 0.0);
  CHECK((total.grad_logits.array() == ce.grad_logits.array()).all());
}

TEST_CASE("black preset switches gamma after round 0") {
  const auto black = preset("black");
  CHECK(black.loss.gamma_for_round(0) == ClassWeights{1, 1});
  CHECK(black.loss.gamma_for_round(1) == ClassWeights{1, 5});
  CHECK(black.loss.gamma_for_round(6) == ClassWeights{1, 5});
  const Matrix logits{{0.3, -0.2}};
  const Labels y{1};
  const auto r0 = combined_loss(logits, y, black.loss, 0);
  const auto r1 = combined_loss(logits, y, black.loss, 1);
  CHECK(r1.wce == doctest::Approx(5 * r0.wce).epsilon(1e-15));
  CHECK(r1.shr == r0.shr);
}

TEST_CASE("combined_loss gradient matches finite differences for every preset") {
  std::mt19937_64 rng(9);
  for (const auto& name : preset_names()) {
    const auto scenario = preset(name);
    for (int round = 0; round < 2; ++round) {
      const auto gamma = scenario.loss.gamma_for_round(round);
      const auto lambda = scenario.loss.lambda;
      for (int trial = 0; trial < 5; ++trial) {
        Matrix logits = random_logits(rng, 10, 2.0);
        const auto y = oracle::random_labels(rng, 10);
        const auto b = combined_loss(logits, y, scenario.loss, round);
        const auto f = [&] {
          return oracle::weighted_ce(logits, y, gamma.neg, gamma.pos) +
                 oracle::squared_hinge(logits, y, lambda.neg, lambda.pos);
        };
        for (Eigen::Index i = 0; i < logits.size(); ++i) {
          const double numeric = oracle::central_difference(f, logits.data()[i]);
          CHECK(oracle::relative_error(b.grad_logits.data()[i], numeric) < 1e-4);
        }
        const auto ce = weighted_ce(logits, y, gamma);
        const auto sh = squared_hinge_surrogate(logits, y, lambda);
        CHECK((b.grad_logits - ce.grad_logits - sh.grad_logits).cwiseAbs().maxCoeff() <= 1e-15);
      }
    }
  }
}

TEST_CASE("loss rejects mismatched inputs") {
  const Matrix logits = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(weighted_ce(logits, Labels{1}, ClassWeights{}), ContractError);
  CHECK_THROWS_AS(squared_hinge_surrogate(Matrix::Zero(2, 3), Labels{0, 1}, ClassWeights{}),
                  ContractError);
  LossConfig bad;
  bad.lambda = ClassWeights{-1, 0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = LossConfig{};
  bad.gamma_schedule.clear();
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("hinge_rank_loss_eval hand cases") {
  // One positive, one negative, tied: both rank 1.5, threshold 1.5, margins 0.
  const std::vector<double> tied{0.3, 0.3};
  CHECK(hinge_rank_loss_eval(tied, Labels{1, 0}) == 2.0);

  // Perfect separation: ranks 1..n, threshold n_neg + 0.5. Only the boundary
  // negative (rank n_neg) and boundary positive (rank n_neg + 1) are inside the
  // unit margin, each with slack 0.5, giving 2 * 0.25 = 0.5.
  const std::vector<double> sep{0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9};
  const Labels y{0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(hinge_rank_loss_eval(sep, y) == 0.5);
  CHECK(hinge_rank_loss_eval(sep, y) == oracle::hinge_rank_loss(sep, y));

  CHECK_THROWS_AS(hinge_rank_loss_eval(sep, Labels(8, 1)), UndefinedMetric);
}

TEST_CASE("hinge_rank_loss_eval matches the counting oracle with ties") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<double> s(n);
    for (auto& v : s) v = static_cast<double>(rng() % 7);
    const auto y = oracle::random_labels(rng, n);
    CHECK(hinge_rank_loss_eval(s, y) == doctest::Approx(oracle::hinge_rank_loss(s, y)).epsilon(1e-12));
  }
}

TEST_CASE("reversed separation maximizes hinge_rank_loss_eval over label placements") {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 8; ++n) {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (auto& v : s) v = unit(rng);
    std::sort(s.begin(), s.end());
    for (int n_pos = 1; n_pos < n; ++n_pos) {
      Labels reversed(static_cast<std::size_t>(n), 0);
      for (int i = 0; i < n_pos; ++i) reversed[static_cast<std::size_t>(i)] = 1;
      const double worst = hinge_rank_loss_eval(s, reversed);
      for (unsigned bits = 0; bits < (1u << n); ++bits) {
        if (std::popcount(bits) != n_pos) continue;
        Labels y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
        CHECK(hinge_rank_loss_eval(s, y) <= worst);
      }
    }
  }
}
