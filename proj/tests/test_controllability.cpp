#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "ctrlgad/controllability.hpp"
#include "ctrlgad/errors.hpp"
#include "ctrlgad/graph.hpp"
#include "ctrlgad/rng.hpp"
#include "test_support.hpp"

using namespace ctrlgad;

namespace {

ControllabilityConfig fine_config() {
  ControllabilityConfig cfg;
  cfg.step_size = 0.02;
  cfg.trapezoid = true;
  return cfg;
}

Graph path3() {
  return make_graph(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
}

}  // namespace

TEST_CASE("normalize_adjacency") {
  Eigen::MatrixXd single(1, 1);
  single << 0;
  CHECK(normalize_adjacency(single)(0, 0) == -1.0);

  Eigen::MatrixXd k2(2, 2);
  k2 << 0, 1, 1, 0;
  const Eigen::MatrixXd n2 = normalize_adjacency(k2);
  CHECK(n2(0, 0) == doctest::Approx(-1.0));
  CHECK(n2(0, 1) == doctest::Approx(0.5));

  Eigen::MatrixXd p3(3, 3);
  p3 << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  const Eigen::MatrixXd n3 = normalize_adjacency(p3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(n3);
  const double shift = std::sqrt(2.0) / (std::sqrt(2.0) + 1.0);
  CHECK(eig.eigenvalues()(0) == doctest::Approx(-1.0 - shift).epsilon(1e-12));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues()(2) == doctest::Approx(-1.0 + shift).epsilon(1e-12));
  CHECK(eig.eigenvalues().maxCoeff() < 0.0);
}

TEST_CASE("analytic score fixtures") {
  SUBCASE("isolated node converges to 1/2") {
    const Graph g = make_graph(1, {});
    const auto result = average_controllability(g, fine_config());
    CHECK(result.scores[0] == doctest::Approx(0.5).epsilon(2e-3));
  }
  SUBCASE("K2 converges to 2/3 per node") {
    const Graph g = make_graph(2, {{0, 1}, {1, 0}});
    const auto result = average_controllability(g, fine_config());
    CHECK(result.scores[0] == doctest::Approx(2.0 / 3.0).epsilon(2e-3));
    CHECK(result.scores[1] == doctest::Approx(2.0 / 3.0).epsilon(2e-3));
  }
  SUBCASE("P3 endpoints and center") {
    const auto result = average_controllability(path3(), fine_config());
    CHECK(result.scores[0] == doctest::Approx(0.6306).epsilon(2e-3));
    CHECK(result.scores[1] == doctest::Approx(0.7612).epsilon(2e-3));
    CHECK(result.scores[2] == doctest::Approx(0.6306).epsilon(2e-3));
  }
  SUBCASE("right Riemann sum matches its closed form on a scalar") {
    // Single node: score = sum_{k=1..K} e^{-2 k dt} dt, a geometric series.
    ControllabilityConfig cfg;
    cfg.step_size = 0.2;
    cfg.horizon = 2.0;
    const Graph g = make_graph(1, {});
    const auto result = average_controllability(g, cfg);
    const double r = std::exp(-0.4);
    const double expected = 0.2 * r * (1.0 - std::pow(r, 10)) / (1.0 - r);
    CHECK(result.scores[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(result.steps_used == 10);
    CHECK(result.horizon_used == doctest::Approx(2.0));
  }
}

TEST_CASE("gramian_oracle worked examples") {
  SUBCASE("edgeless pair decouples") {
    const Eigen::MatrixXd w = gramian_oracle(make_graph(2, {}));
    CHECK((w - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
  }
  SUBCASE("K2") {
    const Eigen::MatrixXd w = gramian_oracle(make_graph(2, {{0, 1}, {1, 0}}));
    CHECK(w(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(w(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("P3 diagonal and PSD") {
    const Eigen::MatrixXd w = gramian_oracle(path3());
    CHECK(w(0, 0) == doctest::Approx(0.6306).epsilon(1e-3));
    CHECK(w(1, 1) == doctest::Approx(0.7612).epsilon(1e-3));
    CHECK((w - w.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("quadrature converges to the Lyapunov oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Graph g = test_support::random_symmetric_graph(rng, 10 + trial * 5, 0.3);
    const Eigen::VectorXd oracle = gramian_oracle(g).diagonal();

    ControllabilityConfig cfg = fine_config();
    const auto result = average_controllability(g, cfg);
    for (std::size_t i = 0; i < result.scores.size(); ++i)
      CHECK(result.scores[i] == doctest::Approx(oracle(static_cast<Eigen::Index>(i)))
                                    .epsilon(5e-3));
  }
}

TEST_CASE("halving the step roughly halves the Riemann error") {
  Rng rng(31);
  const Graph g = test_support::random_symmetric_graph(rng, 20, 0.25);
  const Eigen::MatrixXd a_norm = normalize_adjacency(to_dense(symmetrize(g)));
  const double horizon = 20.0;
  const Eigen::VectorXd exact = test_support::finite_horizon_diag(a_norm, horizon);

  auto max_rel_error = [&](double step) {
    ControllabilityConfig cfg;
    cfg.step_size = step;
    cfg.horizon = horizon;
    const auto result = average_controllability(g, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < result.scores.size(); ++i) {
      const double reference = exact(static_cast<Eigen::Index>(i));
      worst = std::max(worst, std::abs(result.scores[i] - reference) / reference);
    }
    return worst;
  };

  const double coarse = max_rel_error(0.2);
  const double fine = max_rel_error(0.1);
  CHECK(coarse / fine >= 1.8);
  CHECK(coarse / fine <= 2.5);
}

TEST_CASE("backends agree step for step") {
  Rng rng(13);
  const Graph g = test_support::random_symmetric_graph(rng, 30, 0.2);

  ControllabilityConfig recurrence;
  recurrence.backend = ControllabilityConfig::Backend::recurrence;
  ControllabilityConfig spectral = recurrence;
  spectral.backend = ControllabilityConfig::Backend::spectral;

  const auto a = average_controllability(g, recurrence);
  const auto b = average_controllability(g, spectral);
  REQUIRE(a.scores.size() == b.scores.size());
  CHECK(a.steps_used == b.steps_used);
  CHECK(a.horizon_used == doctest::Approx(b.horizon_used));
  for (std::size_t i = 0; i < a.scores.size(); ++i)
    CHECK(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-9));

  SUBCASE("trapezoid flag keeps them aligned") {
    recurrence.trapezoid = spectral.trapezoid = true;
    const auto at = average_controllability(g, recurrence);
    const auto bt = average_controllability(g, spectral);
    CHECK(at.steps_used == bt.steps_used);
    for (std::size_t i = 0; i < at.scores.size(); ++i)
      CHECK(at.scores[i] == doctest::Approx(bt.scores[i]).epsilon(1e-9));
  }
}

TEST_CASE("structural properties of the scores") {
  Rng rng(77);
  const Graph g = test_support::random_symmetric_graph(rng, 16, 0.3);
  ControllabilityConfig cfg;

  SUBCASE("permutation equivariance") {
    std::vector<std::size_t> perm(g.num_nodes);
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<Edge> relabeled;
    for (const Edge& e : g.edges) relabeled.push_back({perm[e.source], perm[e.target]});
    const Graph h = make_graph(g.num_nodes, std::move(relabeled));

    const auto base = average_controllability(g, cfg);
    const auto permuted = average_controllability(h, cfg);
    for (std::size_t i = 0; i < g.num_nodes; ++i)
      CHECK(permuted.scores[perm[i]] == doctest::Approx(base.scores[i]).epsilon(1e-12));
  }
  SUBCASE("disjoint union of identical components") {
    const Graph k2 = make_graph(2, {{0, 1}, {1, 0}});
    const Graph twice = make_graph(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}});
    const auto one = average_controllability(k2, cfg);
    const auto two = average_controllability(twice, cfg);
    CHECK(two.scores[0] == doctest::Approx(one.scores[0]).epsilon(1e-12));
    CHECK(two.scores[3] == doctest::Approx(one.scores[1]).epsilon(1e-12));
  }
  SUBCASE("scores are strictly positive") {
    const auto result = average_controllability(g, cfg);
    for (double s : result.scores) CHECK(s > 0.0);
  }
  SUBCASE("monotone in the horizon") {
    ControllabilityConfig shorter;
    shorter.horizon = 2.0;
    ControllabilityConfig longer;
    longer.horizon = 8.0;
    const auto s = average_controllability(g, shorter);
    const auto l = average_controllability(g, longer);
    for (std::size_t i = 0; i < s.scores.size(); ++i) CHECK(l.scores[i] >= s.scores[i]);
  }
}

TEST_CASE("adaptive horizon and diagnostics") {
  const Graph g = make_graph(2, {{0, 1}, {1, 0}});
  ControllabilityConfig cfg;
  const auto result = average_controllability(g, cfg);
  CHECK(result.steps_used >= 2);
  CHECK(result.horizon_used == doctest::Approx(result.steps_used * cfg.step_size));
  CHECK(result.horizon_used < 200.0);
  CHECK(result.spectral_radius == doctest::Approx(1.0));
  CHECK(result.spectral_abscissa == doctest::Approx(-0.5));
  CHECK(result.gramian.size() == 0);

  SUBCASE("gramian retention") {
    cfg.keep_gramian = true;
    const auto kept = average_controllability(g, cfg);
    REQUIRE(kept.gramian.rows() == 2);
    CHECK(kept.gramian(0, 0) == doctest::Approx(kept.scores[0]).epsilon(1e-12));
    CHECK((kept.gramian - kept.gramian.transpose()).norm() < 1e-12);
  }
  SUBCASE("warn on scores reaching 1") {
    // A star hub concentrates energy: 12 leaves push its score past 1.
    std::vector<Edge> star;
    for (std::size_t leaf = 1; leaf <= 12; ++leaf) {
      star.push_back({0, leaf});
      star.push_back({leaf, 0});
    }
    const Graph hub = make_graph(13, std::move(star));
    const auto result_hub = average_controllability(hub, fine_config());
    CHECK(result_hub.scores[0] > 1.0);
    REQUIRE(result_hub.warnings.size() == 1);
    CHECK(result_hub.warnings[0].find("score") != std::string::npos);
  }
}

TEST_CASE("configuration errors") {
  const Graph g = make_graph(2, {{0, 1}, {1, 0}});

  ControllabilityConfig bad_step;
  bad_step.step_size = 0.0;
  CHECK_THROWS_AS(average_controllability(g, bad_step), ConfigError);

  ControllabilityConfig short_horizon;
  short_horizon.horizon = 0.1;  // below one step
  CHECK_THROWS_AS(average_controllability(g, short_horizon), ConfigError);

  CHECK_THROWS_AS(average_controllability(make_graph(0, {}), ControllabilityConfig{}),
                  PreconditionError);

  ControllabilityConfig bad_b;
  bad_b.control_matrix = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(average_controllability(g, bad_b), ConfigError);

  ControllabilityConfig spectral_with_b;
  spectral_with_b.backend = ControllabilityConfig::Backend::spectral;
  spectral_with_b.control_matrix = Eigen::MatrixXd::Identity(2, 1);
  CHECK_THROWS_AS(average_controllability(g, spectral_with_b), ConfigError);
}

TEST_CASE("custom control matrix restricts the input channels") {
  const Graph g = make_graph(2, {{0, 1}, {1, 0}});
  ControllabilityConfig cfg;
  cfg.control_matrix = Eigen::MatrixXd::Zero(2, 1);
  cfg.control_matrix(0, 0) = 1.0;
  const auto restricted = average_controllability(g, cfg);
  const auto full = average_controllability(g, ControllabilityConfig{});
  CHECK(restricted.scores[0] < full.scores[0]);
  CHECK(restricted.scores[1] < full.scores[1]);
  CHECK(restricted.scores[0] > 0.0);
}
