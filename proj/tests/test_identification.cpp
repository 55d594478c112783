#include <doctest.h>

#include <vector>

#include "mvsis/error.hpp"
#include "mvsis/identification.hpp"
#include "support.hpp"

using namespace mvsis;

namespace {

Matrix swap2() {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  return a;
}

Trajectory homogeneous_run(testing::Rng& rng, const Matrix& a, double h, std::vector<testing::HomogeneousRates> rates,
                           Index steps) {
  std::vector<VirusLayer> layers;
  for (const auto& r : rates) layers.push_back(VirusLayer::homogeneous(r.beta, a, r.delta));
  const MultiVirusModel model(h, std::move(layers));
  const EpidemicState x0(testing::interior_state(rng, a.rows(), static_cast<Index>(rates.size())));
  return simulate(model, x0, steps);
}

}  // namespace

TEST_SUITE("identification") {
  TEST_CASE("regression rows and witness for a two-node example") {
    Matrix x0(2, 1), x1(2, 1);
    x0 << 0.5, 0.2;
    x1 << 0.45, 0.3;
    Trajectory traj(std::vector<EpidemicState>{EpidemicState(x0), EpidemicState(x1)}, 1.0);
    const auto system = build_phi_homogeneous(traj, swap2(), 0);
    REQUIRE(system.rows() == 2);
    CHECK(system.phi(0, 0) == doctest::Approx(0.1));
    CHECK(system.phi(0, 1) == doctest::Approx(-0.5));
    CHECK(system.phi(1, 0) == doctest::Approx(0.4));
    CHECK(system.phi(1, 1) == doctest::Approx(-0.2));
    const auto w = identifiability_witness(traj, swap2(), 0);
    REQUIRE(w.has_value());
    CHECK(w->i == 0);
    CHECK(w->j == 1);
    CHECK(w->t1 == 0);
    CHECK(w->t2 == 0);
  }

  TEST_CASE("exact recovery on a noiseless homogeneous trajectory") {
    testing::Rng rng(101);
    const Matrix a = testing::random_irreducible_adjacency(rng, 6, 0.3);
    const double h = 0.4;
    const auto r0 = testing::rates_for_threshold(rng, a, h, 1.2, 0.45);
    const auto r1 = testing::rates_for_threshold(rng, a, h, 0.95, 0.45);
    const auto traj = homogeneous_run(rng, a, h, {r0, r1}, 12);
    const auto e0 = identify_homogeneous(traj, a, 0, h);
    const auto e1 = identify_homogeneous(traj, a, 1, h);
    CHECK(e0.identifiable);
    CHECK(e0.witness.has_value());
    CHECK(e0.beta == doctest::Approx(r0.beta).epsilon(1e-9));
    CHECK(e0.delta == doctest::Approx(r0.delta).epsilon(1e-9));
    CHECK(e1.beta == doctest::Approx(r1.beta).epsilon(1e-9));
    CHECK(e1.delta == doctest::Approx(r1.delta).epsilon(1e-9));
    CHECK(e0.residual_norm < 1e-12);
    CHECK_FALSE(e0.violates_model);
  }

  TEST_CASE("lumped estimates are h times the scaled ones") {
    testing::Rng rng(102);
    const Matrix a = testing::random_irreducible_adjacency(rng, 5, 0.4);
    const double h = 0.3;
    const auto traj = homogeneous_run(rng, a, h, {testing::rates_for_threshold(rng, a, h, 1.1, 0.9)}, 8);
    const auto scaled = identify_homogeneous(traj, a, 0, h);
    const auto lumped = identify_homogeneous(traj, a, 0, std::nullopt);
    CHECK(lumped.lumped);
    CHECK(lumped.h == 1.0);
    CHECK(lumped.beta == doctest::Approx(h * scaled.beta).epsilon(1e-12));
    CHECK(lumped.delta == doctest::Approx(h * scaled.delta).epsilon(1e-12));
  }

  TEST_CASE("zero trajectory is unidentifiable") {
    Trajectory traj(std::vector<EpidemicState>(4, EpidemicState::zeros(3, 1)), 1.0);
    const Matrix a = Matrix::Ones(3, 3);
    const auto e = identify_homogeneous(traj, a, 0, 1.0);
    CHECK_FALSE(e.identifiable);
    CHECK_FALSE(e.witness.has_value());
    CHECK(e.beta == 0.0);
    CHECK(e.delta == 0.0);
  }

  TEST_CASE("rank-one regression has no witness and a minimum-norm answer") {
    // Constant, equal states on a complete graph: every row is proportional to the first.
    Matrix x(3, 1);
    x << 0.2, 0.2, 0.2;
    Matrix y(3, 1);
    y << 0.25, 0.25, 0.25;
    Trajectory traj(std::vector<EpidemicState>{EpidemicState(x), EpidemicState(y)}, 1.0);
    const Matrix a = Matrix::Ones(3, 3);
    const auto e = identify_homogeneous(traj, a, 0, 1.0);
    CHECK_FALSE(e.identifiable);
    CHECK_FALSE(e.witness.has_value());
    // phi rows are [0.48, -0.2]; rhs 0.05. Minimum-norm solution is phi^T c.
    const double c = 0.05 / (0.48 * 0.48 + 0.2 * 0.2);
    CHECK(e.beta == doctest::Approx(0.48 * c).epsilon(1e-10));
    CHECK(e.delta == doctest::Approx(-0.2 * c).epsilon(1e-10));
  }

  TEST_CASE("single transition per node cannot identify a heterogeneous node") {
    Matrix x0(2, 1), x1(2, 1);
    x0 << 0.5, 0.2;
    x1 << 0.45, 0.3;
    Trajectory traj(std::vector<EpidemicState>{EpidemicState(x0), EpidemicState(x1)}, 1.0);
    try {
      identify_heterogeneous_node(traj, swap2(), 0, 0, 1.0);
      FAIL("expected a refusal");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::precondition);
      CHECK(e.origin() == "identification.identify_heterogeneous_node");
    }
  }

  TEST_CASE("heterogeneous recovery per node") {
    testing::Rng rng(103);
    const Index n = 5;
    const Matrix a = testing::random_irreducible_adjacency(rng, n, 0.4);
    const double h = 0.5;
    const double row_max = a.rowwise().sum().maxCoeff();
    Vector beta0(n), beta1(n), delta0(n), delta1(n);
    for (Index i = 0; i < n; ++i) {
      beta0(i) = testing::uniform(rng, 0.1, 0.45) / (h * row_max);
      beta1(i) = testing::uniform(rng, 0.1, 0.45) / (h * row_max);
      delta0(i) = testing::uniform(rng, 0.05, 0.5);
      delta1(i) = testing::uniform(rng, 0.05, 0.5);
    }
    const MultiVirusModel model(h, {VirusLayer::factored(beta0, a, delta0), VirusLayer::factored(beta1, a, delta1)});
    const auto traj = simulate(model, EpidemicState(testing::interior_state(rng, n, 2)), 10);
    const std::vector<Matrix> adj{a};
    const auto est = identify_heterogeneous(traj, adj, h);
    CHECK(est.unidentifiable.empty());
    for (Index i = 0; i < n; ++i) {
      CHECK(est.beta(i, 0) == doctest::Approx(beta0(i)).epsilon(1e-8));
      CHECK(est.delta(i, 0) == doctest::Approx(delta0(i)).epsilon(1e-8));
      CHECK(est.beta(i, 1) == doctest::Approx(beta1(i)).epsilon(1e-8));
      CHECK(est.delta(i, 1) == doctest::Approx(delta1(i)).epsilon(1e-8));
      REQUIRE(est.at(i, 0).witness.has_value());
      CHECK(est.at(i, 0).witness->i == i);
    }
  }

  TEST_CASE("property: witness exists exactly when the regression has full rank") {
    testing::Rng rng(104);
    for (int trial = 0; trial < 200; ++trial) {
      const Index n = testing::uniform_int(rng, 2, 6);
      const Matrix a = testing::random_irreducible_adjacency(rng, n, 0.3);
      const double h = testing::uniform(rng, 0.1, 1.0);
      const auto rates = testing::rates_for_threshold(rng, a, h, testing::uniform(rng, 0.8, 1.3), 0.9);
      const auto traj = homogeneous_run(rng, a, h, {rates}, testing::uniform_int(rng, 1, 6));
      const auto e = identify_homogeneous(traj, a, 0, h);
      CHECK(e.identifiable == e.witness.has_value());
      if (e.witness) {
        const auto system = build_phi_homogeneous(traj, a, 0);
        const Index r1 = e.witness->t1 * n + e.witness->i;
        const Index r2 = e.witness->t2 * n + e.witness->j;
        const double det = system.phi(r1, 0) * system.phi(r2, 1) - system.phi(r1, 1) * system.phi(r2, 0);
        CHECK(det != 0.0);
      }
    }
  }

  TEST_CASE("one-step prediction reproduces the model step") {
    testing::Rng rng(105);
    const Matrix a = testing::random_irreducible_adjacency(rng, 4, 0.5);
    const double h = 0.5;
    const auto r0 = testing::rates_for_threshold(rng, a, h, 1.1, 0.45);
    const auto r1 = testing::rates_for_threshold(rng, a, h, 1.05, 0.45);
    const MultiVirusModel model(h, {VirusLayer::homogeneous(r0.beta, a, r0.delta),
                                    VirusLayer::homogeneous(r1.beta, a, r1.delta)});
    const EpidemicState x(testing::interior_state(rng, 4, 2));
    std::vector<EstimationResult> est(2);
    est[0].beta = r0.beta;
    est[0].delta = r0.delta;
    est[1].beta = r1.beta;
    est[1].delta = r1.delta;
    for (auto& e : est) e.h = h;
    const std::vector<Matrix> adj{a};
    const auto predicted = one_step_predict(est, x, adj);
    CHECK((predicted.values() - step(model, x).values()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_SUITE("rls") {
  TEST_CASE("two identity rows give the targets") {
    auto state = rls_init();
    state = rls_update(state, Eigen::Vector2d(1, 0), 0.3);
    CHECK_FALSE(state.full_rank);
    state = rls_update(state, Eigen::Vector2d(0, 1), 0.7);
    CHECK(state.full_rank);
    const auto e = rls_estimate(state);
    CHECK(e.beta == doctest::Approx(0.3));
    CHECK(e.delta == doctest::Approx(0.7));
    CHECK(e.identifiable);
  }

  TEST_CASE("rank-deficient state returns the minimum-norm value") {
    auto state = rls_update(rls_init(), Eigen::Vector2d(3, 4), 5.0);
    const auto e = rls_estimate(state);
    CHECK_FALSE(e.identifiable);
    CHECK(e.beta == doctest::Approx(0.6));
    CHECK(e.delta == doctest::Approx(0.8));
  }

  TEST_CASE("rejects bad forgetting factors") {
    CHECK_THROWS_AS(rls_init(0.0), Error);
    CHECK_THROWS_AS(rls_init(1.5), Error);
  }

  TEST_CASE("property: unit forgetting matches the batch solution") {
    testing::Rng rng(201);
    for (int trial = 0; trial < 200; ++trial) {
      const Index rows = testing::uniform_int(rng, 1, 40);
      RegressionSystem system{Eigen::MatrixX2d(rows, 2), Vector(rows), 1.0};
      for (Index r = 0; r < rows; ++r) {
        system.phi(r, 0) = testing::uniform(rng, -1, 1);
        system.phi(r, 1) = testing::uniform(rng, -1, 1);
        system.rhs(r) = testing::uniform(rng, -1, 1);
      }
      const auto batch = solve_least_squares(system);
      const auto online = rls_estimate(rls_update(rls_init(), system));
      CHECK(online.identifiable == batch.full_rank);
      const double scale = std::max(1.0, batch.theta.norm());
      CHECK(std::abs(online.beta - batch.theta(0)) < 1e-8 * scale);
      CHECK(std::abs(online.delta - batch.theta(1)) < 1e-8 * scale);
      CHECK(std::abs(online.residual_norm - batch.residual_norm) < 1e-6 * std::max(1.0, batch.residual_norm));
    }
  }

  TEST_CASE("forgetting tracks a parameter change") {
    testing::Rng rng(202);
    auto state = rls_init(0.8);
    for (int t = 0; t < 200; ++t) {
      const Eigen::Vector2d row(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1));
      const Eigen::Vector2d theta = t < 100 ? Eigen::Vector2d(1, 2) : Eigen::Vector2d(-1, 0.5);
      state = rls_update(state, row, row.dot(theta));
    }
    const auto e = rls_estimate(state);
    CHECK(e.beta == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(e.delta == doctest::Approx(0.5).epsilon(1e-6));
  }
}
