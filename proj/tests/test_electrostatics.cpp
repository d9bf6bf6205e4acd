#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "pullin/electrostatics.hpp"
#include "pullin/errors.hpp"
#include "pullin/units.hpp"

using namespace pullin;
using namespace pullin::electrostatics;
using fem::Mesh;

namespace {

constexpr double kEps = units::kVacuumPermittivity;
constexpr double kWidth = 32e-6;
constexpr double kLength = 190e-6;
constexpr double kGap = 3e-6;

ElectrostaticConfig config(bool fringing = false, double gap = kGap) {
  ElectrostaticConfig cfg;
  cfg.permittivity = kEps;
  cfg.electrode_width = kWidth;
  cfg.gap = gap;
  cfg.fringing = fringing;
  return cfg;
}

Eigen::VectorXd zeros(const Mesh& mesh) { return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.dof_count())); }

double total_transverse(const Mesh& mesh, const Eigen::VectorXd& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) sum += f[Mesh::dof(i, fem::kTransverse)];
  return sum;
}

// Random smooth profile v(x) = a0 + a1 x + a2 x^2 sampled at the nodes, with
// min gap above 0.3 g0.
Eigen::VectorXd random_profile(const Mesh& mesh, std::mt19937_64& rng) {
  const double a = oracle::uniform(rng, -0.5, 0.2) * kGap;
  const double b = oracle::uniform(rng, -0.2, 0.2) * kGap;
  const double c = oracle::uniform(rng, -0.2, 0.2) * kGap;
  Eigen::VectorXd q = zeros(mesh);
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
    if (mesh.is_constrained(Mesh::dof(i, fem::kTransverse))) continue;
    const double s = mesh.x(i) / mesh.length();
    q[Mesh::dof(i, fem::kTransverse)] = a + b * s + c * s * s;
    q[Mesh::dof(i, fem::kRotation)] = (b + 2.0 * c * s) / mesh.length();
  }
  return q;
}

}  // namespace

TEST_CASE("zero voltage gives no load and no jacobian") {
  const Mesh mesh(kLength, 8, BoundaryCondition::Cantilever);
  std::mt19937_64 rng(4);
  const Eigen::VectorXd q = random_profile(mesh, rng);
  CHECK(distributed_load(mesh, q, 0.0, config()).norm() == 0.0);
  CHECK(load_jacobian(mesh, q, 0.0, config(true)).to_dense().norm() == 0.0);
}

TEST_CASE("flat beam total force") {
  const Mesh mesh(kLength, 16, BoundaryCondition::Cantilever);
  const double total = total_transverse(mesh, distributed_load(mesh, zeros(mesh), 40.0, config()));
  const double formula = kEps * kWidth * kLength * 40.0 * 40.0 / (2.0 * kGap * kGap);
  CHECK(total == doctest::Approx(formula).epsilon(1e-12));
  CHECK(total == doctest::Approx(4.785e-6).epsilon(5e-4));

  const double fringed = total_transverse(mesh, distributed_load(mesh, zeros(mesh), 40.0, config(true)));
  CHECK(fringed / total == doctest::Approx(1.0 + 0.65 * 3.0 / 32.0).epsilon(1e-13));
  CHECK(fringed / total == doctest::Approx(1.0609).epsilon(1e-4));
}

TEST_CASE("nodal forces integrate the line load of a linear profile") {
  // Every node (the clamp included; the load does not look at constraints)
  // sits on v(x) = s x, so the interpolated gap is g0 - s x and the total
  // load is int c/g^2 dx = c/s (1/g(L) - 1/g0).
  const Mesh mesh(kLength, 10, BoundaryCondition::Cantilever);
  const double slope = 0.4 * kGap / kLength;
  Eigen::VectorXd q = zeros(mesh);
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
    q[Mesh::dof(i, fem::kTransverse)] = slope * mesh.x(i);
    q[Mesh::dof(i, fem::kRotation)] = slope;
  }
  const double voltage = 25.0;
  const double c = kEps * kWidth * voltage * voltage / 2.0;
  const double exact = c / slope * (1.0 / (kGap - slope * kLength) - 1.0 / kGap);
  ElectrostaticConfig cfg = config();
  cfg.quadrature_points = 8;
  CHECK(total_transverse(mesh, distributed_load(mesh, q, voltage, cfg)) == doctest::Approx(exact).epsilon(1e-10));
  CHECK(total_transverse(mesh, distributed_load(mesh, q, voltage, config())) == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("line load of a constant deflection matches the uniform-gap formula") {
  // A bridge cannot hold a uniform offset, but a cantilever mesh with all
  // nodes displaced (including the clamp DOF, which the load ignores) can.
  const Mesh mesh(kLength, 12, BoundaryCondition::Cantilever);
  Eigen::VectorXd q = zeros(mesh);
  const double v = 0.4 * kGap;
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) q[Mesh::dof(i, fem::kTransverse)] = v;
  const double voltage = 30.0;
  const double g = kGap - v;
  const double exact = kEps * kWidth * kLength * voltage * voltage / (2.0 * g * g);
  CHECK(total_transverse(mesh, distributed_load(mesh, q, voltage, config())) ==
        doctest::Approx(exact).epsilon(1e-10));
  const double exact_fr = exact * (1.0 + 0.65 * g / kWidth);
  CHECK(total_transverse(mesh, distributed_load(mesh, q, voltage, config(true))) ==
        doctest::Approx(exact_fr).epsilon(1e-10));
  CHECK(min_gap(mesh, q, config()) == doctest::Approx(g).epsilon(1e-12));
}

TEST_CASE("load scales exactly with the square of the voltage and attracts") {
  std::mt19937_64 rng(8);
  for (auto bc : {BoundaryCondition::Cantilever, BoundaryCondition::ClampedClamped}) {
    const Mesh mesh(kLength, 8, bc);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd q = random_profile(mesh, rng);
      const double v = oracle::uniform(rng, 1.0, 100.0);
      const Eigen::VectorXd f1 = distributed_load(mesh, q, v, config(trial % 2 == 0));
      const Eigen::VectorXd f3 = distributed_load(mesh, q, 3.0 * v, config(trial % 2 == 0));
      CHECK((f3 - 9.0 * f1).norm() <= 1e-14 * f3.norm());
      // Uniformly gap-closing: the load on a single node's translation
      // equals int q N_i dx with N_i >= 0 on both neighbour elements.
      for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        if (mesh.is_constrained(Mesh::dof(i, fem::kTransverse))) continue;
        CHECK(f1[Mesh::dof(i, fem::kTransverse)] > 0.0);
      }
      for (std::size_t i = 0; i < mesh.n_nodes(); ++i) CHECK(f1[Mesh::dof(i, fem::kAxial)] == 0.0);
    }
  }
}

TEST_CASE("fringing factor is at least one and vanishes for wide electrodes") {
  ElectrostaticConfig cfg = config(true);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    cfg.electrode_width = oracle::uniform(rng, 1e-6, 1e-3);
    CHECK(cfg.fringing_factor(oracle::uniform(rng, 0.0, 1e-5)) >= 1.0);
  }
  double previous = INFINITY;
  for (double w : {1e-5, 1e-3, 1e-1, 10.0, 1e3}) {
    cfg.electrode_width = w;
    const double excess = cfg.fringing_factor(kGap) - 1.0;
    CHECK(excess < previous);
    previous = excess;
  }
  CHECK(previous < 1e-8);
  CHECK(config(false).fringing_factor(kGap) == 1.0);
}

TEST_CASE("load jacobian matches central differences on random profiles") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto bc = trial % 2 == 0 ? BoundaryCondition::Cantilever : BoundaryCondition::ClampedClamped;
    const Mesh mesh(kLength, 6, bc);
    const Eigen::VectorXd q = random_profile(mesh, rng);
    const ElectrostaticConfig cfg = config(trial % 4 < 2);
    REQUIRE(min_gap(mesh, q, cfg) > 0.3 * kGap);
    const double voltage = oracle::uniform(rng, 5.0, 60.0);
    const Eigen::MatrixXd jac = load_jacobian(mesh, q, voltage, cfg).to_dense();
    const Eigen::MatrixXd fd = oracle::central_difference_jacobian(
        [&](const Eigen::VectorXd& x) { return distributed_load(mesh, x, voltage, cfg); }, q, 1e-5 * kGap);
    CHECK((jac - fd).norm() < 1e-6 * jac.norm());
    CHECK((jac - jac.transpose()).norm() < 1e-14 * jac.norm());
  }
}

TEST_CASE("jacobian of a flat beam scales with the inverse cube of the gap") {
  const Mesh mesh(kLength, 8, BoundaryCondition::ClampedClamped);
  const double a = load_jacobian(mesh, zeros(mesh), 40.0, config(false, kGap)).to_dense().norm();
  const double b = load_jacobian(mesh, zeros(mesh), 40.0, config(false, 2.0 * kGap)).to_dense().norm();
  CHECK(std::abs(a / b - 8.0) < 1e-10);
}

TEST_CASE("penetration is reported and min gap is tracked") {
  const Mesh mesh(kLength, 4, BoundaryCondition::Cantilever);
  Eigen::VectorXd q = zeros(mesh);
  q[Mesh::dof(4, fem::kTransverse)] = 1.2 * kGap;
  CHECK(min_gap(mesh, q, config()) == doctest::Approx(-0.2 * kGap));
  CHECK_THROWS_AS(distributed_load(mesh, q, 10.0, config()), PenetrationError);
  CHECK_THROWS_AS(load_jacobian(mesh, q, 10.0, config()), PenetrationError);
}

TEST_CASE("four-point electrostatic quadrature is converged against eight points") {
  std::mt19937_64 rng(30);
  const Mesh mesh(kLength, 16, BoundaryCondition::ClampedClamped);
  ElectrostaticConfig four = config(true);
  ElectrostaticConfig eight = four;
  eight.quadrature_points = 8;
  for (int trial = 0; trial < 5; ++trial) {
    // Smooth clamped shape v = 16 A s^2 (1 - s)^2 with |A| <= 0.6 g0.
    const double amp = oracle::uniform(rng, -0.6, 0.6) * kGap;
    Eigen::VectorXd q = zeros(mesh);
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
      const double s = mesh.x(i) / kLength;
      q[Mesh::dof(i, fem::kTransverse)] = 16.0 * amp * s * s * (1 - s) * (1 - s);
      q[Mesh::dof(i, fem::kRotation)] = 16.0 * amp * (2.0 * s - 6.0 * s * s + 4.0 * s * s * s) / kLength;
    }
    const Eigen::VectorXd a = distributed_load(mesh, q, 50.0, four);
    const Eigen::VectorXd b = distributed_load(mesh, q, 50.0, eight);
    CHECK((a - b).norm() < 1e-6 * b.norm());
  }
}

TEST_CASE("configuration validation") {
  CHECK_NOTHROW(config().validate());
  ElectrostaticConfig bad = config();
  bad.collapse_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = config();
  bad.gap = 0.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = config();
  bad.permittivity = -1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("lumped transducer") {
  const LumpedTransducer t{kLength * kWidth, kGap, kEps};
  CHECK(t.area == doctest::Approx(6.08e-9));

  SUBCASE("capacitance decreases with the gap and the force is its derivative") {
    const double d = 1e-12;
    for (double x : {0.0, 0.5e-6, 1.5e-6}) {
      CHECK(t.capacitance(x + 1e-7) > t.capacitance(x));
      const double dcdx = (t.capacitance(x + d) - t.capacitance(x - d)) / (2.0 * d);
      CHECK(t.force(x, 10.0) == doctest::Approx(0.5 * 100.0 * dcdx).epsilon(1e-6));
      const double dfdx = (t.force(x + d, 10.0) - t.force(x - d, 10.0)) / (2.0 * d);
      CHECK(t.force_slope(x, 10.0) == doctest::Approx(dfdx).epsilon(1e-6));
    }
  }

  SUBCASE("closed-form pull-in against a brute-force equilibrium scan") {
    const LumpedPullIn p = lumped_pullin(1.0, t);
    CHECK(p.voltage == doctest::Approx(12.19).epsilon(5e-4));
    const auto ref = oracle::lumped_pullin_bruteforce(1.0, t.area, t.permittivity, t.gap);
    CHECK(p.voltage == doctest::Approx(ref.voltage).epsilon(1e-9));
    CHECK(p.displacement == doctest::Approx(ref.displacement).epsilon(1e-6));
  }

  SUBCASE("pull-in displacement is a third of the gap for any parameters") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 20; ++i) {
      const LumpedTransducer r{oracle::uniform(rng, 1e-10, 1e-7), oracle::uniform(rng, 1e-6, 5e-6),
                               kEps * oracle::uniform(rng, 1.0, 10.0)};
      const double k = oracle::uniform(rng, 0.1, 100.0);
      const LumpedPullIn p = lumped_pullin(k, r);
      CHECK(p.displacement / r.gap == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
      const auto ref = oracle::lumped_pullin_bruteforce(k, r.area, r.permittivity, r.gap);
      CHECK(ref.displacement / r.gap == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
      CHECK(lumped_pullin(4.0 * k, r).voltage == doctest::Approx(2.0 * p.voltage).epsilon(1e-15));
    }
  }

  CHECK_THROWS_AS(lumped_pullin(0.0, t), InputError);
}
