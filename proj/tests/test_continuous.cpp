#include <doctest.h>

#include <numbers>
#include <tuple>

#include "support.hpp"

using namespace thermolie;
using testing::max_abs_diff;
using testing::Rng;

namespace {

// Heavy-top equations written out by hand:
//   I dOmega = I Omega x Omega + mgl Gamma x chi - gamma Omega
//   dGamma = Gamma x Omega,  dS = gamma |Omega|^2 / T
StateDerivative heavy_top_oracle(const ReducedState& st, const HeavyTopDerived& d) {
  const Vec3 torque = cross(d.inertia * st.omega, st.omega) + d.mgl() * cross(st.gamma, d.axis) -
                      d.friction_coeff * st.omega;
  StateDerivative k;
  k.d_omega = Vec3{torque.x / d.inertia(0, 0), torque.y / d.inertia(1, 1), torque.z / d.inertia(2, 2)};
  k.d_gamma = cross(st.gamma, st.omega);
  k.d_entropy = d.friction_coeff * dot(st.omega, st.omega) / d.thermal.temperature(st.entropy);
  return k;
}

ReducedState heun_oracle(const ReducedState& st, double h, const HeavyTopDerived& d) {
  const StateDerivative k1 = heavy_top_oracle(st, d);
  const ReducedState mid{st.omega + h * k1.d_omega, st.gamma + h * k1.d_gamma, st.entropy + h * k1.d_entropy};
  const StateDerivative k2 = heavy_top_oracle(mid, d);
  return {st.omega + 0.5 * h * (k1.d_omega + k2.d_omega), st.gamma + 0.5 * h * (k1.d_gamma + k2.d_gamma),
          st.entropy + 0.5 * h * (k1.d_entropy + k2.d_entropy)};
}

DoubleBracketSystem db_system(double lambda) {
  DoubleBracketParams p;
  p.inertia = Mat3::diagonal({1, 2, 3});
  p.lambda = constant_lambda(lambda);
  return DoubleBracketSystem(p);
}

double state_gap(const ReducedState& a, const ReducedState& b) {
  return std::max(norm(a.omega - b.omega), norm(a.gamma - b.gamma));
}

}  // namespace

TEST_SUITE("continuous") {

TEST_CASE("upright and hanging rest states are equilibria") {
  const HeavyTopSystem sys = testing::reference_top();
  for (double sign : {1.0, -1.0}) {
    const StateDerivative k = rhs({{}, sign * sys.derived().axis, 0.0}, sys);
    CHECK(k.d_omega == Vec3{});
    CHECK(k.d_gamma == Vec3{});
    CHECK(k.d_entropy == 0.0);
  }
}

TEST_CASE("free rigid body reduces to Euler's equations") {
  const DoubleBracketSystem sys = db_system(0.0);
  const StateDerivative k = rhs({{1, 2, 3}, {0, 0, 1}, 0}, sys);
  CHECK(max_abs_diff(k.d_omega, Vec3{-6, 3, -2.0 / 3.0}) <= 1e-15);
  CHECK(k.d_gamma == Vec3{});
  CHECK(k.d_entropy == 0.0);
}

TEST_CASE("reference initial state: entropy rate") {
  const HeavyTopSystem sys = testing::reference_top();
  const StateDerivative k = rhs(testing::reference_initial(), sys);
  CHECK(k.d_entropy == doctest::Approx(std::numbers::pi * 1e-4 * 2.0 / 300.0).epsilon(1e-14));
  CHECK(k.d_gamma == Vec3{-1, 0, 0});
}

TEST_CASE("rhs matches the hand-written heavy-top equations") {
  const HeavyTopSystem sys = testing::reference_top();
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const ReducedState st{rng.vec(2.0), rng.unit(), rng.uniform(-10.0, 10.0)};
    const StateDerivative got = rhs(st, sys);
    const StateDerivative want = heavy_top_oracle(st, sys.derived());
    CHECK(testing::rel_err(got.d_omega, want.d_omega) <= 1e-13);
    CHECK(testing::rel_err(got.d_gamma, want.d_gamma) <= 1e-15);
    CHECK(got.d_entropy == doctest::Approx(want.d_entropy).epsilon(1e-14));
  }
}

TEST_CASE("Heun step matches an independent implementation") {
  const HeavyTopSystem sys = testing::reference_top();
  Rng rng(32);
  for (int i = 0; i < 100; ++i) {
    const ReducedState st{rng.vec(), rng.unit(), rng.uniform(-1.0, 1.0)};
    const ReducedState got = rk2_step(st, 0.01, sys);
    const ReducedState want = heun_oracle(st, 0.01, sys.derived());
    CHECK(state_gap(got, want) <= 1e-13);
    CHECK(got.entropy == doctest::Approx(want.entropy).epsilon(1e-14));
  }
}

TEST_CASE("spin about the symmetry axis decays exponentially; local error orders") {
  const HeavyTopSystem sys = testing::top_with(0.1, 0.0);
  const double k = sys.derived().friction_coeff / sys.derived().inertia(2, 2);
  const double w0 = 1.0;
  const ReducedState st{{0, 0, w0}, {0, 0, 1}, 0};
  const auto local_error = [&](double h, auto step) {
    return std::fabs(step(st, h).omega.z - w0 * std::exp(-k * h));
  };
  const auto heun = [&](const ReducedState& s, double h) { return rk2_step(s, h, sys); };
  const auto midpoint = [&](const ReducedState& s, double h) { return rk2_step(s, h, sys, Rk2Variant::midpoint); };
  const auto rk4 = [&](const ReducedState& s, double h) { return rk4_step(s, h, sys); };

  const StateDerivative d = rhs(st, sys);
  CHECK(d.d_omega.z == doctest::Approx(-k * w0).epsilon(1e-14));
  CHECK(d.d_gamma == Vec3{});

  for (const auto& [name, ratio_lo, ratio_hi, e1, e2] :
       {std::tuple{"heun", 7.0, 9.0, local_error(1.0, heun), local_error(0.5, heun)},
        std::tuple{"midpoint", 7.0, 9.0, local_error(1.0, midpoint), local_error(0.5, midpoint)},
        std::tuple{"rk4", 28.0, 36.0, local_error(1.0, rk4), local_error(0.5, rk4)}}) {
    INFO(name);
    CHECK(e1 / e2 >= ratio_lo);
    CHECK(e1 / e2 <= ratio_hi);
  }
  // Heun and midpoint coincide on linear problems.
  CHECK(heun(st, 0.3).omega.z == doctest::Approx(midpoint(st, 0.3).omega.z).epsilon(1e-15));
}

TEST_CASE("RK2 and RK4 agree to third order on a generic heavy-top state") {
  const HeavyTopSystem sys = testing::reference_top();
  const ReducedState st = testing::reference_initial();
  const double g1 = state_gap(rk2_step(st, 0.01, sys), rk4_step(st, 0.01, sys));
  const double g2 = state_gap(rk2_step(st, 0.005, sys), rk4_step(st, 0.005, sys));
  CHECK(g1 / g2 > 6.0);
  CHECK(g1 / g2 < 10.0);
}

TEST_CASE("RK4 has local order at least four") {
  const HeavyTopSystem sys = testing::reference_top();
  const ReducedState st{{0.3, 1.0, 1.0}, {0.0, 0.6, 0.8}, 0.0};
  const auto err = [&](double h) {
    const ReducedState two = rk4_step(rk4_step(st, 0.5 * h, sys), 0.5 * h, sys);
    return state_gap(rk4_step(st, h, sys), two);
  };
  const double order = std::log2(err(0.02) / err(0.01)) - 1.0;
  CHECK(order >= 3.7);
}

TEST_CASE("steppers report overflow") {
  const HeavyTopSystem sys = testing::reference_top();
  const ReducedState wild{{1e200, 1e200, 0}, {0, 0, 1}, 0};
  CHECK_THROWS_AS(rk2_step(wild, 0.1, sys), NonFiniteState);
  CHECK_THROWS_AS(rk4_step(wild, 0.1, sys), NonFiniteState);
}

TEST_CASE("energy bookkeeping") {
  const HeavyTopSystem sys = testing::reference_top();
  const HeavyTopDerived& d = sys.derived();
  const ReducedState st = testing::reference_initial();
  const EnergyParts e = energy_parts(st, sys);
  CHECK(e.kinetic == doctest::Approx(0.5 * (d.inertia(1, 1) + d.inertia(2, 2))));
  CHECK(e.potential == doctest::Approx(d.mgl()));
  CHECK(e.internal == doctest::Approx(d.thermal.heat_capacity * 300.0));
  CHECK(e.total == e.kinetic + e.potential + e.internal);
  CHECK(energy(st, sys) == e.total);
  CHECK(energy(st, sys) == doctest::Approx(reduced_energy(st, sys)).epsilon(1e-15));
  CHECK(e.total == doctest::Approx(3.9e5).epsilon(0.01));
}

TEST_CASE("total energy is conserved by the continuous flow") {
  const HeavyTopSystem top = testing::reference_top();
  const DoubleBracketSystem db = db_system(0.4);
  Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    const ReducedState st{rng.vec(2.0), rng.unit(), rng.uniform(-1.0, 1.0)};
    for (const ThermoSystem* sys : {static_cast<const ThermoSystem*>(&top), static_cast<const ThermoSystem*>(&db)}) {
      const StateDerivative k = rhs(st, *sys);
      const double scale = std::fabs(dot(sys->dl_domega(st), k.d_omega)) +
                           std::fabs(dot(sys->dl_dgamma(st), k.d_gamma)) + sys->temperature(st.entropy) * std::fabs(k.d_entropy) + 1e-300;
      CHECK(std::fabs(energy_rate(st, *sys)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("Kelvin-Noether quantity changes only through the forces") {
  const HeavyTopSystem sys = testing::reference_top();
  const HeavyTopDerived& d = sys.derived();
  Rng rng(34);
  for (int i = 0; i < 200; ++i) {
    const ReducedState st{rng.vec(2.0), rng.unit(), 0};
    const StateDerivative k = rhs(st, sys);
    // Product rule on I Omega . Gamma.
    const double direct = dot(d.inertia * k.d_omega, st.gamma) + dot(d.inertia * st.omega, k.d_gamma);
    const double want = -d.friction_coeff * dot(st.gamma, st.omega);
    CHECK(kelvin_noether_rate(st, sys) == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::fabs(direct - want) <= 1e-12 * std::max(1.0, norm(d.inertia * st.omega) * norm(k.d_omega)));
  }
  const ReducedState no_friction{{1, 2, 3}, {0, 0.6, 0.8}, 0};
  CHECK(kelvin_noether_rate(no_friction, testing::top_with(0.0, 9.81)) == 0.0);
}

TEST_CASE("double-bracket flow keeps |mu| fixed and dissipates kinetic energy") {
  const DoubleBracketSystem sys = db_system(0.5);
  Rng rng(35);
  for (int i = 0; i < 200; ++i) {
    const ReducedState st{rng.vec(), {0, 0, 1}, 0};
    const StateDerivative k = rhs(st, sys);
    const Vec3 mu = sys.inertia() * st.omega;
    const Vec3 d_mu = sys.inertia() * k.d_omega;
    CHECK(std::fabs(dot(mu, d_mu)) <= 1e-13 * norm(mu) * std::max(norm(d_mu), 1.0));
    CHECK(dot(d_mu, st.omega) <= 1e-15);
    CHECK(k.d_gamma == Vec3{});
  }
}

TEST_CASE("attitude reconstruction uses the midpoint Cayley increment") {
  const Rotation r = cay({0.1, 0.2, 0.3});
  const Vec3 a{0.4, -0.1, 0.2};
  const Vec3 b{0.2, 0.3, -0.5};
  const Rotation got = reconstruct_rotation(r, a, b, 0.1);
  CHECK(max_abs_diff(got.matrix(), (r * cay(0.05 * (a + b))).matrix()) <= 1e-15);
  CHECK(got.orthogonality_defect() <= 1e-14);
  CHECK(reconstruct_rotation(r, {}, {}, 0.1).matrix() == r.matrix());
}

}  // TEST_SUITE
