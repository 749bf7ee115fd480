#include "oracles.hpp"

#include <jetx/jet.hpp>

#include <doctest.h>

#include <cmath>

using namespace jetx;
using oracle::vec;

namespace {

Jet holder_pair() {
  auto f = [](double x) { return 2.0 / 3.0 * std::pow(std::abs(x), 1.5); };
  auto g = [](double x) { return std::copysign(std::sqrt(std::abs(x)), x); };
  return Jet::make(1, {vec({-1.0}), vec({1.0})}, {f(-1.0), f(1.0)}, {vec({g(-1.0)}), vec({g(1.0)})});
}

Jet affine(int n, int count, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-2.0, 2.0);
  const double c = rng.uniform(-1.0, 1.0);
  std::vector<Vec> p, g;
  std::vector<double> f;
  for (int k = 0; k < count; ++k) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.uniform(-1.0, 1.0);
    p.push_back(x);
    f.push_back(c + v.dot(x));
    g.push_back(v);
  }
  return Jet::make(n, p, f, g);
}

}  // namespace

TEST_CASE("jet validation") {
  CHECK_THROWS_AS(Jet::make(1, {vec({0.0})}, {0.0, 1.0}, {vec({0.0})}), SchemaError);
  CHECK_THROWS_AS(Jet::make(2, {vec({0.0})}, {0.0}, {vec({0.0})}), SchemaError);
  CHECK_THROWS_AS(Jet::make(1, {vec({0.0}), vec({0.0})}, {0.0, 1.0}, {vec({0.0}), vec({0.0})}), SchemaError);
  CHECK_THROWS_AS(Jet::make(1, {vec({NAN})}, {0.0}, {vec({0.0})}), SchemaError);
  CHECK_THROWS_AS(Jet::make(1, {}, {}, {}), SchemaError);
  CHECK_THROWS_AS(Jet::make(5, {}, {}, {}), SchemaError);
}

TEST_CASE("check_W examples") {
  const Modulus h = Modulus::holder(0.5);
  const Jet single = Jet::make(2, {vec({0.3, 0.1})}, {1.0}, {vec({2.0, -1.0})});
  const CheckReport r1 = check_W(single, h, 1.0);
  CHECK(r1.passed);
  CHECK(r1.worst_slack == 0.0);

  const Jet aff = affine(2, 5, 3);
  CHECK(check_W(aff, h, 0.7).passed);
  CHECK(check_W(aff, h, 0.7).worst_slack >= -1e-12);

  // E = {-1, 1}: slack(M) = M phi(2) - 2 M phi*(1/M) = (4 sqrt2 / 3) M - 2 / (3 M^2),
  // zero at M = 1/sqrt(2).
  const Jet j = holder_pair();
  CHECK(check_W(j, h, 1.5).passed);
  CHECK(check_W(j, h, 0.71).passed);
  CHECK_FALSE(check_W(j, h, 0.70).passed);
  const CheckReport fail = check_W(j, h, 0.5);
  CHECK(fail.worst_slack == doctest::Approx(4.0 * std::sqrt(2.0) / 3.0 * 0.5 - 2.0 / (3.0 * 0.25)));
  CHECK(fail.witness.size() >= 2);
}

TEST_CASE("check_wells_W11 examples") {
  const Jet single = Jet::make(1, {vec({0.0})}, {3.0}, {vec({1.0})});
  CHECK(check_wells_W11(single, 1.0).passed);
  const Jet flat = Jet::make(1, {vec({0.0}), vec({1.0})}, {0.0, 0.0}, {vec({0.0}), vec({0.0})});
  const CheckReport r = check_wells_W11(flat, 1.0);
  CHECK(r.passed);
  CHECK(oracle::wells_slack(flat, 1.0) == doctest::Approx(0.0));  // y = z pairs
  const Jet step = Jet::make(1, {vec({0.0}), vec({1.0})}, {0.0, 1.0}, {vec({0.0}), vec({0.0})});
  const CheckReport s = check_wells_W11(step, 1.0);
  CHECK_FALSE(s.passed);
  CHECK(s.worst_slack == doctest::Approx(-0.75));
  CHECK(s.worst_slack == doctest::Approx(oracle::wells_slack(step, 1.0)));
}

TEST_CASE("check_mg examples") {
  const Modulus h = Modulus::holder(0.5);
  CHECK(check_mg(affine(2, 4, 9), h, 0.3).passed);
  CHECK(check_mg(affine(3, 3, 10), Modulus::linear(1.0), 0.3).passed);
  const Jet single = Jet::make(1, {vec({0.0})}, {3.0}, {vec({1.0})});
  CHECK(check_mg(single, h, 1.0).passed);
  // Brute force over a dense x sweep gives the same sign.
  const Jet step = Jet::make(1, {vec({0.0}), vec({1.0})}, {0.0, 1.0}, {vec({0.0}), vec({0.0})});
  const Modulus lin = Modulus::linear(1.0);
  CHECK_FALSE(check_mg(step, lin, 1.0).passed);
  CHECK(oracle::mg_min_sweep_1d(step, lin, 1.0, 8.0, 200000) < 0.0);
  CHECK(check_mg(step, lin, 4.5).passed);
  CHECK(oracle::mg_min_sweep_1d(step, lin, 4.5, 8.0, 200000) >= -1e-9);
}

TEST_CASE("check_mg agrees with the Wells closed form on random 1-D pairs") {
  const Modulus lin = Modulus::linear(1.0);
  int agree = 0;
  for (int k = 0; k < 100; ++k) {
    const Jet j = oracle::random_jet(1, 2, 100 + k);
    CounterRng rng(77, k);
    const double M = std::exp(rng.uniform(-2.0, 2.5));
    const bool w = oracle::wells_slack(j, M) >= -1e-9;
    agree += check_mg(j, lin, M).passed == w;
  }
  CHECK(agree == 100);
}

TEST_CASE("compute_A examples") {
  const Modulus h = Modulus::holder(0.5);
  CHECK(compute_A(affine(1, 4, 4), h).constant < 1e-12);
  CHECK(compute_A(affine(3, 5, 5), Modulus::linear(1.0)).constant < 1e-9);
  for (int k = 0; k < 5; ++k) {
    const Jet j = oracle::random_jet(1, 2, 300 + k);
    const double B = 4.0 * j.diameter();
    const double sweep = oracle::A_sweep_1d(j, h, B, 1000000);
    CHECK(compute_A(j, h).constant == doctest::Approx(sweep).epsilon(1e-4));
  }
}

TEST_CASE("m_omega_G examples") {
  const Modulus h = Modulus::holder(0.5);
  CHECK(m_omega_G(affine(2, 4, 6), h).constant == 0.0);
  std::vector<Vec> p, g;
  std::vector<double> f;
  for (int i = 0; i <= 40; ++i) {
    const double x = -1.0 + i / 20.0;
    p.push_back(vec({x}));
    f.push_back(2.0 / 3.0 * std::pow(std::abs(x), 1.5));
    g.push_back(vec({std::copysign(std::sqrt(std::abs(x)), x)}));
  }
  const Jet dense = Jet::make(1, p, f, g);
  CHECK(std::abs(m_omega_G(dense, h).constant - std::sqrt(2.0)) < 1e-6);
  CHECK(m_omega_G(dense, h).constant == doctest::Approx(oracle::m_omega_pairs(dense, h)));
  const Jet two = Jet::make(1, {vec({0.0}), vec({4.0})}, {0.0, 0.0}, {vec({0.0}), vec({3.0})});
  CHECK(m_omega_G(two, Modulus::linear(1.0)).constant == doctest::Approx(0.75));
}

TEST_CASE("check_equivalences examples") {
  const Modulus h = Modulus::holder(0.5);
  const CheckReport aff = check_equivalences(affine(2, 4, 8), h);
  CHECK(aff.passed);
  CHECK(aff.detail("M_W") == 0.0);
  CHECK(aff.detail("M_mg") == 0.0);
  CHECK(aff.detail("M_omega_G") == 0.0);

  std::vector<Vec> p, g;
  std::vector<double> f;
  for (int i = 0; i <= 20; ++i) {
    const double x = -1.0 + i / 10.0;
    p.push_back(vec({x}));
    f.push_back(2.0 / 3.0 * std::pow(std::abs(x), 1.5));
    g.push_back(vec({std::copysign(std::sqrt(std::abs(x)), x)}));
  }
  const CheckReport r = check_equivalences(Jet::make(1, p, f, g), h);
  CHECK(r.passed);
  CHECK(r.detail("M_omega_G") == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.detail("M_mg") <= 1.3066 + 1e-3);
  CHECK(r.detail("M_mg") == doctest::Approx(r.detail("A")).epsilon(1e-5));
  CHECK(r.detail("M_omega_G") <= 8.0 / std::sqrt(15.0) * r.detail("M_mg"));
}

TEST_CASE("property: W and mg are monotone in M") {
  const Modulus h = Modulus::holder(0.5);
  for (int k = 0; k < 10; ++k) {
    const Jet j = oracle::random_jet(2, 4, 400 + k);
    bool w_prev = false, mg_prev = false;
    for (double M = 0.05; M < 50.0; M *= 1.6) {
      const bool w = check_W(j, h, M).passed, mg = check_mg(j, h, M).passed;
      CHECK((!w_prev || w));
      CHECK((!mg_prev || mg));
      w_prev = w;
      mg_prev = mg;
    }
  }
}

TEST_CASE("property: A is the smallest mg constant") {
  for (const Modulus& m : {Modulus::holder(0.5), Modulus::linear(1.0)}) {
    for (int k = 0; k < 6; ++k) {
      const Jet j = oracle::random_jet(k % 2 + 1, 4, 500 + k);
      const double A = compute_A(j, m).constant;
      const ThresholdResult t = smallest_constant([&](double M) { return check_mg(j, m, M).passed; });
      REQUIRE(t.found);
      CHECK(t.value == doctest::Approx(A).epsilon(1e-5));
    }
  }
}

TEST_CASE("property: A scales linearly with the jet") {
  const Modulus h = Modulus::holder(0.5);
  for (int k = 0; k < 4; ++k) {
    const Jet j = oracle::random_jet(2, 4, 600 + k);
    const double A = compute_A(j, h).constant;
    for (double s : {0.5, 2.0, 10.0}) {
      Jet js = j;
      for (auto& v : js.values) v *= s;
      for (auto& g : js.gradients) g *= s;
      CHECK(compute_A(js, h).constant == doctest::Approx(s * A).epsilon(1e-6));
    }
  }
}

TEST_CASE("property: restricting a jet does not increase A") {
  const Modulus h = Modulus::holder(0.5);
  for (int k = 0; k < 4; ++k) {
    const Jet big = oracle::smooth_jet(2, 7, 700 + k);
    Jet small = big;
    small.points.resize(4);
    small.values.resize(4);
    small.gradients.resize(4);
    CHECK(compute_A(small, h).constant <= compute_A(big, h).constant * (1.0 + 1e-6));
  }
}

TEST_CASE("property: reports are independent of the worker count") {
  const Jet j = oracle::random_jet(2, 6, 800);
  const Modulus h = Modulus::holder(0.5);
  const CheckReport a = compute_A(j, h);
  setenv("JETX_THREADS", "1", 1);
  const CheckReport b = compute_A(j, h);
  unsetenv("JETX_THREADS");
  CHECK(a.constant == b.constant);
}
