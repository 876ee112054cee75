#include <doctest.h>

#include <cmath>
#include <vector>

#include "wbary/errors.hpp"
#include "wbary/onedim.hpp"
#include "wbary/rng.hpp"

using namespace wbary;

namespace {

Empirical1D uniform_atoms(std::vector<double> atoms) {
  const size_t n = atoms.size();
  return Empirical1D(std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Empirical1D random_empirical(uint64_t seed, int n) {
  RngState rng(seed);
  std::vector<double> atoms(static_cast<size_t>(n));
  for (double& a : atoms) a = rng.next_normal();
  return uniform_atoms(std::move(atoms));
}

// Grid of a normal law: values are sigma * Phi^-1(level) + mu.
QuantileGrid normal_grid(double mu, double sigma, int m) {
  std::vector<double> v(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) v[static_cast<size_t>(i)] = mu + sigma * normal_quantile((i + 0.5) / m);
  return QuantileGrid(std::move(v));
}

}  // namespace

TEST_CASE("empirical measures sort atoms and validate weights") {
  Empirical1D e({3.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
  CHECK(e.atoms() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(e.weights() == std::vector<double>{0.3, 0.5, 0.2});
  CHECK(e.cumulative().back() == 1.0);

  CHECK_THROWS_AS(Empirical1D({1.0}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Empirical1D({1.0, 2.0}, {1.2, -0.2}), std::invalid_argument);
  CHECK_THROWS_AS(Empirical1D({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Empirical1D({1.0, 2.0}, {0.5}), std::invalid_argument);
}

TEST_CASE("empirical quantiles step at cumulative weights") {
  Empirical1D e({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
  CHECK(e.quantile(0.1) == 0.0);
  CHECK(e.quantile(0.2) == 0.0);
  CHECK(e.quantile(0.5) == 1.0);   // cumulative hits 0.5 exactly at the second atom
  CHECK(e.quantile(0.50001) == 2.0);
  CHECK(e.quantile(0.999) == 2.0);
  CHECK_THROWS_AS(e.quantile(0.0), OutOfRangeError);
  CHECK_THROWS_AS(e.quantile(1.0), OutOfRangeError);

  CHECK(e.mean() == doctest::Approx(0.2 * 0.0 + 0.3 * 1.0 + 0.5 * 2.0).epsilon(1e-15));
  CHECK(e.variance() == doctest::Approx(0.3 + 4.0 * 0.5 - 1.3 * 1.3).epsilon(1e-12));
}

TEST_CASE("quantile grids use midpoint levels") {
  QuantileGrid g({1.0, 2.0, 3.0, 4.0});
  CHECK(g.level(0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(g.quantile(0.1) == 1.0);
  CHECK(g.quantile(0.26) == 2.0);
  CHECK(g.quantile(0.75) == 3.0);  // ceil(0.75 * 4) - 1 = 2
  CHECK(g.quantile(0.99) == 4.0);

  // evaluating at the grid's own levels returns the stored values bit for bit
  for (int i = 0; i < g.size(); ++i) CHECK(g.quantile(g.level(i)) == g.values()[static_cast<size_t>(i)]);

  CHECK_THROWS_AS(QuantileGrid({2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(QuantileGrid({}), std::invalid_argument);
  CHECK_THROWS_AS(g.quantile(0.0), OutOfRangeError);

  Empirical1D e = g.as_empirical();
  double sum = 0.0;
  for (double w : e.weights()) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.atoms() == g.values());
}

TEST_CASE("exact 1d distance on merged breakpoints") {
  Empirical1D a = uniform_atoms({0.0, 1.0});
  Empirical1D b = uniform_atoms({0.0, 3.0});
  CHECK(w2_1d(a, a) == 0.0);
  CHECK(w2_1d(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(w2_1d(b, a) == doctest::Approx(w2_1d(a, b)).epsilon(1e-15));

  // deltas: distance equals the atom gap
  Empirical1D d0({0.0}, {1.0});
  Empirical1D d1({1.0}, {1.0});
  CHECK(w2_1d(d0, d1) == doctest::Approx(1.0).epsilon(1e-15));

  // hand-computed asymmetric-weight case
  Empirical1D p({0.0, 2.0}, {0.25, 0.75});
  Empirical1D q({1.0}, {1.0});
  CHECK(w2_1d(p, q) == doctest::Approx(1.0).epsilon(1e-14));

  // translation invariance of the shape term
  Empirical1D shifted({0.0 + 2.5, 1.0 + 2.5}, {0.5, 0.5});
  CHECK(w2_1d(a, shifted) == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("1d distance between gaussian grids approaches the sigma gap") {
  const int m = 2000;
  Measure1D p = normal_grid(0.0, 1.0, m);
  Measure1D q = normal_grid(0.0, 2.0, m);
  CHECK(std::fabs(w2_1d(p, q) - 1.0) <= 5.0 / m);
}

TEST_CASE("averaged-quantile operator and 1d barycenter") {
  SUBCASE("identical measures reproduce their own grid") {
    QuantileGrid g({-1.0, 0.0, 2.0, 5.0});
    Problem1D prob({Measure1D(g), Measure1D(g)}, {0.5, 0.5});
    QuantileGrid out = g_operator_1d(Measure1D(g), prob, g.size());
    CHECK(out.values() == g.values());
  }
  SUBCASE("applying the operator to its own output changes nothing") {
    Problem1D prob({Measure1D(random_empirical(60, 5)), Measure1D(random_empirical(61, 4))},
                   {0.4, 0.6});
    QuantileGrid bary = barycenter_1d(prob, 64);
    Problem1D again({Measure1D(bary)}, {1.0});
    QuantileGrid twice = barycenter_1d(again, 64);
    CHECK(twice.values() == bary.values());
  }
  SUBCASE("two deltas average their positions") {
    Problem1D prob({Measure1D(Empirical1D({0.0}, {1.0})), Measure1D(Empirical1D({2.0}, {1.0}))},
                   {0.5, 0.5});
    QuantileGrid out = barycenter_1d(prob, 5);
    for (double v : out.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("gaussian mixture of quantiles matches the weighted closed form") {
    const int m = 100;
    Problem1D prob({Measure1D(normal_grid(0.0, 1.0, m)), Measure1D(normal_grid(0.0, 2.0, m))},
                   {0.5, 0.5});
    QuantileGrid out = barycenter_1d(prob, m);
    for (int i = 0; i < m; ++i) {
      const double expect = 1.5 * normal_quantile((i + 0.5) / m);
      CHECK(out.values()[static_cast<size_t>(i)] == doctest::Approx(expect).epsilon(1e-13));
    }
  }
  SUBCASE("an atom example") {
    Empirical1D e = uniform_atoms({1.0, 3.0});
    Problem1D prob({Measure1D(e), Measure1D(e)}, {0.5, 0.5});
    QuantileGrid out = barycenter_1d(prob, 2);
    CHECK(out.values() == std::vector<double>{1.0, 3.0});
  }
}

TEST_CASE("1d objective sums weighted squared distances") {
  Measure1D a{random_empirical(70, 4)};
  Measure1D b{random_empirical(71, 5)};
  Problem1D prob({a, b}, {0.3, 0.7});
  Measure1D mu{random_empirical(72, 3)};
  const double direct = 0.3 * w2_1d(mu, a) * w2_1d(mu, a) + 0.7 * w2_1d(mu, b) * w2_1d(mu, b);
  CHECK(v_functional_1d(mu, prob) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("brute force multimarginal on tiny instances") {
  SUBCASE("hand-checked two-measure case") {
    MultimarginalResult r =
        brute_force_multimarginal({uniform_atoms({0.0, 1.0}), uniform_atoms({0.0, 3.0})},
                                  {0.5, 0.5});
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.barycenter.atoms()[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.barycenter.atoms()[1] == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("identical measures cost nothing") {
    Empirical1D e = uniform_atoms({-1.0, 0.5, 2.0});
    MultimarginalResult r = brute_force_multimarginal({e, e}, {0.5, 0.5});
    CHECK(r.value <= 1e-15);
    CHECK(r.barycenter.atoms() == e.atoms());
  }
  SUBCASE("size guards") {
    CHECK_THROWS_AS(brute_force_multimarginal(
                        {random_empirical(80, 7), random_empirical(81, 7)}, {0.5, 0.5}),
                    TooLargeError);
    CHECK_THROWS_AS(brute_force_multimarginal({random_empirical(82, 2), random_empirical(83, 2),
                                               random_empirical(84, 2), random_empirical(85, 2)},
                                              {0.25, 0.25, 0.25, 0.25}),
                    TooLargeError);
    CHECK_THROWS_AS(brute_force_multimarginal(
                        {Empirical1D({0.0, 1.0}, {0.3, 0.7}), uniform_atoms({0.0, 1.0})},
                        {0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(brute_force_multimarginal(
                        {uniform_atoms({0.0}), uniform_atoms({0.0, 1.0})}, {0.5, 0.5}),
                    std::invalid_argument);
  }
}

TEST_CASE("brute force agrees with the quantile barycenter") {
  for (uint64_t s = 0; s < 30; ++s) {
    const int n = 2 + static_cast<int>(s % 5);
    Empirical1D a = random_empirical(900 + 2 * s, n);
    Empirical1D b = random_empirical(901 + 2 * s, n);
    MultimarginalResult brute = brute_force_multimarginal({a, b}, {0.5, 0.5});

    Problem1D prob({Measure1D(a), Measure1D(b)}, {0.5, 0.5});
    QuantileGrid grid = barycenter_1d(prob, n);
    for (int i = 0; i < n; ++i)
      CHECK(std::fabs(grid.values()[static_cast<size_t>(i)] -
                      brute.barycenter.atoms()[static_cast<size_t>(i)]) <= 1e-12);
    CHECK(std::fabs(v_functional_1d(Measure1D(grid), prob) - brute.value) <= 1e-12);
  }
}

TEST_CASE("three-measure brute force agrees with the quantile barycenter") {
  for (uint64_t s = 0; s < 6; ++s) {
    const int n = 3;
    Empirical1D a = random_empirical(950 + 3 * s, n);
    Empirical1D b = random_empirical(951 + 3 * s, n);
    Empirical1D c = random_empirical(952 + 3 * s, n);
    std::vector<double> w = {1.0 / 3.0, 1.0 / 3.0, 1.0 - 2.0 / 3.0};
    MultimarginalResult brute = brute_force_multimarginal({a, b, c}, w);
    Problem1D prob({Measure1D(a), Measure1D(b), Measure1D(c)}, w);
    QuantileGrid grid = barycenter_1d(prob, n);
    for (int i = 0; i < n; ++i)
      CHECK(std::fabs(grid.values()[static_cast<size_t>(i)] -
                      brute.barycenter.atoms()[static_cast<size_t>(i)]) <= 1e-12);
    CHECK(std::fabs(v_functional_1d(Measure1D(grid), prob) - brute.value) <= 1e-12);
  }
}

TEST_CASE("normal quantile function") {
  CHECK(std::fabs(normal_quantile(0.5)) <= 1e-9);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(5e-9));
  CHECK(normal_quantile(0.8413447460685429) == doctest::Approx(1.0).epsilon(5e-9));
  CHECK(std::fabs(normal_quantile(0.3) + normal_quantile(0.7)) <= 2e-9);
  CHECK(normal_quantile(0.9999) > normal_quantile(0.999));
  CHECK_THROWS_AS(normal_quantile(0.0), OutOfRangeError);
  CHECK_THROWS_AS(normal_quantile(1.0), OutOfRangeError);
}
