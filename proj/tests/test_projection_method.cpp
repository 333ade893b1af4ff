#include <doctest.h>

#include <algorithm>

#include "consensus/projection_method.hpp"
#include "support/fixtures.hpp"

using namespace consensus;
using namespace consensus::testing;

TEST_CASE("analyze Example 1") {
  const auto a = analyze(example1());
  require_close(a.alpha, example1_alpha(), 1e-9);
  require_close(a.alpha_from_z, example1_alpha(), 1e-9);
  require_close(a.p_inf.matrix, example1_limit(), 1e-9);
  require_close(a.s.s, example1_projector(), 1e-9);
  for (std::size_t r = 0; r < 7; ++r) require_close(a.p_hat.row(r), example1_alpha(), 1e-9);
  CHECK(a.spectral.kind == SpectralKind::ProperNotRegular);
  REQUIRE(a.class_stationary.size() == 2);
  require_close(a.class_stationary[0], Vector{0.4, 0.4, 0.2}, 1e-9);
  require_close(a.class_stationary[1], Vector{0.4, 0.6}, 1e-9);
  CHECK(a.tree_sources == std::vector<TreeWeightSource>{TreeWeightSource::Enumeration,
                                                        TreeWeightSource::Enumeration});
}

TEST_CASE("analyze trivial cases") {
  const auto id = analyze(validate_stochastic(DenseMatrix::identity(2)));
  require_close(id.alpha, Vector{0.5, 0.5}, 1e-12);

  const DenseMatrix regular{{0.5, 0.5}, {0.25, 0.75}};
  const auto r = analyze(validate_stochastic(regular));
  require_close(r.alpha, Vector{1.0 / 3, 2.0 / 3}, 1e-12);
  require_close(r.p_hat, r.p_inf.matrix, 1e-12);
  require_close(r.s.s, DenseMatrix::identity(2), 1e-12);
}

TEST_CASE("analyze rejects periodic matrices") {
  CHECK_THROWS_AS(analyze(validate_stochastic(DenseMatrix{{0, 1}, {1, 0}})), ImproperMatrix);
}

TEST_CASE("beta weights") {
  const auto a = analyze(example1());
  REQUIRE(a.beta.size() == 2);
  CHECK(a.beta[0] == doctest::Approx(25.0 / 9));
  CHECK(a.beta[1] == doctest::Approx(25.0 / 13));
  // alpha_1 / alpha_4 = (beta_1 * 0.4) / (beta_2 * 0.4) = 13/9 = 26/18.
  CHECK(a.alpha[0] / a.alpha[3] == doctest::Approx(26.0 / 18));
  CHECK((a.beta[0] * 0.4) / (a.beta[1] * 0.4) == doctest::Approx(26.0 / 18));

  TreeWeights tw;
  tw.classes.push_back({{0, 1}, 0.5, {0.2, 0.3}, 0.26});
  CHECK(beta_weights(tw)[0] == doctest::Approx(25.0 / 13));
}

TEST_CASE("enumeration falls back to cofactors above the cap") {
  const auto a = analyze(example1(), {}, 2);
  CHECK(a.tree_sources == std::vector<TreeWeightSource>{TreeWeightSource::Cofactors,
                                                        TreeWeightSource::Enumeration});
  CHECK(a.beta[0] == doctest::Approx(25.0 / 9));
}

TEST_CASE("preequalize") {
  const auto a = analyze(example1());
  SUBCASE("vectors in the consensus region are unchanged") {
    const Vector inside = a.kirchhoff.entries.column(2);
    require_close(preequalize(a, inside), inside, 1e-12);
    require_close(preequalize(a, Vector(7, 1.0)), Vector(7, 1.0), 1e-12);
  }
  SUBCASE("nonbasic components are kept") {
    const Vector s0{1, 2, 3, 4, 5, 6, 7};
    const Vector pre = preequalize(a, s0);
    CHECK(pre[5] == doctest::Approx(6.0));
    CHECK(pre[6] == doctest::Approx(7.0));
  }
  SUBCASE("both modes reach the same consensus") {
    const Vector s0{0.3, -1, 2, 5, 0, 1, 1};
    const Vector a1 = a.p_inf.matrix * preequalize(a, s0, PreequalizationMode::Orthogonal);
    const Vector a2 = a.p_inf.matrix * preequalize(a, s0, PreequalizationMode::Tilde);
    require_close(a1, a2, 1e-9);
  }
  SUBCASE("length is checked") {
    CHECK_THROWS_AS(preequalize(a, Vector{1, 2}), Error);
  }
}

TEST_CASE("simulate") {
  const auto p = example1();
  const auto a = analyze(p);
  SUBCASE("Example 1 with s0 = 1..7") {
    const Vector s0{1, 2, 3, 4, 5, 6, 7};
    const auto traj = simulate(p, a, s0);
    CHECK(traj.consensus == doctest::Approx(324.0 / 110).epsilon(1e-9));
    CHECK(traj.initial == s0);
    CHECK(traj.states.size() == traj.converged_at + 1);
    // The spread never grows.
    double last = 1e300;
    for (const auto& st : traj.states) {
      const auto [lo, hi] = std::minmax_element(st.begin(), st.end());
      CHECK(*hi - *lo <= last + 1e-15);
      last = *hi - *lo;
    }
    for (std::size_t k = 1; k < traj.states.size(); ++k)
      require_close(traj.states[k], p.matrix() * traj.states[k - 1], 0.0);
  }
  SUBCASE("consensus input converges immediately") {
    const auto traj = simulate(p, a, Vector(7, 1.0));
    CHECK(traj.consensus == doctest::Approx(1.0));
    CHECK(traj.converged_at == 0);
  }
  SUBCASE("without preequalization the spread stalls") {
    ToleranceConfig tol;
    tol.max_iter = 2000;
    CHECK_THROWS_AS(degroot_iterate(p, Vector{1, 1, 1, 0, 0, 0, 0}, tol), NoConvergence);
  }
}

TEST_CASE("consensus_value") {
  const auto a = analyze(example1());
  Vector e6(7, 0.0);
  e6[5] = 1.0;
  CHECK(consensus_value(a, e6) == doctest::Approx(0.0));
  CHECK(consensus_value(a, Vector(7, 1.0)) == doctest::Approx(1.0));
  CHECK(consensus_value(a, Vector{1, 2, 3, 4, 5, 6, 7}) == doctest::Approx(324.0 / 110));
}
