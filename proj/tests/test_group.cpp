#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "carnot/calculus.hpp"
#include "carnot/group.hpp"

using namespace carnot;

namespace {

Point random_point(std::mt19937_64& rng, int n, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Point p(n);
  for (auto& v : p) v = dist(rng);
  return p;
}

double max_diff(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("compose examples") {
  const GroupSpec e2 = euclidean_group(2);
  CHECK(max_diff(compose(e2, {1, 2}, {3, 4}), {4, 6}) == 0.0);

  const GroupSpec h = heisenberg_group();
  const Point p{0.7, -1.3, 0.4};
  CHECK(max_diff(compose(h, p, invert(h, p)), {0, 0, 0}) < 1e-14);
  CHECK(max_diff(compose(h, {1, 0, 0}, {0, 1, 0}), {1, 1, 0.5}) < 1e-15);

  CHECK_THROWS_AS(compose(h, {1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("invert examples") {
  const GroupSpec e2 = euclidean_group(2);
  CHECK(max_diff(invert(e2, {1, 2}), {-1, -2}) < 1e-14);

  const GroupSpec h = heisenberg_group();
  CHECK(max_diff(invert(h, {0, 0, 0}), {0, 0, 0}) == 0.0);
  const Point inv = invert(h, {1, 1, 1});
  CHECK(max_diff(inv, {-1, -1, -1}) < 1e-12);
  CHECK(max_diff(compose(h, {1, 1, 1}, inv), {0, 0, 0}) < 1e-14);
}

TEST_CASE("dilation examples") {
  const GroupSpec h = heisenberg_group();
  CHECK(max_diff(dilate(h, 1.0, {0.3, -0.2, 0.9}), {0.3, -0.2, 0.9}) == 0.0);
  CHECK(max_diff(dilate(h, 2.0, {1, 1, 1}), {2, 2, 4}) == 0.0);

  const GroupSpec e3 = euclidean_group(3);
  CHECK(max_diff(dilate(e3, 0.5, {2, 4, 8}), {1, 2, 4}) == 0.0);
  CHECK_THROWS_AS(dilate(e3, 0.0, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(dilate(e3, -1.0, {1, 1, 1}), std::invalid_argument);

  SUBCASE("space-time dilation") {
    const SpaceTimePoint z{{1, 1, 1}, 1.0};
    const SpaceTimePoint w = dilate_st(h, 2.0, z);
    CHECK(max_diff(w.x, {2, 2, 4}) == 0.0);
    CHECK(w.t == 4.0);

    const GroupSpec e1 = euclidean_group(1);
    const SpaceTimePoint v = dilate_st(e1, 3.0, {{1}, 1.0});
    CHECK(v.x[0] == 3.0);
    CHECK(v.t == 9.0);
  }
}

TEST_CASE("space-time composition") {
  const GroupSpec e1 = euclidean_group(1);
  const SpaceTimePoint z{{3}, 4.0};
  const SpaceTimePoint w = compose_st(e1, {{1}, 2.0}, z);
  CHECK(w.x[0] == 4.0);
  CHECK(w.t == 6.0);
  const SpaceTimePoint id = compose_st(e1, {{0}, 0.0}, z);
  CHECK(id.x[0] == 3.0);
  CHECK(id.t == 4.0);

  const GroupSpec h = heisenberg_group();
  const SpaceTimePoint zh{{0.4, -0.7, 1.1}, 0.6};
  const SpaceTimePoint res = compose_st(h, invert_st(h, zh), zh);
  CHECK(max_diff(res.x, {0, 0, 0}) < 1e-15);
  CHECK(res.t == 0.0);
}

TEST_CASE("homogeneous norms") {
  const GroupSpec h = heisenberg_group();
  CHECK(hom_norm(h, {1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hom_norm(h, {0, 0, 1}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hom_norm(h, dilate(h, 2.0, {0, 0, 1})) == doctest::Approx(2.0).epsilon(1e-14));

  const GroupSpec e2 = euclidean_group(2);
  CHECK(hom_norm(e2, {3, 4}) == doctest::Approx(5.0).epsilon(1e-14));

  SUBCASE("space-time norm") {
    const GroupSpec e1 = euclidean_group(1);
    CHECK(hom_norm_st(e1, {{0}, 0.0}) == 0.0);
    CHECK(hom_norm_st(e1, {{0}, 4.0}) == doctest::Approx(2.0).epsilon(1e-14));
    // (||x||^4 + t^2)^{1/4}: the pure-time value at t = 16 is 4, at t = 4 it is 2
    CHECK(hom_norm_st(h, {{0, 0, 0}, 16.0}) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(hom_norm_st(h, {{0, 0, 0}, 4.0}) == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("homogeneous dimension") {
  CHECK(homogeneous_dimension(euclidean_group(3)) == 3);
  CHECK(homogeneous_dimension(heisenberg_group()) == 4);

  GroupSpec twolayer = heisenberg_group();  // synthetic 3+2 layer layout
  twolayer.layer_dims = {3, 2};
  CHECK(homogeneous_dimension(twolayer) == 7);
}

TEST_CASE("flow examples") {
  const GroupSpec e2 = euclidean_group(2);
  CHECK(max_diff(flow(e2, 0, 0.3, {0, 0}), {0.3, 0}) < 1e-14);
  CHECK(max_diff(flow(e2, 0, 0.0, {0.4, 0.5}), {0.4, 0.5}) == 0.0);

  const GroupSpec h = heisenberg_group();
  // along X_1 from the origin y stays 0, so z stays 0
  CHECK(max_diff(flow(h, 0, 1.0, {0, 0, 0}), {1, 0, 0}) < 1e-12);
  CHECK_THROWS_AS(flow(h, 5, 0.1, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("group axioms by sampling") {
  std::mt19937_64 rng(42);
  for (const GroupSpec& spec :
       {euclidean_group(1), euclidean_group(2), euclidean_group(3), heisenberg_group()}) {
    CAPTURE(spec.name);
    double assoc = 0.0, ident = 0.0, inv = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const Point a = random_point(rng, spec.n);
      const Point b = random_point(rng, spec.n);
      const Point c = random_point(rng, spec.n);
      assoc = std::max(assoc, max_diff(compose(spec, compose(spec, a, b), c),
                                       compose(spec, a, compose(spec, b, c))));
      const Point zero(spec.n, 0.0);
      ident = std::max(ident, max_diff(compose(spec, a, zero), a));
      ident = std::max(ident, max_diff(compose(spec, zero, a), a));
      inv = std::max(inv, max_diff(compose(spec, a, invert(spec, a)), zero));
    }
    CHECK(assoc < 1e-12);
    CHECK(ident < 1e-14);
    CHECK(inv < 1e-14);
  }
}

TEST_CASE("dilation is a group automorphism") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  for (const GroupSpec& spec : {euclidean_group(2), heisenberg_group()}) {
    CAPTURE(spec.name);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const Point a = random_point(rng, spec.n);
      const Point b = random_point(rng, spec.n);
      const double l = lam(rng);
      worst = std::max(worst, max_diff(dilate(spec, l, compose(spec, a, b)),
                                       compose(spec, dilate(spec, l, a), dilate(spec, l, b))));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("norm homogeneity") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  for (const GroupSpec& spec : {euclidean_group(3), heisenberg_group()}) {
    CAPTURE(spec.name);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      Point p = random_point(rng, spec.n);
      const double nrm = hom_norm(spec, p);
      if (nrm < 1e-6) continue;
      const double l = lam(rng);
      worst = std::max(worst,
                       std::abs(hom_norm(spec, dilate(spec, l, p)) - l * nrm) / (l * nrm));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("generators are left invariant (finite differences)") {
  const GroupSpec h = heisenberg_group();
  std::mt19937_64 rng(45);
  const double eps = 1e-6;
  double worst = 0.0;
  std::vector<double> coeffs(h.q * h.n), coeffs_at(h.q * h.n);
  for (int s = 0; s < 200; ++s) {
    const Point a = random_point(rng, h.n);
    const Point x = random_point(rng, h.n);
    const Point ax = compose(h, a, x);
    h.field_coeffs(x.data(), coeffs.data());
    h.field_coeffs(ax.data(), coeffs_at.data());
    for (int i = 0; i < h.q; ++i) {
      // pushforward of X_i(x) under tau_a by central differences
      Point xp = x, xm = x;
      for (int k = 0; k < h.n; ++k) {
        xp[k] += eps * coeffs[i * h.n + k];
        xm[k] -= eps * coeffs[i * h.n + k];
      }
      const Point fp = compose(h, a, xp);
      const Point fm = compose(h, a, xm);
      for (int k = 0; k < h.n; ++k) {
        const double push = (fp[k] - fm[k]) / (2.0 * eps);
        worst = std::max(worst, std::abs(push - coeffs_at[i * h.n + k]));
      }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("generator homogeneity of degree one") {
  // X_i(u o delta_l)(x) = l (X_i u)(delta_l x) for a smooth test function
  const GroupSpec h = heisenberg_group();
  const ScalarField u{[](const Point& x, double) {
                        return std::sin(x[0]) * x[1] + std::cos(x[2]) + x[0] * x[2];
                      },
                      Smoothness::analytic};
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> lam(0.3, 3.0);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const Point x = random_point(rng, h.n, -1.0, 1.0);
    const double l = lam(rng);
    const ScalarField ud{[&u, &h, l](const Point& p, double t) {
                           return u(dilate(h, l, p), t);
                         },
                         Smoothness::analytic};
    for (int i = 0; i < h.q; ++i) {
      const double lhs = xdiff(h, ud, i, {x, 0.0}, 1e-5);
      const double rhs = l * xdiff(h, u, i, {dilate(h, l, x), 0.0}, 1e-5);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("flow reversibility") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> step(-1.0, 1.0);
  for (const GroupSpec& spec : {euclidean_group(2), heisenberg_group()}) {
    CAPTURE(spec.name);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
      const Point x = random_point(rng, spec.n);
      const double hstep = step(rng);
      const int i = static_cast<int>(rng() % spec.q);
      worst = std::max(worst, max_diff(flow(spec, i, -hstep, flow(spec, i, hstep, x)), x));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("bracket generation on the Heisenberg group") {
  const GroupSpec h = heisenberg_group();
  std::mt19937_64 rng(48);
  for (int s = 0; s < 20; ++s) {
    const Point x = random_point(rng, h.n);
    CHECK(hormander_rank(h, x, 2, 1e-8) == 3);
  }
  // a single generator does not bracket-generate
  GroupSpec h1 = heisenberg_group();
  h1.q = 1;
  h1.layer_dims = {1, 1, 1};
  h1.field_coeffs = [](const double* x, double* c) {
    c[0] = 1.0; c[1] = 0.0; c[2] = -0.5 * x[1];
  };
  CHECK(hormander_rank(h1, {0.3, 0.2, 0.1}, 2, 1e-8) == 1);
}
