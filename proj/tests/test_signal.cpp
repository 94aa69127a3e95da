#include "phasecut/signal.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace phasecut;

TEST_SUITE("signal") {

TEST_CASE("make_image validates real nonnegative flag") {
  Eigen::MatrixXcd good(2, 2);
  good << 1.0, 0.0, 2.5, 0.25;
  CHECK(make_image(good, true).real_nonneg);

  Eigen::MatrixXcd negative = good;
  negative(0, 0) = -1.0;
  CHECK_THROWS_AS(make_image(negative, true), std::invalid_argument);

  Eigen::MatrixXcd complex_entry = good;
  complex_entry(1, 1) = {0.0, 0.5};
  CHECK_THROWS_AS(make_image(complex_entry, true), std::invalid_argument);
  CHECK_NOTHROW(make_image(complex_entry, false));

  CHECK_THROWS_AS(make_image(Eigen::MatrixXcd::Zero(2, 3), false),
                  std::invalid_argument);
}

TEST_CASE("make_masks structure") {
  const MaskSet set = make_masks(3, 8, 2, 42);
  REQUIRE(set.masks.size() == 3);
  CHECK(set.masks[0].isOnes());
  for (int l = 1; l < 3; ++l) {
    const Eigen::MatrixXd& m = set.masks[l];
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        CHECK((m(r, c) == 0.0 || m(r, c) == 1.0));
        // block-constant at resolution 2
        CHECK(m(r, c) == m(r - r % 2, c - c % 2));
      }
  }
  // every pixel covered thanks to mask 0
  Eigen::MatrixXd cover = Eigen::MatrixXd::Zero(8, 8);
  for (const auto& m : set.masks) cover += m;
  CHECK((cover.array() > 0.0).all());
}

TEST_CASE("make_masks determinism and seed sensitivity") {
  const MaskSet a = make_masks(4, 16, 1, 7);
  const MaskSet b = make_masks(4, 16, 1, 7);
  const MaskSet c = make_masks(4, 16, 1, 8);
  bool same_ab = true, same_ac = true;
  for (int l = 0; l < 4; ++l) {
    same_ab = same_ab && a.masks[l] == b.masks[l];
    same_ac = same_ac && a.masks[l] == c.masks[l];
  }
  CHECK(same_ab);
  CHECK_FALSE(same_ac);
  CHECK_THROWS_AS(make_masks(2, 8, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_masks(0, 8, 1, 0), std::invalid_argument);
}

TEST_CASE("make_observations validates length and sign") {
  CHECK_NOTHROW(make_observations(2, 2, 1, Eigen::VectorXd::Ones(8)));
  CHECK_THROWS_AS(make_observations(2, 2, 1, Eigen::VectorXd::Ones(7)),
                  std::invalid_argument);
  Eigen::VectorXd neg = Eigen::VectorXd::Ones(8);
  neg[3] = -0.1;
  CHECK_THROWS_AS(make_observations(2, 2, 1, neg), std::invalid_argument);
}

TEST_CASE("phase vectors") {
  Eigen::VectorXcd v(3);
  v << std::complex<double>(0.0, 1.0), std::complex<double>(-1.0, 0.0),
      std::complex<double>(0.6, 0.8);
  CHECK_NOTHROW(make_phase_vector(v));
  v[2] = {0.6, 0.7};
  CHECK_THROWS_AS(make_phase_vector(v), std::invalid_argument);

  Eigen::VectorXcd raw(3);
  raw << std::complex<double>(3.0, 4.0), std::complex<double>(0.0, 0.0),
      std::complex<double>(0.0, -2.0);
  const PhaseVector u = normalize_phases(raw);
  CHECK(std::abs(u.values[0] - std::complex<double>(0.6, 0.8)) < 1e-15);
  CHECK(u.values[1] == std::complex<double>(1.0, 0.0)); // zero maps to 1
  CHECK(std::abs(u.values[2] - std::complex<double>(0.0, -1.0)) < 1e-15);
}

TEST_CASE("select_support picks largest entries, ties to lowest index") {
  Eigen::VectorXd b(6);
  b << 1.0, 5.0, 3.0, 5.0, 0.5, 3.0;
  const SupportSelection s = select_support(b, 3);
  CHECK(s.indices == std::vector<int>{1, 2, 3}); // 5,5,3(first of tie), sorted
  CHECK_THROWS_AS(select_support(b, 0), std::invalid_argument);
  CHECK_THROWS_AS(select_support(b, 7), std::invalid_argument);
}

TEST_CASE("align_global_phase removes a global rotation") {
  Rng rng(3);
  const Eigen::MatrixXcd ref = testutil::random_complex(5, 5, rng);
  const std::complex<double> rot = std::polar(1.0, 1.234);
  const ComplexImage ref_img = make_image(ref);
  const ComplexImage rotated = make_image(rot * ref);
  const auto [aligned, residual] = align_global_phase(rotated, ref_img);
  CHECK(residual < 1e-24);
  CHECK((aligned.values - ref).norm() < 1e-12);
}

} // TEST_SUITE
