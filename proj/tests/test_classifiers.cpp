#include "doctest.h"

#include <chrono>
#include <cmath>

#include "qdc/classifiers.hpp"
#include "qdc/errors.hpp"
#include "qdc/model_io.hpp"
#include "qdc/rng.hpp"

using namespace qdc;

namespace {

Vector random_unit(std::size_t q, Xoshiro256& rng) {
  Vector v(q);
  for (double& x : v) x = rng.next_gaussian();
  return l2_normalize(v);
}

// Rows are unit vectors, labels cycle through the classes.
std::pair<Matrix, std::vector<int>> random_instance(std::size_t n, std::size_t q, int k,
                                                    Xoshiro256& rng) {
  Matrix x(n, q);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector v = random_unit(q, rng);
    std::copy(v.begin(), v.end(), x.row(i));
    labels[i] = static_cast<int>(i % static_cast<std::size_t>(k)) + 1;
  }
  return {std::move(x), std::move(labels)};
}

Dataset two_orthogonal_classes() {
  Dataset d;
  d.features = Matrix::from_rows({{2.0, 0.0}, {3.0, 0.0}, {0.0, 1.0}, {0.0, 5.0}});
  d.labels = {1, 1, 2, 2};
  d.class_count = 2;
  return d;
}

// Direct square-root measurement of the tensored pure states; the
// reference path for the Gram-based scorer.
Povm direct_pgm_of_rows(const Matrix& x, const std::vector<int>& labels, std::size_t m,
                        double rel_threshold) {
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Vector xi(x.row(i), x.row(i) + x.cols());
    if (m > 1) xi = tensor_power(xi, m);
    states.push_back(to_density(xi));
  }
  return pgm(class_centroids(states, labels), rel_threshold);
}

}  // namespace

TEST_CASE("pgm classifier on orthogonal classes is projective") {
  const ClassifierModel model = fit(ClassifierKind::PgmC, two_orthogonal_classes(), {});
  REQUIRE(model.povm.has_value());
  model.povm->validate();
  CHECK(model.povm->elements[0](0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(model.povm->elements[1](1, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(predict(model, {7.0, 0.0}) == 1);
  CHECK(predict(model, {0.0, 0.2}) == 2);
}

TEST_CASE("sdp classifier reaches success probability one on orthogonal classes") {
  FitOptions opt;
  opt.sdp_tol = 1e-7;
  const ClassifierModel model = fit(ClassifierKind::SdpC, two_orthogonal_classes(), opt);
  CHECK(model.fit_report.objective_value == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("ridge classifier separates 1d classes at tiny penalty") {
  Dataset d;
  d.features = Matrix::from_rows({{-2.0}, {-1.8}, {1.8}, {2.0}});
  d.labels = {1, 1, 2, 2};
  d.class_count = 2;
  FitOptions opt;
  opt.normalization = NormalizationKind::None;
  opt.ridge_lambda = 1e-6;
  const ClassifierModel model = fit(ClassifierKind::RidgeC, d, opt);
  CHECK(predict(model, {-1.9}) == 1);
  CHECK(predict(model, {1.9}) == 2);
}

TEST_CASE("scores follow the documented conventions") {
  // Projective measurement scores.
  const ClassifierModel povm_model = fit(ClassifierKind::PgmC, two_orthogonal_classes(), {});
  const Vector s = scores(povm_model, {1.0, 0.0});
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s[1] == doctest::Approx(0.0));

  // Nearest-centroid scores are negated distances: zero is maximal.
  const ClassifierModel qnc = fit(ClassifierKind::QncC, two_orthogonal_classes(), {});
  const Vector qs = scores(qnc, {1.0, 0.0});
  CHECK(qs[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(qs[1] < qs[0]);
  CHECK(predict(qnc, {1.0, 0.0}) == 1);
}

TEST_CASE("argmax tie-break picks the smallest class") {
  CHECK(argmax_label({0.2, 0.8}) == 2);
  CHECK(argmax_label({0.5, 0.5}) == 1);
  CHECK(argmax_label({0.1, 0.4, 0.4}) == 2);
}

TEST_CASE("predict on an overlapping pair recovers the two-state optimum") {
  // Overlap 0.6, equal priors: by symmetry each state is identified with
  // probability (1 + sqrt(1 - 0.36)) / 2 = 0.9 (certified by the rotation
  // oracle in the measurement tests).
  const double c = 0.6;
  Dataset d;
  d.features = Matrix::from_rows({{1.0, 0.0}, {c, std::sqrt(1.0 - c * c)}});
  d.labels = {1, 2};
  d.class_count = 2;
  const ClassifierModel model = fit(ClassifierKind::PgmC, d, {});
  const Vector s = scores(model, {1.0, 0.0});
  CHECK(predict(model, {1.0, 0.0}) == 1);
  CHECK(s[0] == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("prediction is invariant under increasing score maps") {
  Xoshiro256 rng(113);
  for (int t = 0; t < 200; ++t) {
    Vector s(3);
    for (double& v : s) v = rng.uniform(0.0, 1.0);
    const int before = argmax_label(s);
    Vector mapped(3);
    for (std::size_t i = 0; i < 3; ++i) mapped[i] = 2.5 * s[i] + 0.75;
    CHECK(argmax_label(mapped) == before);
  }
}

TEST_CASE("kpgm_fit on an orthonormal training set gives the identity") {
  Matrix x = Matrix::identity(4);
  const std::vector<int> labels = {1, 1, 2, 2};
  const KernelPgmModel model = kpgm_fit(x, labels, 1);
  CHECK((model.g_inv_sqrt.mat() - Matrix::identity(4)).frobenius_norm() < 1e-9);

  // A training vector scores one for its own class.
  const Vector s = kpgm_scores(model, {1.0, 0.0, 0.0, 0.0});
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s[1] == doctest::Approx(0.0));

  // Orthogonal to the whole training set: all scores vanish.
  Matrix x3(2, 3, 0.0);
  x3(0, 0) = 1.0;
  x3(1, 1) = 1.0;
  const KernelPgmModel m3 = kpgm_fit(x3, {1, 2}, 1);
  const Vector zero_scores = kpgm_scores(m3, {0.0, 0.0, 1.0});
  CHECK(zero_scores[0] == doctest::Approx(0.0));
  CHECK(zero_scores[1] == doctest::Approx(0.0));
}

TEST_CASE("kpgm tolerates duplicated training vectors") {
  Matrix x(3, 2);
  x(0, 0) = 1.0;
  x(1, 0) = 1.0;  // duplicate
  x(2, 1) = 1.0;
  const KernelPgmModel model = kpgm_fit(x, {1, 1, 2}, 1);
  const Vector s = kpgm_scores(model, {1.0, 0.0});
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("kernel scores equal direct measurement scores") {
  // The central equivalence: Gram-based probabilities must match the Born
  // probabilities of the explicitly constructed measurement.
  Xoshiro256 rng(127);
  for (int t = 0; t < 10; ++t) {
    const std::size_t q = 2 + rng.next_below(7);   // <= 8
    const std::size_t n = 5 + rng.next_below(26);  // <= 30
    const int k = 2 + static_cast<int>(rng.next_below(3));
    const std::size_t m = 1 + rng.next_below(2);
    auto [x, labels] = random_instance(n, q, k, rng);

    const KernelPgmModel kernel = kpgm_fit(x, labels, m);
    const Povm direct = direct_pgm_of_rows(x, labels, m, kDefaultPinvThreshold);

    for (int probe = 0; probe < 5; ++probe) {
      const Vector z = random_unit(q, rng);
      const Vector via_kernel = kpgm_scores(kernel, z);
      const Vector via_born =
          born_scores(direct, m > 1 ? tensor_power(z, m) : z);
      REQUIRE(via_kernel.size() == via_born.size());
      for (std::size_t c = 0; c < via_kernel.size(); ++c)
        CHECK(via_kernel[c] == doctest::Approx(via_born[c]).epsilon(1e-8));
    }
  }
}

TEST_CASE("kpgm at m = 2 equals a fit on explicitly tensored vectors") {
  Xoshiro256 rng(131);
  const std::size_t n = 10, q = 4;
  auto [x, labels] = random_instance(n, q, 3, rng);

  Matrix tensored(n, q * q);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector xi(x.row(i), x.row(i) + q);
    const Vector t = tensor_power(xi, 2);
    std::copy(t.begin(), t.end(), tensored.row(i));
  }
  const KernelPgmModel direct2 = kpgm_fit(tensored, labels, 1);
  const KernelPgmModel implicit2 = kpgm_fit(x, labels, 2);

  for (int probe = 0; probe < 6; ++probe) {
    const Vector z = random_unit(q, rng);
    const Vector a = kpgm_scores(implicit2, z);
    const Vector b = kpgm_scores(direct2, tensor_power(z, 2));
    for (std::size_t c = 0; c < a.size(); ++c)
      CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-9));
  }
}

TEST_CASE("kpgm score sums stay within the subnormalized budget") {
  Xoshiro256 rng(137);
  for (int t = 0; t < 10; ++t) {
    const std::size_t q = 3 + rng.next_below(4);
    auto [x, labels] = random_instance(8 + rng.next_below(10), q, 3, rng);
    const KernelPgmModel model = kpgm_fit(x, labels, 1 + rng.next_below(2));
    for (int probe = 0; probe < 20; ++probe) {
      const Vector s = kpgm_scores(model, random_unit(q, rng));
      double total = 0.0;
      for (double v : s) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(total <= 1.0 + 1e-6);
    }
  }
}

TEST_CASE("infinite-copy prediction") {
  Matrix x(3, 3, 0.0);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  x(2, 2) = 1.0;
  const std::vector<int> labels = {1, 2, 2};

  // A training vector maps to its own class.
  CHECK(kpgm_infinite_predict(x, labels, {1.0, 0.0, 0.0}) == 1);
  CHECK(kpgm_infinite_predict(x, labels, {0.0, 1.0, 0.0}) == 2);

  // |overlaps| = (0.9, 0.1): first class wins.
  Matrix y(2, 2);
  y(0, 0) = 1.0;
  y(1, 1) = 1.0;
  CHECK(kpgm_infinite_predict(y, {1, 2}, l2_normalize({0.9, 0.1})) == 1);

  // Sign of the inner product is irrelevant.
  CHECK(kpgm_infinite_predict(y, {1, 2}, l2_normalize({-0.9, 0.1})) == 1);

  // Exact tie: the smallest training index wins.
  Matrix t(2, 2);
  t(0, 0) = 1.0;
  t(1, 1) = 1.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(kpgm_infinite_predict(t, {2, 1}, {inv_sqrt2, inv_sqrt2}) == 2);
}

TEST_CASE("infinite-copy limit agrees with large finite m") {
  // Reference: finite-m kernel scores computed in the scaled domain
  // (dividing every overlap by the largest one), which keeps m = 200
  // representable. Instances are drawn without near-ties.
  Xoshiro256 rng(139);
  int done = 0;
  while (done < 20) {
    const std::size_t q = 5;
    auto [x, labels] = random_instance(12, q, 3, rng);
    const Vector z = random_unit(q, rng);

    Vector overlaps(x.rows());
    double mx = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const Vector xi(x.row(i), x.row(i) + q);
      overlaps[i] = dot(xi, z);
      mx = std::max(mx, std::fabs(overlaps[i]));
    }
    // Skip near-ties between the top two |overlaps|.
    double second = 0.0;
    for (double o : overlaps)
      if (std::fabs(o) < mx - 1e-12 && std::fabs(o) > second) second = std::fabs(o);
    if (mx - second < 0.05) continue;
    ++done;

    const std::size_t m = 200;
    // Scaled finite-m scores: w_i^m / mx^m stays in range; class scores
    // are sums of squares after the (near-identity) Gram correction.
    Matrix gram(x.rows(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t j = 0; j < x.rows(); ++j) {
        const Vector xi(x.row(i), x.row(i) + q);
        const Vector xj(x.row(j), x.row(j) + q);
        gram(i, j) = std::pow(dot(xi, xj), static_cast<double>(m));
      }
    const SymMatrix ginv = pinv_pow(SymMatrix(gram), -0.5, 1e-10);
    Vector w(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
      w[i] = std::pow(overlaps[i] / mx, static_cast<double>(m));
    const Vector v = ginv.mat() * w;
    Vector ref_scores(3, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
      ref_scores[static_cast<std::size_t>(labels[i] - 1)] += v[i] * v[i];

    CHECK(kpgm_infinite_predict(x, labels, z) == argmax_label(ref_scores));
  }
}

TEST_CASE("infinite-copy training-set classification is perfect") {
  Xoshiro256 rng(149);
  auto [x, labels] = random_instance(200, 10, 4, rng);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const Vector xi(x.row(i), x.row(i) + x.cols());
    CHECK(kpgm_infinite_predict(x, labels, xi) == labels[i]);
  }
}

TEST_CASE("kernel fit cost does not scale with the tensor dimension") {
  // q^m here is 10^100; only the N x N Gram matters.
  Xoshiro256 rng(151);
  auto [x, labels] = random_instance(300, 10, 3, rng);
  const auto t0 = std::chrono::steady_clock::now();
  const KernelPgmModel model = kpgm_fit(x, labels, 100);
  const Vector s = kpgm_scores(model, random_unit(10, rng));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s.size() == 3);
  CHECK(seconds < 10.0);
}

TEST_CASE("povm-kind score sums respect completeness") {
  Xoshiro256 rng(157);
  Dataset d;
  const std::size_t n = 30;
  d.features = Matrix(n, 3);
  d.labels.resize(n);
  d.class_count = 3;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector v = random_unit(3, rng);
    std::copy(v.begin(), v.end(), d.features.row(i));
    d.labels[i] = static_cast<int>(i % 3) + 1;
  }
  for (ClassifierKind kind : {ClassifierKind::PgmC, ClassifierKind::SdpC}) {
    const ClassifierModel model = fit(kind, d, {});
    for (int t = 0; t < 50; ++t) {
      const Vector s = scores(model, random_unit(3, rng));
      double total = 0.0;
      for (double v : s) total += v;
      CHECK(total <= 1.0 + 1e-6);
      if (model.povm->mode == CompletenessMode::Exact)
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("lp classifier scores are plain inner products") {
  Dataset d;
  d.features = Matrix::from_rows({{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}, {0.1, 0.9}});
  d.labels = {1, 1, 2, 2};
  d.class_count = 2;
  FitOptions opt;
  opt.normalization = NormalizationKind::None;
  opt.lp_bound = 1.0;
  const ClassifierModel model = fit(ClassifierKind::LpC, d, opt);
  REQUIRE(model.linear_weights.has_value());
  const Vector s = scores(model, {1.0, 0.0});
  const Matrix& w = *model.linear_weights;
  CHECK(s[0] == doctest::Approx(w(0, 0)));
  CHECK(s[1] == doctest::Approx(w(1, 0)));
  CHECK(predict(model, {1.0, 0.0}) == 1);
  CHECK(predict(model, {0.0, 1.0}) == 2);
}

TEST_CASE("model serialization round trip preserves behaviour") {
  Xoshiro256 rng(163);
  Dataset d;
  const std::size_t n = 24;
  d.features = Matrix(n, 4);
  d.labels.resize(n);
  d.class_count = 3;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 4; ++j) d.features(i, j) = rng.uniform(-1.0, 1.0);
    d.labels[i] = static_cast<int>(i % 3) + 1;
  }

  FitOptions opt;
  opt.center = true;
  opt.pca = 3;
  opt.copies = 2;
  for (ClassifierKind kind : {ClassifierKind::PgmC, ClassifierKind::KPgmC,
                              ClassifierKind::QncC, ClassifierKind::KPgmInfC,
                              ClassifierKind::RidgeC}) {
    FitOptions o = opt;
    if (kind == ClassifierKind::RidgeC) {
      o.normalization = NormalizationKind::None;
      o.ridge_lambda = 0.1;
    }
    if (kind == ClassifierKind::KPgmInfC) o.copies = 1;
    const ClassifierModel model = fit(kind, d, o);
    const ClassifierModel back = model_from_json(model_to_json(model));
    for (int t = 0; t < 10; ++t) {
      Vector z(4);
      for (double& v : z) v = rng.uniform(-1.0, 1.0);
      CHECK(predict(model, z) == predict(back, z));
      const Vector s1 = scores(model, z);
      const Vector s2 = scores(back, z);
      for (std::size_t c = 0; c < s1.size(); ++c) CHECK(s1[c] == doctest::Approx(s2[c]));
    }
  }
}

TEST_CASE("fit validates stage/kind combinations") {
  Dataset d = two_orthogonal_classes();
  FitOptions opt;
  opt.normalization = NormalizationKind::None;
  CHECK_THROWS_AS(fit(ClassifierKind::PgmC, d, opt), config_error);

  FitOptions sub;
  sub.state_subspace = 1;
  CHECK_THROWS_AS(fit(ClassifierKind::KPgmC, d, sub), config_error);

  FitOptions three;
  three.copies = 3;
  three.normalization = NormalizationKind::None;
  CHECK_THROWS_AS(fit(ClassifierKind::RidgeC, d, three), config_error);
}

TEST_CASE("state subspace restriction keeps scores consistent") {
  // Rank-2 data in 3 dimensions: restricting to the top-2 subspace must
  // reproduce the full-space probabilities for in-span inputs.
  Xoshiro256 rng(167);
  Dataset d;
  const std::size_t n = 20;
  d.features = Matrix(n, 3);
  d.labels.resize(n);
  d.class_count = 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.next_gaussian(), b = rng.next_gaussian();
    d.features(i, 0) = a;
    d.features(i, 1) = b;
    d.features(i, 2) = 0.0;
    d.labels[i] = static_cast<int>(i % 2) + 1;
  }
  FitOptions flat;
  const ClassifierModel full = fit(ClassifierKind::PgmC, d, flat);
  FitOptions restricted = flat;
  restricted.state_subspace = 2;
  const ClassifierModel reduced = fit(ClassifierKind::PgmC, d, restricted);
  for (int t = 0; t < 20; ++t) {
    Vector z = {rng.next_gaussian(), rng.next_gaussian(), 0.0};
    const Vector s_full = scores(full, z);
    const Vector s_red = scores(reduced, z);
    for (std::size_t c = 0; c < s_full.size(); ++c)
      CHECK(s_full[c] == doctest::Approx(s_red[c]).epsilon(1e-8));
  }
}
