#include <doctest.h>

#include <cmath>
#include <vector>

#include "hnirm/math.hpp"
#include "hnirm/rng.hpp"

using namespace hnirm;

TEST_SUITE("math") {

TEST_CASE("softplus matches the libm form across the range") {
  // batch kernels use the polynomial path; compare against log1p/exp
  std::vector<double> xs;
  for (double x = -745.0; x <= 60.0; x += 0.0137) xs.push_back(x);
  Rng rng(11);
  for (int q = 0; q < 20000; ++q) xs.push_back(-40.0 + 80.0 * rng.uniform());

  std::vector<double> out(xs.size());
  math::softplus_batch(xs.data(), out.data(), xs.size());
  for (std::size_t q = 0; q < xs.size(); ++q) {
    const double ref = math::softplus(xs[q]);
    const double tol = 1e-13 * std::max(1.0, std::fabs(ref));
    CHECK(std::fabs(out[q] - ref) <= tol);
  }
}

TEST_CASE("softplus sums agree with scalar accumulation") {
  Rng rng(5);
  std::vector<double> a(257);
  for (auto& v : a) v = rng.normal(0.0, 3.0);
  const double s = 0.7;
  double ref_ams = 0.0, ref_sma = 0.0;
  for (double v : a) {
    ref_ams += math::softplus(v - s);
    ref_sma += math::softplus(s - v);
  }
  CHECK(math::sum_softplus_array_minus_scalar(a.data(), a.size(), s) ==
        doctest::Approx(ref_ams).epsilon(1e-12));
  CHECK(math::sum_softplus_scalar_minus_array(s, a.data(), a.size()) ==
        doctest::Approx(ref_sma).epsilon(1e-12));
}

TEST_CASE("bernoulli logit log-likelihood") {
  CHECK(math::bernoulli_logit_loglik(true, 0.0) == doctest::Approx(std::log(0.5)));
  CHECK(math::bernoulli_logit_loglik(false, 0.0) == doctest::Approx(std::log(0.5)));
  // empty-network term at logit -10
  CHECK(math::bernoulli_logit_loglik(false, -10.0) ==
        doctest::Approx(-4.5398899216870535e-05).epsilon(1e-10));
  CHECK(math::bernoulli_logit_loglik(true, 40.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("log densities") {
  CHECK(math::normal_logpdf(0.0, 0.0, 1.0) == doctest::Approx(-0.5 * std::log(2.0 * M_PI)));
  CHECK(math::normal_logpdf(1.0, 0.0, 1.0) ==
        doctest::Approx(-0.5 - 0.5 * std::log(2.0 * M_PI)));
  // at d = e^delta the lognormal quadratic vanishes
  const double delta = 0.4;
  CHECK(math::lognormal_logpdf(std::exp(delta), delta, 1.0) ==
        doctest::Approx(-delta - 0.5 * std::log(2.0 * M_PI)));
  CHECK(math::lognormal_logpdf(0.0, 0.0, 1.0) == -INFINITY);
  CHECK(math::lognormal_logpdf(-1.0, 0.0, 1.0) == -INFINITY);
  // invgamma density integrates basic identities: mode check elsewhere
  CHECK(std::isfinite(math::invgamma_logpdf(0.5, 0.01, 0.01)));
  CHECK(math::invgamma_logpdf(0.0, 1.0, 1.0) == -INFINITY);
}

TEST_CASE("pearson and spearman") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y = {2, 4, 6, 8, 10};
  CHECK(math::pearson(x, y) == doctest::Approx(1.0));
  std::vector<double> yy = {1, 8, 27, 64, 125};  // monotone, nonlinear
  CHECK(math::spearman(x, yy) == doctest::Approx(1.0));
  std::vector<double> yr = {5, 4, 3, 2, 1};
  CHECK(math::spearman(x, yr) == doctest::Approx(-1.0));
  // ties get average ranks
  const auto r = math::ranks({1.0, 2.0, 2.0, 3.0});
  CHECK(r[1] == doctest::Approx(2.5));
  CHECK(r[2] == doctest::Approx(2.5));
}

}  // TEST_SUITE
