#include <doctest.h>

#include <cmath>

#include "hnirm/diagnostics.hpp"
#include "hnirm/math.hpp"
#include "hnirm/rng.hpp"
#include "hnirm/sampler.hpp"
#include "hnirm/synthgen.hpp"

using namespace hnirm;

namespace {

std::vector<SchoolInput> tiny_inputs(std::uint64_t seed, int M = 2, int n = 4, int p = 3) {
  GenConfig cfg;
  cfg.M = M;
  cfg.n_per_school = n;
  cfg.p = p;
  cfg.item_clusters = std::min(2, p);
  cfg.seed = seed;
  auto [dataset, truth] = generate(cfg);
  return make_inputs(dataset);
}

ChainConfig tiny_config() {
  ChainConfig cfg;
  cfg.n_iter = 40;
  cfg.burn_in = 20;
  cfg.thin = 2;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("config validation") {
  ChainConfig cfg;
  cfg.burn_in = cfg.n_iter;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = ChainConfig{};
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = ChainConfig{};
  cfg.jump.w = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  CHECK_NOTHROW(ChainConfig{}.validate());
}

TEST_CASE("iteration plan arithmetic") {
  auto cfg = tiny_config();
  cfg.n_iter = cfg.burn_in + cfg.thin;  // degenerate: exactly one stored draw
  auto samples = run_chain(tiny_inputs(1), cfg);
  CHECK(samples.n_draws == 1);

  cfg = tiny_config();
  samples = run_chain(tiny_inputs(1), cfg);
  CHECK(samples.n_draws == (cfg.n_iter - cfg.burn_in) / cfg.thin);
  CHECK(static_cast<int>(samples.beta[0].size()) == samples.n_draws * samples.p);
  for (int m = 0; m < samples.M; ++m) {
    for (double v : samples.sigma_z2[m]) CHECK(v > 0.0);
    for (double v : samples.sigma_dm2[m]) CHECK(v > 0.0);
  }
}

TEST_CASE("determinism: same seed, same draws; threads do not matter") {
  auto cfg = tiny_config();
  cfg.store_item_distances = true;
  auto s1 = run_chain(tiny_inputs(2), cfg);
  auto s2 = run_chain(tiny_inputs(2), cfg);
  CHECK(s1.beta == s2.beta);
  CHECK(s1.theta == s2.theta);
  CHECK(s1.gamma == s2.gamma);
  CHECK(s1.mu == s2.mu);
  CHECK(s1.item_dist_draws == s2.item_dist_draws);

  cfg.threads = 2;
  auto s3 = run_chain(tiny_inputs(2), cfg);
  CHECK(s1.beta == s3.beta);
  CHECK(s1.theta == s3.theta);
  CHECK(s1.gamma == s3.gamma);
  CHECK(s1.item_dist_draws == s3.item_dist_draws);

  cfg.seed = 1234;
  auto s4 = run_chain(tiny_inputs(2), cfg);
  CHECK(s1.beta != s4.beta);
}

TEST_CASE("identity proposals have log ratio exactly zero") {
  Sampler s(tiny_inputs(3), tiny_config());
  for (int it = 0; it < 3; ++it) s.iteration(it + 1);  // move off the initial state
  const int m = 0;
  s.refresh_derived(m);  // ratio functions assume fresh caches
  CHECK(s.item_move_log_ratio(m, 1, s.W(m).row(1)) == 0.0);
  CHECK(s.theta_move_log_ratio(m, 2, s.theta(m)[2]) == 0.0);
  CHECK(s.z_move_log_ratio(m, 0, s.Z(m).row(0)) == 0.0);
  CHECK(s.beta_move_log_ratio(m, 0, s.beta(m)[0]) == 0.0);
}

TEST_CASE("extreme proposals are effectively rejected") {
  Sampler s(tiny_inputs(4), tiny_config());
  CHECK(s.theta_move_log_ratio(0, 0, 1e4) < -1e4);
  CHECK(s.beta_move_log_ratio(0, 0, -1e4) < -1e4);
  const double far[2] = {1e6, 1e6};
  CHECK(s.z_move_log_ratio(0, 0, far) < -1e3);
}

TEST_CASE("a proposal colliding with another item is rejected by the prior") {
  Sampler s(tiny_inputs(5), tiny_config());
  CHECK(s.item_move_log_ratio(0, 0, s.W(0).row(1)) == -INFINITY);
}

TEST_CASE("MH log ratios equal full log-posterior differences") {
  Sampler s(tiny_inputs(6, 3, 5, 4), tiny_config());
  for (int it = 0; it < 5; ++it) s.iteration(it + 1);
  for (int m = 0; m < 3; ++m) s.refresh_derived(m);
  Rng rng(77);

  for (int rep = 0; rep < 20; ++rep) {
    const int m = static_cast<int>(rng.uniform_below(3));
    {  // item move
      const int i = static_cast<int>(rng.uniform_below(4));
      double prop[2] = {s.W(m)(i, 0) + 0.3 * rng.normal(), s.W(m)(i, 1) + 0.3 * rng.normal()};
      const double ratio = s.item_move_log_ratio(m, i, prop);
      const double lp0 = s.log_posterior();
      Matrix W = s.W(m);
      const double w0 = W(i, 0), w1 = W(i, 1);
      W(i, 0) = prop[0];
      W(i, 1) = prop[1];
      s.set_W(m, W);
      s.refresh_derived(m);
      const double lp1 = s.log_posterior();
      W(i, 0) = w0;
      W(i, 1) = w1;
      s.set_W(m, W);
      s.refresh_derived(m);
      CHECK(ratio == doctest::Approx(lp1 - lp0).epsilon(1e-8));
    }
    {  // z move
      const int k = static_cast<int>(rng.uniform_below(5));
      double prop[2] = {s.Z(m)(k, 0) + 0.5 * rng.normal(), s.Z(m)(k, 1) + 0.5 * rng.normal()};
      const double ratio = s.z_move_log_ratio(m, k, prop);
      const double lp0 = s.log_posterior();
      Matrix Z = s.Z(m);
      const double z0 = Z(k, 0), z1 = Z(k, 1);
      Z(k, 0) = prop[0];
      Z(k, 1) = prop[1];
      s.set_Z(m, Z);
      s.refresh_derived(m);
      const double lp1 = s.log_posterior();
      Z(k, 0) = z0;
      Z(k, 1) = z1;
      s.set_Z(m, Z);
      s.refresh_derived(m);
      CHECK(ratio == doctest::Approx(lp1 - lp0).epsilon(1e-8));
    }
    {  // theta move
      const int k = static_cast<int>(rng.uniform_below(5));
      const double prop = s.theta(m)[k] + rng.normal();
      const double ratio = s.theta_move_log_ratio(m, k, prop);
      const double lp0 = s.log_posterior();
      auto theta = s.theta(m);
      const double t0 = theta[k];
      theta[k] = prop;
      s.set_theta(m, theta);
      const double lp1 = s.log_posterior();
      theta[k] = t0;
      s.set_theta(m, theta);
      CHECK(ratio == doctest::Approx(lp1 - lp0).epsilon(1e-8));
    }
    {  // beta move
      const int i = static_cast<int>(rng.uniform_below(4));
      const double prop = s.beta(m)[i] + rng.normal();
      const double ratio = s.beta_move_log_ratio(m, i, prop);
      const double lp0 = s.log_posterior();
      auto beta = s.beta(m);
      const double b0 = beta[i];
      beta[i] = prop;
      s.set_beta(m, beta);
      s.refresh_derived(m);
      const double lp1 = s.log_posterior();
      beta[i] = b0;
      s.set_beta(m, beta);
      s.refresh_derived(m);
      CHECK(ratio == doctest::Approx(lp1 - lp0).epsilon(1e-8));
    }
  }
}

TEST_CASE("closed-form conditional parameters at frozen states") {
  Sampler s(tiny_inputs(8, 3, 4, 3), tiny_config());
  const auto& hyper = s.config().hyper;
  const int p = 3, M = 3;

  // sigma_z2: zero residuals when Z rows equal their linking means
  {
    Matrix Z = s.Z(0);
    for (int k = 0; k < Z.rows(); ++k) {
      const auto mean = s.linking_mean(0, k);
      for (int c = 0; c < 2; ++c) Z(k, c) = mean[c];
    }
    s.set_Z(0, Z);
    s.refresh_derived(0);
    const auto ig = s.sigma_z2_conditional(0);
    CHECK(ig.shape == doctest::Approx(hyper.a + 0.5 * 4 * 2));
    CHECK(ig.scale == doctest::Approx(hyper.b).epsilon(1e-12));
  }

  // sigma_dm2: delta at log distances and mu = delta kills both quadratics
  {
    Matrix delta(p, p);
    Matrix mu(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const double ld = std::log(s.item_distance(0, i, j));
        delta(i, j) = delta(j, i) = ld;
        mu(i, j) = mu(j, i) = ld;
      }
    }
    s.set_delta(0, delta);
    s.set_mu(0, mu);
    const auto ig = s.sigma_dm2_conditional(0);
    CHECK(ig.shape == doctest::Approx(hyper.a + p * (p - 1) / 4.0));
    CHECK(ig.scale == doctest::Approx(hyper.b).epsilon(1e-12));
  }

  // gamma: all schools at beta = c
  {
    const double c = 1.37;
    for (int m = 0; m < M; ++m) s.set_beta(m, std::vector<double>(p, c));
    s.set_sigma_beta2(0, std::vector<double>(p, 0.5));
    const auto nc = s.gamma_conditional(0, 1);
    const double expect =
        c * (M / 0.5) / (1.0 / hyper.sigma_gamma2 + M / 0.5);
    CHECK(nc.mean == doctest::Approx(expect).epsilon(1e-12));
    CHECK(nc.var == doctest::Approx(1.0 / (1.0 / hyper.sigma_gamma2 + M / 0.5)).epsilon(1e-12));
  }

  // sigma_beta2 at gamma = 0: shrinkage term vanishes
  {
    s.set_gamma(0, std::vector<double>(p, 0.0));
    const auto ig = s.sigma_beta2_conditional(0, 0);
    CHECK(ig.shape == doctest::Approx(hyper.a + 0.5 * M));
    const double c = 1.37;
    CHECK(ig.scale == doctest::Approx(hyper.b + 0.5 * M * c * c).epsilon(1e-10));
  }

  // delta conditional with equal precisions averages log d and mu
  {
    s.set_sigma_dm2(0, 0.7);
    Matrix sd2 = s.sigma_delta2(0);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        if (i != j) sd2(i, j) = 0.7;
      }
    }
    s.set_sigma_delta2(0, sd2);
    Matrix mu = s.mu(0);
    mu(0, 1) = mu(1, 0) = -0.4;
    s.set_mu(0, mu);
    const auto nc = s.delta_conditional(0, 0, 1);
    const double ld = std::log(s.item_distance(0, 0, 1));
    CHECK(nc.mean == doctest::Approx(0.5 * (ld + -0.4)).epsilon(1e-12));
    CHECK(nc.var == doctest::Approx(0.35).epsilon(1e-12));
  }

  // mu conditional: huge sigma_delta2 pushes the mean to zero and the
  // variance toward the hyperprior's
  {
    Matrix sd2 = s.sigma_delta2(0);
    sd2(0, 1) = sd2(1, 0) = 1e14;
    s.set_sigma_delta2(0, sd2);
    const auto nc = s.mu_conditional(0, 0, 1);
    CHECK(std::fabs(nc.mean) < 1e-9);
    CHECK(nc.var == doctest::Approx(hyper.sigma_mu2).epsilon(1e-4));
  }
}

TEST_CASE("initialization failures and NaN aborts") {
  // colliding initial item positions make the init log-posterior -inf
  auto inputs = tiny_inputs(9);
  Sampler s(std::move(inputs), tiny_config());
  Matrix W = s.W(0);
  for (int c = 0; c < 2; ++c) W(1, c) = W(0, c);
  s.set_W(0, W);
  s.refresh_derived(0);
  CHECK(s.log_posterior() == -INFINITY);
  CHECK_THROWS_AS(s.run(), ChainError);

  Sampler s2(tiny_inputs(9), tiny_config());
  auto beta = s2.beta(0);
  beta[0] = std::nan("");
  s2.set_beta(0, beta);
  try {
    s2.iteration(17);
    FAIL("expected ChainError");
  } catch (const ChainError& e) {
    CHECK(std::string(e.what()).find("17") != std::string::npos);
  }
}

TEST_CASE("acceptance counters add up") {
  auto cfg = tiny_config();
  auto samples = run_chain(tiny_inputs(10), cfg);
  const std::uint64_t expected_w = static_cast<std::uint64_t>(cfg.n_iter) * samples.M * samples.p;
  CHECK(samples.accept.w.proposals == expected_w);
  CHECK(samples.accept.w.accepts <= samples.accept.w.proposals);
  CHECK(samples.accept.theta.proposals ==
        static_cast<std::uint64_t>(cfg.n_iter) * samples.M * 4);
}

TEST_CASE("hpd_interval") {
  CHECK_THROWS_AS(hpd_interval({1, 2, 3}, 0.9), DomainError);
  CHECK_THROWS_AS(hpd_interval(std::vector<double>(100, 0.0), 1.5), DomainError);

  // all-equal samples: zero width
  const auto [alo, ahi] = hpd_interval(std::vector<double>(50, 3.25), 0.95);
  CHECK(alo == 3.25);
  CHECK(ahi == 3.25);

  Rng rng(13);
  // uniform(0,1): 95% HPD width ~ 0.95
  std::vector<double> u(100000);
  for (auto& v : u) v = rng.uniform();
  const auto [ulo, uhi] = hpd_interval(u, 0.95);
  CHECK(uhi - ulo == doctest::Approx(0.95).epsilon(0.011));

  // symmetric unimodal: matches the central interval within sampling error
  std::vector<double> g(100000);
  for (auto& v : g) v = rng.normal();
  const auto [glo, ghi] = hpd_interval(g, 0.95);
  CHECK(glo == doctest::Approx(-1.96).epsilon(0.03));
  CHECK(ghi == doctest::Approx(1.96).epsilon(0.03));
}

TEST_CASE("series diagnostics") {
  Rng rng(19);
  const int n = 4000;
  std::vector<double> iid(n);
  for (auto& v : iid) v = rng.normal();
  auto d = series_diagnostics(iid);
  CHECK(std::fabs(d.autocorr[1]) < 3.0 / std::sqrt(n));
  CHECK(d.ess > 0.5 * n);
  CHECK(!d.degenerate);

  auto dc = series_diagnostics(std::vector<double>(100, 1.0));
  CHECK(dc.degenerate);
  CHECK(dc.ess == 0.0);

  // AR(1) with rho = 0.5
  std::vector<double> ar(n);
  double x = 0.0;
  for (auto& v : ar) {
    x = 0.5 * x + rng.normal();
    v = x;
  }
  auto dar = series_diagnostics(ar);
  CHECK(dar.autocorr[1] == doctest::Approx(0.5).epsilon(0.12));
}

TEST_CASE("multiple-group fit with identical parameters matches single group") {
  // same inputs, two labelings; with one group per label but identical data
  // generation, the two posteriors coincide when group parameters are tied.
  auto inputs = tiny_inputs(21, 2, 4, 3);
  auto cfg = tiny_config();
  Sampler single(inputs, cfg);
  cfg.group_mode = GroupMode::ByLabel;
  for (auto& in : inputs) in.group_label = "same";
  Sampler labeled(std::move(inputs), cfg);
  CHECK(single.n_groups() == 1);
  CHECK(labeled.n_groups() == 1);
  CHECK(single.log_posterior() == doctest::Approx(labeled.log_posterior()).epsilon(1e-12));
}

}  // TEST_SUITE
