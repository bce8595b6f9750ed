#include "hnirm/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hnirm/rng.hpp"

namespace hnirm {
namespace {

// Self-contained pieces (oracle independence).
double naive_dist(const double* a, const double* b, int d) {
  double q = 0.0;
  for (int c = 0; c < d; ++c) q += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(q);
}

double naive_bernoulli_logit(bool y, double eta) {
  // log sigma(eta) = -log(1+exp(-eta)), log(1-sigma(eta)) = -log(1+exp(eta))
  const double t = y ? -eta : eta;
  if (t > 0.0) return -(t + std::log1p(std::exp(-t)));
  return -std::log1p(std::exp(t));
}

double naive_normal_logpdf(double x, double mean, double var) {
  const double r = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - 0.5 * r * r / var;
}

double naive_lognormal_logpdf(double x, double logmean, double var) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double r = std::log(x) - logmean;
  return -std::log(x) - 0.5 * std::log(2.0 * M_PI * var) - 0.5 * r * r / var;
}

double naive_invgamma_logpdf(double x, double a, double b) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

}  // namespace

std::pair<ResponseDataset, GroundTruth> generate(const GenConfig& cfg) {
  if (cfg.M < 2 || cfg.n_per_school < 2 || cfg.p < 2 || cfg.d < 1) {
    throw ValidationError("generate: sizes must be at least M=2, n=2, p=2, d=1");
  }
  if (cfg.item_clusters < 1 || cfg.item_clusters > cfg.p) {
    throw ValidationError("generate: item_clusters must be in [1, p]");
  }
  if (cfg.n_groups != 1 && cfg.n_groups != 2) {
    throw ValidationError("generate: n_groups must be 1 or 2");
  }

  Rng rng(cfg.seed);
  GroundTruth truth;
  truth.config = cfg;

  // Cluster centers on a circle (first coordinates if d > 2).
  Matrix centers(cfg.item_clusters, cfg.d);
  for (int c = 0; c < cfg.item_clusters; ++c) {
    const double ang = 2.0 * M_PI * c / cfg.item_clusters;
    centers(c, 0) = cfg.cluster_radius * std::cos(ang);
    if (cfg.d > 1) centers(c, 1) = cfg.cluster_radius * std::sin(ang);
  }

  truth.item_config = Matrix(cfg.p, cfg.d);
  truth.item_cluster.resize(cfg.p);
  for (int i = 0; i < cfg.p; ++i) {
    const int c = static_cast<int>(static_cast<long long>(i) * cfg.item_clusters / cfg.p);
    truth.item_cluster[i] = c;
    for (int q = 0; q < cfg.d; ++q) {
      truth.item_config(i, q) = centers(c, q) + cfg.item_within_sd * rng.normal();
    }
  }
  truth.mu = Matrix(cfg.p, cfg.p);
  for (int i = 0; i < cfg.p; ++i) {
    for (int j = i + 1; j < cfg.p; ++j) {
      const double v =
          std::log(naive_dist(truth.item_config.row(i), truth.item_config.row(j), cfg.d));
      truth.mu(i, j) = v;
      truth.mu(j, i) = v;
    }
  }

  truth.gamma.resize(cfg.p);
  for (int i = 0; i < cfg.p; ++i) {
    truth.gamma[i] = cfg.p == 1 ? cfg.gamma_low
                                : cfg.gamma_low + (cfg.gamma_high - cfg.gamma_low) * i /
                                                      static_cast<double>(cfg.p - 1);
  }

  ResponseDataset ds;
  for (int i = 0; i < cfg.p; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "item_%03d", i + 1);
    ds.item_ids.push_back(buf);
  }

  for (int m = 0; m < cfg.M; ++m) {
    char sbuf[32];
    std::snprintf(sbuf, sizeof sbuf, "school_%03d", m + 1);
    ds.school_ids.push_back(sbuf);
    if (cfg.n_groups == 2) {
      ds.group_labels.push_back(std::string(m % 2 == 0 ? "groupA" : "groupB"));
    } else {
      ds.group_labels.push_back(std::nullopt);
    }

    Matrix W(cfg.p, cfg.d);
    for (int i = 0; i < cfg.p; ++i) {
      for (int q = 0; q < cfg.d; ++q) {
        W(i, q) = truth.item_config(i, q) + cfg.school_item_jitter * rng.normal();
      }
    }
    Matrix Z(cfg.n_per_school, cfg.d);
    for (int k = 0; k < cfg.n_per_school; ++k) {
      if (cfg.persons_clustered) {
        const int c = static_cast<int>(rng.uniform_below(cfg.item_clusters));
        for (int q = 0; q < cfg.d; ++q) {
          Z(k, q) = cfg.person_center_pull * centers(c, q) + cfg.person_within_sd * rng.normal();
        }
      } else {
        for (int q = 0; q < cfg.d; ++q) Z(k, q) = cfg.person_within_sd * rng.normal();
      }
    }
    std::vector<double> beta(cfg.p), theta(cfg.n_per_school);
    for (int i = 0; i < cfg.p; ++i) beta[i] = truth.gamma[i] + cfg.beta_school_sd * rng.normal();
    for (int k = 0; k < cfg.n_per_school; ++k) theta[k] = rng.normal(cfg.theta_mean, cfg.theta_sd);

    for (int k = 0; k < cfg.n_per_school; ++k) {
      ResponseDataset::Respondent r;
      char rbuf[48];
      std::snprintf(rbuf, sizeof rbuf, "s%03d_r%04d", m + 1, k + 1);
      r.id = rbuf;
      r.school = m;
      r.codes.resize(cfg.p);
      for (int i = 0; i < cfg.p; ++i) {
        const double eta = theta[k] + beta[i] - naive_dist(Z.row(k), W.row(i), cfg.d);
        const double prob = 1.0 / (1.0 + std::exp(-eta));
        r.codes[i] = rng.uniform() < prob ? 1 : 0;
      }
      ds.respondents.push_back(std::move(r));
    }

    truth.W.push_back(std::move(W));
    truth.Z.push_back(std::move(Z));
    truth.beta.push_back(std::move(beta));
    truth.theta.push_back(std::move(theta));
  }

  ds.school_offsets.assign(cfg.M + 1, 0);
  for (int m = 0; m < cfg.M; ++m) ds.school_offsets[m + 1] = (m + 1) * cfg.n_per_school;
  return {std::move(ds), std::move(truth)};
}

std::vector<SchoolInput> make_inputs(const ResponseDataset& dataset) {
  auto matrices = dichotomize(dataset, 4, CodeMode::Binary);
  std::vector<SchoolInput> inputs;
  inputs.reserve(matrices.size());
  for (std::size_t m = 0; m < matrices.size(); ++m) {
    SchoolInput in;
    in.nets = build_multiplex(matrices[m]);
    in.group_label = dataset.group_labels[m];
    in.school = std::move(matrices[m]);
    inputs.push_back(std::move(in));
  }
  return inputs;
}

BruteForceLoglik brute_force_loglik(const BitMatrix& X, const Matrix& Z, const Matrix& W,
                                    const std::vector<double>& beta,
                                    const std::vector<double>& theta) {
  const int n = X.rows();
  const int p = X.cols();
  const int d = Z.cols();
  BruteForceLoglik out;
  for (int i = 0; i < p; ++i) {
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < k; ++l) {
        const bool y = X(k, i) != 0 && X(l, i) != 0;
        out.person_network += naive_bernoulli_logit(y, beta[i] - naive_dist(Z.row(k), Z.row(l), d));
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < i; ++j) {
        const bool u = X(k, i) != 0 && X(k, j) != 0;
        out.item_network += naive_bernoulli_logit(u, theta[k] - naive_dist(W.row(i), W.row(j), d));
      }
    }
  }
  return out;
}

namespace {

// Unnormalized log conditional of the selected scalar with value v, all
// other coordinates frozen at the sampler state. Every term is recomputed
// naively from scratch.
double log_conditional_at(const Sampler& s, const ParameterSelector& sel, double v) {
  using Family = ParameterSelector::Family;
  const auto& cfg = s.config();
  const int d = cfg.d;

  switch (sel.family) {
    case Family::Theta: {
      const int m = sel.m;
      const auto& X = s.responses(m);
      const auto& W = s.W(m);
      const int p = X.cols();
      double lp = naive_normal_logpdf(v, 0.0, cfg.hyper.sigma_theta2);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < i; ++j) {
          const bool u = X(sel.k, i) != 0 && X(sel.k, j) != 0;
          lp += naive_bernoulli_logit(u, v - naive_dist(W.row(i), W.row(j), d));
        }
      }
      return lp;
    }
    case Family::Beta: {
      const int m = sel.m;
      const auto& X = s.responses(m);
      const auto& Z = s.Z(m);
      const int n = X.rows();
      const int g = s.group_of_school(m);
      double lp = naive_normal_logpdf(v, s.gamma(g)[sel.i], s.sigma_beta2(g)[sel.i]);
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < k; ++l) {
          const bool y = X(k, sel.i) != 0 && X(l, sel.i) != 0;
          lp += naive_bernoulli_logit(y, v - naive_dist(Z.row(k), Z.row(l), d));
        }
      }
      return lp;
    }
    case Family::ZCoord: {
      const int m = sel.m;
      const auto& X = s.responses(m);
      const Matrix& Z = s.Z(m);
      const auto& beta = s.beta(m);
      const int n = X.rows();
      std::vector<double> zk(Z.row(sel.k), Z.row(sel.k) + d);
      zk[sel.coord] = v;
      double lp = 0.0;
      const auto mean = s.linking_mean(m, sel.k);
      for (int c = 0; c < d; ++c) lp += naive_normal_logpdf(zk[c], mean[c], s.sigma_z2(m));
      for (int l = 0; l < n; ++l) {
        if (l == sel.k) continue;
        const double dist = naive_dist(zk.data(), Z.row(l), d);
        for (int i = 0; i < X.cols(); ++i) {
          const bool y = X(sel.k, i) != 0 && X(l, i) != 0;
          lp += naive_bernoulli_logit(y, beta[i] - dist);
        }
      }
      return lp;
    }
    case Family::WCoord: {
      const int m = sel.m;
      const auto& X = s.responses(m);
      const Matrix& W = s.W(m);
      const Matrix& Z = s.Z(m);
      const auto& theta = s.theta(m);
      const int n = X.rows();
      const int p = X.cols();
      std::vector<double> wi(W.row(sel.i), W.row(sel.i) + d);
      wi[sel.coord] = v;
      double lp = 0.0;
      for (int j = 0; j < p; ++j) {
        if (j == sel.i) continue;
        const double dist = naive_dist(wi.data(), W.row(j), d);
        lp += naive_lognormal_logpdf(dist, s.delta(m)(sel.i, j), s.sigma_dm2(m));
        for (int k = 0; k < n; ++k) {
          const bool u = X(k, sel.i) != 0 && X(k, j) != 0;
          lp += naive_bernoulli_logit(u, theta[k] - dist);
        }
      }
      // linking prior of every respondent who endorsed item i
      for (int k = 0; k < n; ++k) {
        if (!X(k, sel.i)) continue;
        int cnt = 0;
        std::vector<double> mean(d, 0.0);
        for (int q = 0; q < p; ++q) {
          if (X(k, q)) {
            ++cnt;
            for (int c = 0; c < d; ++c) mean[c] += q == sel.i ? wi[c] : W(q, c);
          }
        }
        for (int c = 0; c < d; ++c) {
          lp += naive_normal_logpdf(Z(k, c), mean[c] / cnt, s.sigma_z2(m));
        }
      }
      return lp;
    }
    case Family::Delta: {
      const int m = sel.m;
      const int g = s.group_of_school(m);
      double lp = naive_normal_logpdf(v, s.mu(g)(sel.i, sel.j), s.sigma_delta2(g)(sel.i, sel.j));
      lp += naive_lognormal_logpdf(s.item_distance(m, sel.i, sel.j), v, s.sigma_dm2(m));
      return lp;
    }
    case Family::Mu: {
      double lp = naive_normal_logpdf(v, 0.0, cfg.hyper.sigma_mu2);
      for (int m = 0; m < s.n_schools(); ++m) {
        if (s.group_of_school(m) != sel.g) continue;
        lp += naive_normal_logpdf(s.delta(m)(sel.i, sel.j), v,
                                  s.sigma_delta2(sel.g)(sel.i, sel.j));
      }
      return lp;
    }
    case Family::Gamma: {
      double lp = naive_normal_logpdf(v, 0.0, cfg.hyper.sigma_gamma2);
      for (int m = 0; m < s.n_schools(); ++m) {
        if (s.group_of_school(m) != sel.g) continue;
        lp += naive_normal_logpdf(s.beta(m)[sel.i], v, s.sigma_beta2(sel.g)[sel.i]);
      }
      return lp;
    }
    case Family::SigmaZ2: {
      const int m = sel.m;
      double lp = naive_invgamma_logpdf(v, cfg.hyper.a, cfg.hyper.b);
      const Matrix& Z = s.Z(m);
      for (int k = 0; k < Z.rows(); ++k) {
        const auto mean = s.linking_mean(m, k);
        for (int c = 0; c < d; ++c) lp += naive_normal_logpdf(Z(k, c), mean[c], v);
      }
      return lp;
    }
    case Family::SigmaDm2: {
      const int m = sel.m;
      double lp = naive_invgamma_logpdf(v, cfg.hyper.a, cfg.hyper.b);
      const int p = s.responses(m).cols();
      for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
          lp += naive_lognormal_logpdf(s.item_distance(m, i, j), s.delta(m)(i, j), v);
        }
      }
      return lp;
    }
    case Family::SigmaDelta2: {
      double lp = naive_invgamma_logpdf(v, cfg.hyper.a, cfg.hyper.b);
      for (int m = 0; m < s.n_schools(); ++m) {
        if (s.group_of_school(m) != sel.g) continue;
        lp += naive_normal_logpdf(s.delta(m)(sel.i, sel.j), s.mu(sel.g)(sel.i, sel.j), v);
      }
      return lp;
    }
    case Family::SigmaBeta2: {
      double lp = naive_invgamma_logpdf(v, cfg.hyper.a, cfg.hyper.b);
      for (int m = 0; m < s.n_schools(); ++m) {
        if (s.group_of_school(m) != sel.g) continue;
        lp += naive_normal_logpdf(s.beta(m)[sel.i], s.gamma(sel.g)[sel.i], v);
      }
      return lp;
    }
  }
  throw DomainError("grid_conditional: unknown family");
}

double trapezoid(const std::vector<double>& grid, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t q = 1; q < grid.size(); ++q) {
    acc += 0.5 * (f[q] + f[q - 1]) * (grid[q] - grid[q - 1]);
  }
  return acc;
}

}  // namespace

std::vector<double> grid_conditional(const Sampler& sampler, const ParameterSelector& sel,
                                     const std::vector<double>& grid) {
  if (grid.size() < 5) throw DomainError("grid_conditional: grid too small");
  for (std::size_t q = 1; q < grid.size(); ++q) {
    if (!(grid[q] > grid[q - 1])) throw DomainError("grid_conditional: grid must increase");
  }
  std::vector<double> logf(grid.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < grid.size(); ++q) {
    logf[q] = log_conditional_at(sampler, sel, grid[q]);
    mx = std::max(mx, logf[q]);
  }
  if (!std::isfinite(mx)) throw DomainError("grid_conditional: conditional vanishes on grid");
  std::vector<double> f(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) f[q] = std::exp(logf[q] - mx);

  const double integral = trapezoid(grid, f);
  // refinement check: drop every other interior point
  std::vector<double> g2, f2;
  for (std::size_t q = 0; q < grid.size(); q += 2) {
    g2.push_back(grid[q]);
    f2.push_back(f[q]);
  }
  if (g2.back() != grid.back()) {
    g2.push_back(grid.back());
    f2.push_back(f.back());
  }
  const double coarse = trapezoid(g2, f2);
  if (std::abs(coarse - integral) > 1e-4 * integral) {
    throw DomainError("grid_conditional: grid too coarse (normalization shifts on refinement)");
  }
  for (auto& v : f) v /= integral;
  return f;
}

}  // namespace hnirm
