#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hnirm/dataset.hpp"
#include "hnirm/sampler.hpp"
#include "hnirm/types.hpp"

namespace hnirm {

/// Synthetic-data generator settings. Latent positions come from
/// cluster-structured Gaussians; responses are response-level Bernoulli
/// draws x_ki ~ Bern(logistic(theta_k + beta_i - ||z_k - w_i||)) whose
/// induced co-positivity networks carry the planted structure.
struct GenConfig {
  int M = 6;
  int n_per_school = 50;
  int p = 20;
  int d = 2;
  int item_clusters = 3;
  double cluster_radius = 2.0;      // item cluster centers sit on this circle
  double item_within_sd = 0.25;     // item scatter around its cluster center
  double school_item_jitter = 0.05; // per-school perturbation of item positions
  bool persons_clustered = true;    // persons drawn around item cluster centers
  double person_within_sd = 0.8;
  double person_center_pull = 0.6;  // person cluster centers = pull * item centers
  double theta_mean = 0.6;
  double theta_sd = 0.3;
  double gamma_low = 0.0;           // pooled intercepts evenly spaced over
  double gamma_high = 2.0;          // [gamma_low, gamma_high]
  double beta_school_sd = 0.2;      // school scatter around gamma
  int n_groups = 1;                 // 1 or 2; groups share identical truth
  std::uint64_t seed = 1;
};

struct GroundTruth {
  GenConfig config;
  std::vector<Matrix> Z, W;               // per school
  std::vector<std::vector<double>> beta;  // per school
  std::vector<std::vector<double>> theta;
  std::vector<double> gamma;
  Matrix mu;  // log pairwise distances of the global item configuration
  Matrix item_config;  // global item positions the schools jitter around
  std::vector<int> item_cluster;
};

std::pair<ResponseDataset, GroundTruth> generate(const GenConfig& config);

/// Sampler-ready inputs for a dataset (binary pass-through + multiplex).
std::vector<SchoolInput> make_inputs(const ResponseDataset& dataset);

// ---------------------------------------------------------------------------
// Test oracles. Deliberately naive, self-contained re-implementations used
// to cross-check the production paths; they share no math helpers with the
// modules they test.

struct BruteForceLoglik {
  double person_network = 0.0;  // likelihood of the item layers Y
  double item_network = 0.0;    // likelihood of the person layers U
};

/// Nested-loop evaluation of both network log-likelihoods straight from X.
BruteForceLoglik brute_force_loglik(const BitMatrix& X, const Matrix& Z, const Matrix& W,
                                    const std::vector<double>& beta,
                                    const std::vector<double>& theta);

/// Selector for one scalar coordinate of the model state.
struct ParameterSelector {
  enum class Family {
    SigmaDm2,
    SigmaDelta2,
    Delta,
    Mu,
    SigmaZ2,
    SigmaBeta2,
    Gamma,
    Theta,
    Beta,
    ZCoord,
    WCoord,
  };
  Family family = Family::Theta;
  int m = 0, g = 0, i = 0, j = 1, k = 0, coord = 0;
};

/// Evaluate the unnormalized full conditional of one scalar parameter of a
/// frozen sampler state on a grid and normalize by the trapezoid rule.
/// Throws if halving the grid resolution moves the normalizer by more than
/// 1e-4 relative.
std::vector<double> grid_conditional(const Sampler& sampler, const ParameterSelector& sel,
                                     const std::vector<double>& grid);

}  // namespace hnirm
