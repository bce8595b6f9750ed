#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hnirm/dataset.hpp"
#include "hnirm/hierarchy.hpp"
#include "hnirm/rng.hpp"
#include "hnirm/types.hpp"

namespace hnirm {

/// Rigid motion z -> Q z + t. Test/diagnostic hook: when set on ChainConfig
/// it is applied to every school's initial configuration and the proposal
/// increments follow the same frame, so the sampled trajectory transforms
/// covariantly. With a signed-permutation Q and zero t the transformed chain
/// is bit-identical in every distance it visits.
struct RigidMotion {
  Matrix Q;               // d x d orthogonal
  std::vector<double> t;  // length d
};

struct JumpScales {
  double w = 0.05;
  double theta = 0.05;
  double z = 0.2;
  double beta = 1.0;
};

struct ChainConfig {
  int n_iter = 15000;
  int burn_in = 2500;
  int thin = 5;
  int d = 2;
  JumpScales jump;
  HyperPriors hyper;
  std::uint64_t seed = 1;
  GroupMode group_mode = GroupMode::Single;
  double target_accept_low = 0.2;
  double target_accept_high = 0.4;
  bool adapt = false;  // Robbins-Monro tuning during burn-in only
  int threads = 1;
  int progress_every = 0;  // 0 = silent
  bool store_item_distances = false;
  bool store_person_distances = false;
  bool store_delta_draws = false;
  bool store_positions = false;
  std::optional<RigidMotion> init_motion;

  void validate() const;
};

/// One school's input: binarized responses plus the derived adjacency
/// layers (cross-checked against X on construction).
struct SchoolInput {
  BinarySchoolMatrix school;
  MultiplexNetworks nets;
  std::optional<std::string> group_label;
};

struct FamilyCounter {
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
  double rate() const { return proposals ? static_cast<double>(accepts) / proposals : 0.0; }
  FamilyCounter& operator+=(const FamilyCounter& o) {
    proposals += o.proposals;
    accepts += o.accepts;
    return *this;
  }
};

struct AcceptStats {
  FamilyCounter w, theta, z, beta;
};

/// Thinned post-burn-in draws of all monitored quantities. Pair-indexed
/// families are stored packed over i<j in lexicographic order.
struct PosteriorSamples {
  ChainConfig config;
  int M = 0, p = 0, d = 0, n_groups = 0, n_draws = 0;
  std::vector<std::string> school_ids;
  std::vector<std::string> group_names;
  std::vector<int> group_of_school;
  std::vector<int> n_per_school;

  // Draw-major flattened series.
  std::vector<std::vector<double>> beta;          // [m], n_draws * p
  std::vector<std::vector<double>> theta;         // [m], n_draws * n_m
  std::vector<std::vector<double>> gamma;         // [g], n_draws * p
  std::vector<std::vector<double>> sigma_beta2;   // [g], n_draws * p
  std::vector<std::vector<double>> mu;            // [g], n_draws * npairs
  std::vector<std::vector<double>> sigma_delta2;  // [g], n_draws * npairs
  std::vector<std::vector<double>> sigma_dm2;     // [m], n_draws
  std::vector<std::vector<double>> sigma_z2;      // [m], n_draws

  // Posterior-mean accumulators (always on; full p x p symmetric).
  std::vector<Matrix> delta_mean;      // [m]
  std::vector<Matrix> item_dist_mean;  // [m]

  // Optional per-draw storage.
  std::vector<std::vector<double>> item_dist_draws;    // [m], n_draws * npairs
  std::vector<std::vector<double>> person_dist_draws;  // [m], n_draws * n_m pairs
  std::vector<std::vector<double>> delta_draws;        // [m], n_draws * npairs
  std::vector<std::vector<double>> z_draws;            // [m], n_draws * n_m * d
  std::vector<std::vector<double>> w_draws;            // [m], n_draws * p * d

  AcceptStats accept;
  std::vector<AcceptStats> accept_by_school;
  std::vector<JumpScales> final_scales;  // per school (tuned when adapt)
  double wall_seconds = 0.0;

  int npairs() const { return p * (p - 1) / 2; }
  /// Packed index of pair i<j.
  int pair_index(int i, int j) const { return p * i - i * (i + 1) / 2 + (j - i - 1); }
};

std::pair<double, double> hpd_interval(std::vector<double> samples, double level);

namespace detail {
struct SchoolData;
struct SchoolState;
struct GlobalState;
struct PoolHandle;
}  // namespace detail

struct IgParams {
  double shape, scale;
};
struct NormalParams {
  double mean, var;
};

/// Metropolis-within-Gibbs engine. One iteration runs the update steps in
/// fixed order: item positions, respondent intercepts, distance variances,
/// delta/mu means, respondent positions, linking variance, item intercepts,
/// pooled intercept layer. School-factoring steps may run on a thread pool;
/// every school owns a derived RNG substream so the result is independent
/// of the thread count.
class Sampler {
 public:
  Sampler(std::vector<SchoolInput> inputs, ChainConfig config);
  ~Sampler();
  Sampler(Sampler&&) noexcept;
  Sampler& operator=(Sampler&&) noexcept;

  PosteriorSamples run();

  // Single iteration / single phase entry points (also used by tests).
  void iteration(int iter_index);
  void step_update_W(int m, Rng& rng);
  void step_update_theta(int m, Rng& rng);
  void step_gibbs_distance_variances(Rng& rng);  // sigma_dm2, sigma_delta2
  void step_gibbs_delta_mu(Rng& rng);
  void step_update_Z(int m, Rng& rng);
  void step_gibbs_sigma_z(int m, Rng& rng);
  void step_update_beta(int m, Rng& rng);
  void step_gibbs_gamma_sigma_beta(Rng& rng);

  // Single-site moves; return whether the proposal was accepted. These and
  // the log-ratio functions read the derived caches, which the sweep
  // functions refresh; after mutating state directly call refresh_derived
  // first.
  bool update_item_position(int m, int i, Rng& rng);
  bool update_theta_one(int m, int k, Rng& rng);
  bool update_z_one(int m, int k, Rng& rng);
  bool update_beta_one(int m, int i, Rng& rng);

  // MH log acceptance ratios for explicit proposals (symmetric proposals, so
  // these are posterior log-density differences).
  double item_move_log_ratio(int m, int i, const double* w_new) const;
  double theta_move_log_ratio(int m, int k, double theta_new) const;
  double z_move_log_ratio(int m, int k, const double* z_new) const;
  double beta_move_log_ratio(int m, int i, double beta_new) const;

  // Closed-form conditional parameters at the current state.
  IgParams sigma_dm2_conditional(int m) const;
  IgParams sigma_delta2_conditional(int g, int i, int j) const;
  IgParams sigma_z2_conditional(int m) const;
  IgParams sigma_beta2_conditional(int g, int i) const;
  NormalParams delta_conditional(int m, int i, int j) const;
  NormalParams mu_conditional(int g, int i, int j) const;
  NormalParams gamma_conditional(int g, int i) const;

  double log_posterior() const;

  /// Aggregated MH counters accumulated so far.
  AcceptStats accept_stats() const;

  // State access (tests, oracles, postprocessing).
  int n_schools() const;
  int n_groups() const;
  const ChainConfig& config() const { return config_; }
  const BitMatrix& responses(int m) const;
  const std::string& school_id(int m) const;
  int group_of_school(int m) const;
  int school_size(int m) const;

  const Matrix& Z(int m) const;
  const Matrix& W(int m) const;
  const std::vector<double>& beta(int m) const;
  const std::vector<double>& theta(int m) const;
  double sigma_z2(int m) const;
  double sigma_dm2(int m) const;
  const Matrix& delta(int m) const;
  const std::vector<double>& gamma(int g) const;
  const std::vector<double>& sigma_beta2(int g) const;
  const Matrix& mu(int g) const;
  const Matrix& sigma_delta2(int g) const;
  /// Current between-item distance of pair (i, j) in school m.
  double item_distance(int m, int i, int j) const;
  /// Linking prior mean of respondent k.
  std::vector<double> linking_mean(int m, int k) const;

  // Mutators for frozen-state tests; refresh_derived must be called after
  // editing positions or intercepts directly.
  void set_Z(int m, const Matrix& Z);
  void set_W(int m, const Matrix& W);
  void set_beta(int m, const std::vector<double>& beta);
  void set_theta(int m, const std::vector<double>& theta);
  void set_sigma_z2(int m, double v);
  void set_sigma_dm2(int m, double v);
  void set_delta(int m, const Matrix& delta);
  void set_gamma(int g, const std::vector<double>& gamma);
  void set_sigma_beta2(int g, const std::vector<double>& v);
  void set_mu(int g, const Matrix& mu);
  void set_sigma_delta2(int g, const Matrix& v);
  void refresh_derived(int m);

 private:
  friend struct detail::SchoolState;
  void init_states();
  void store_draw(PosteriorSamples& out);
  void check_finite(int iter_index) const;
  void adapt_scales(int iter_index);
  void parallel_schools(const std::function<void(int)>& fn);

  ChainConfig config_;
  std::vector<detail::SchoolData> data_;
  std::vector<std::unique_ptr<detail::SchoolState>> states_;
  std::unique_ptr<detail::GlobalState> global_;
  std::unique_ptr<detail::PoolHandle> pool_;
  std::vector<Rng> school_rngs_;
  Rng global_rng_;
  std::vector<std::string> group_names_;
  int n_groups_ = 1;
};

/// Convenience wrapper: construct, run, return the samples.
PosteriorSamples run_chain(std::vector<SchoolInput> inputs, const ChainConfig& config);

}  // namespace hnirm
