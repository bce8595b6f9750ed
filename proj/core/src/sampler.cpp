#include "hnirm/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "hnirm/math.hpp"
#include "hnirm/within_school.hpp"

namespace hnirm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kAdaptWindow = 50;

int pair_idx(int p, int i, int j) { return p * i - i * (i + 1) / 2 + (j - i - 1); }

// Minimal persistent pool; schools are independent blocks, so scheduling
// order cannot affect results.
class ThreadPool {
 public:
  explicit ThreadPool(int n_threads) {
    for (int t = 0; t < n_threads; ++t) {
      workers_.emplace_back([this] { worker(); });
    }
  }

  ~ThreadPool() {
    {
      std::unique_lock lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  void parallel_for(int count, const std::function<void(int)>& fn) {
    if (workers_.empty()) {
      for (int i = 0; i < count; ++i) fn(i);
      return;
    }
    {
      std::unique_lock lk(mu_);
      fn_ = &fn;
      next_ = 0;
      total_ = count;
      done_ = 0;
      ++generation_;
    }
    cv_.notify_all();
    {
      std::unique_lock lk(mu_);
      done_cv_.wait(lk, [&] { return done_ == total_; });
      fn_ = nullptr;
    }
    if (error_) {
      auto e = error_;
      error_ = nullptr;
      std::rethrow_exception(e);
    }
  }

 private:
  void worker() {
    std::uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      for (;;) {
        const int i = next_.fetch_add(1);
        if (i >= total_) break;
        try {
          (*fn_)(i);
        } catch (...) {
          std::unique_lock lk(mu_);
          if (!error_) error_ = std::current_exception();
        }
        std::unique_lock lk(mu_);
        if (++done_ == total_) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(int)>* fn_ = nullptr;
  std::atomic<int> next_{0};
  int total_ = 0;
  int done_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace

namespace detail {

/// Immutable per-school inputs and sufficient counts.
struct SchoolData {
  std::string id;
  int n = 0, p = 0, group = 0;
  BitMatrix X;
  MultiplexNetworks nets;

  std::vector<int> row_count;             // positives per respondent
  std::vector<std::vector<int>> pos_resp; // [i] respondents with x_ki = 1
  Matrix S1;                              // p x p pair counts sum_k x_ki x_kj
  Matrix T1;                              // n x n pair counts sum_i x_ki x_li
  std::vector<double> theta_pairs;        // [k] sum_{i<j} u_kij
  std::vector<double> beta_pairs;         // [i] sum_{k<l} y_ikl
};

/// Mutable per-school state plus caches. Packed pair arrays are ordered
/// lexicographically over i<j.
struct SchoolState {
  Matrix Z, W;
  std::vector<double> beta, theta;
  double sigma_z2 = 1.0;
  double sigma_dm2 = 1.0;
  Matrix delta;  // p x p symmetric, zero diag

  std::vector<double> dw;      // item pair distances, packed
  std::vector<double> log_dw;  // log of the above
  std::vector<double> dz;      // respondent pair distances, packed
  Matrix zmean;                // n x d linking means

  // sum_k softplus(theta_k - dw_ij) per item pair, and
  // sum_i softplus(beta_i - dz_kl) per respondent pair.
  std::vector<double> B, C;

  JumpScales scale;
  AcceptStats counter;
  AcceptStats window;  // adaptation batch

  // Scratch for proposals.
  mutable std::vector<double> s_d, s_logd, s_B;
  std::vector<int> order_items, order_resp;
};

/// Pooled layer, one entry per group.
struct GlobalState {
  std::vector<std::vector<double>> gamma, sigma_beta2;
  std::vector<Matrix> mu, sigma_delta2;
  std::vector<std::vector<int>> schools_of_group;
};

struct PoolHandle {
  ThreadPool pool;
  explicit PoolHandle(int n) : pool(n) {}
};

}  // namespace detail

using detail::GlobalState;
using detail::SchoolData;
using detail::SchoolState;

void ChainConfig::validate() const {
  if (n_iter <= 0 || burn_in < 0 || burn_in >= n_iter) {
    throw ValidationError("chain config: need 0 <= burn_in < n_iter");
  }
  if (thin < 1) throw ValidationError("chain config: thin must be >= 1");
  if (d < 1) throw ValidationError("chain config: latent dimension must be >= 1");
  if (!(jump.w > 0 && jump.theta > 0 && jump.z > 0 && jump.beta > 0)) {
    throw ValidationError("chain config: jump scales must be positive");
  }
  if (!(hyper.sigma_gamma2 > 0 && hyper.sigma_theta2 > 0 && hyper.sigma_mu2 > 0 && hyper.a > 0 &&
        hyper.b > 0)) {
    throw ValidationError("chain config: hyperpriors must be positive");
  }
  if (!(target_accept_low > 0 && target_accept_low < target_accept_high &&
        target_accept_high < 1)) {
    throw ValidationError("chain config: invalid target acceptance band");
  }
  if (threads < 1) throw ValidationError("chain config: threads must be >= 1");
  if (d > 16) throw ValidationError("chain config: latent dimension capped at 16");
  if (init_motion) {
    if (init_motion->Q.rows() != d || init_motion->Q.cols() != d ||
        static_cast<int>(init_motion->t.size()) != d) {
      throw ValidationError("chain config: init_motion shape does not match d");
    }
  }
}

std::pair<double, double> hpd_interval(std::vector<double> samples, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("hpd_interval: level must be in (0,1)");
  const int n = static_cast<int>(samples.size());
  if (n < 10) throw DomainError("hpd_interval: need at least 10 samples, got " + std::to_string(n));
  std::sort(samples.begin(), samples.end());
  const int w = std::min(n, static_cast<int>(std::ceil(level * n)));
  double best_lo = samples[0], best_hi = samples[w - 1];
  for (int i = 0; i + w <= n; ++i) {
    if (samples[i + w - 1] - samples[i] < best_hi - best_lo) {
      best_lo = samples[i];
      best_hi = samples[i + w - 1];
    }
  }
  return {best_lo, best_hi};
}

Sampler::Sampler(std::vector<SchoolInput> inputs, ChainConfig config)
    : config_(std::move(config)), global_rng_(0) {
  config_.validate();
  if (inputs.empty()) throw ValidationError("sampler: no schools");

  std::vector<std::optional<std::string>> labels;
  labels.reserve(inputs.size());
  for (const auto& in : inputs) labels.push_back(in.group_label);
  const auto groups = assign_groups(labels, config_.group_mode, &group_names_);
  n_groups_ = static_cast<int>(group_names_.size());

  const int p = inputs[0].school.X.cols();
  if (p < 2) throw ValidationError("sampler: need at least 2 items");

  data_.reserve(inputs.size());
  for (std::size_t m = 0; m < inputs.size(); ++m) {
    auto& in = inputs[m];
    SchoolData sd;
    sd.id = in.school.school_id;
    sd.n = in.school.X.rows();
    sd.p = in.school.X.cols();
    sd.group = groups[m];
    if (sd.p != p) throw ValidationError("sampler: item count differs across schools");
    if (sd.n < 2) throw ValidationError("sampler: school '" + sd.id + "' has fewer than 2 rows");
    if (static_cast<int>(in.nets.item_layers.size()) != sd.p ||
        static_cast<int>(in.nets.person_layers.size()) != sd.n) {
      throw ValidationError("sampler: adjacency layer counts do not match X in '" + sd.id + "'");
    }
    for (int i = 0; i < sd.p; ++i) {
      const auto& Y = in.nets.item_layers[i];
      if (Y.rows() != sd.n || Y.cols() != sd.n) {
        throw ValidationError("sampler: item layer shape mismatch in '" + sd.id + "'");
      }
      for (int k = 0; k < sd.n; ++k) {
        for (int l = 0; l < sd.n; ++l) {
          const std::uint8_t want = k == l ? 0 : (in.school.X(k, i) & in.school.X(l, i));
          if (Y(k, l) != want) {
            throw ValidationError("sampler: item layer inconsistent with X in '" + sd.id + "'");
          }
        }
      }
    }
    for (int k = 0; k < sd.n; ++k) {
      const auto& U = in.nets.person_layers[k];
      if (U.rows() != sd.p || U.cols() != sd.p) {
        throw ValidationError("sampler: person layer shape mismatch in '" + sd.id + "'");
      }
      for (int i = 0; i < sd.p; ++i) {
        for (int j = 0; j < sd.p; ++j) {
          const std::uint8_t want = i == j ? 0 : (in.school.X(k, i) & in.school.X(k, j));
          if (U(i, j) != want) {
            throw ValidationError("sampler: person layer inconsistent with X in '" + sd.id + "'");
          }
        }
      }
    }

    sd.X = std::move(in.school.X);
    sd.nets = std::move(in.nets);

    sd.row_count.assign(sd.n, 0);
    sd.pos_resp.assign(sd.p, {});
    for (int k = 0; k < sd.n; ++k) {
      for (int i = 0; i < sd.p; ++i) {
        if (sd.X(k, i)) {
          ++sd.row_count[k];
          sd.pos_resp[i].push_back(k);
        }
      }
    }
    sd.S1 = Matrix(sd.p, sd.p);
    for (int i = 0; i < sd.p; ++i) {
      for (int j = 0; j < sd.p; ++j) {
        if (i == j) continue;
        double acc = 0.0;
        for (int k = 0; k < sd.n; ++k) acc += sd.X(k, i) & sd.X(k, j);
        sd.S1(i, j) = acc;
      }
    }
    sd.T1 = Matrix(sd.n, sd.n);
    for (int k = 0; k < sd.n; ++k) {
      for (int l = 0; l < sd.n; ++l) {
        if (k == l) continue;
        double acc = 0.0;
        for (int i = 0; i < sd.p; ++i) acc += sd.X(k, i) & sd.X(l, i);
        sd.T1(k, l) = acc;
      }
    }
    sd.theta_pairs.assign(sd.n, 0.0);
    for (int k = 0; k < sd.n; ++k) {
      const int c = sd.row_count[k];
      sd.theta_pairs[k] = 0.5 * c * (c - 1);
    }
    sd.beta_pairs.assign(sd.p, 0.0);
    for (int i = 0; i < sd.p; ++i) {
      const int c = static_cast<int>(sd.pos_resp[i].size());
      sd.beta_pairs[i] = 0.5 * c * (c - 1);
    }
    data_.push_back(std::move(sd));
  }

  global_rng_ = Rng::substream(config_.seed, 0);
  school_rngs_.clear();
  for (std::size_t m = 0; m < data_.size(); ++m) {
    school_rngs_.push_back(Rng::substream(config_.seed, m + 1));
  }
  init_states();
}

Sampler::~Sampler() = default;
Sampler::Sampler(Sampler&&) noexcept = default;
Sampler& Sampler::operator=(Sampler&&) noexcept = default;

void Sampler::init_states() {
  const int d = config_.d;
  states_.clear();
  for (std::size_t m = 0; m < data_.size(); ++m) {
    const auto& sd = data_[m];
    auto st = std::make_unique<SchoolState>();
    auto& rng = school_rngs_[m];

    st->W = Matrix(sd.p, d);
    for (int i = 0; i < sd.p; ++i) {
      for (int c = 0; c < d; ++c) st->W(i, c) = 0.1 * rng.normal();
    }
    st->Z = Matrix(sd.n, d);
    for (int k = 0; k < sd.n; ++k) {
      for (int c = 0; c < d; ++c) st->Z(k, c) = 0.1 * rng.normal();
    }
    if (config_.init_motion) {
      const auto& g = *config_.init_motion;
      auto apply = [&](Matrix& P) {
        std::vector<double> v(d);
        for (int r = 0; r < P.rows(); ++r) {
          for (int c = 0; c < d; ++c) {
            double acc = 0.0;
            for (int c2 = 0; c2 < d; ++c2) acc += g.Q(c, c2) * P(r, c2);
            v[c] = acc + g.t[c];
          }
          for (int c = 0; c < d; ++c) P(r, c) = v[c];
        }
      };
      apply(st->W);
      apply(st->Z);
    }

    st->beta.assign(sd.p, 0.0);
    st->theta.assign(sd.n, 0.0);
    st->sigma_z2 = 1.0;
    st->sigma_dm2 = 1.0;
    st->scale = config_.jump;
    st->order_items.resize(sd.p);
    std::iota(st->order_items.begin(), st->order_items.end(), 0);
    st->order_resp.resize(sd.n);
    std::iota(st->order_resp.begin(), st->order_resp.end(), 0);
    const int buf = std::max(sd.n, sd.p);
    st->s_d.assign(buf, 0.0);
    st->s_logd.assign(buf, 0.0);
    st->s_B.assign(buf, 0.0);
    states_.push_back(std::move(st));
    refresh_derived(static_cast<int>(m));

    // delta starts at the log of the initial distances.
    auto& s = *states_[m];
    s.delta = Matrix(sd.p, sd.p);
    for (int i = 0; i < sd.p; ++i) {
      for (int j = i + 1; j < sd.p; ++j) {
        const double v = s.log_dw[pair_idx(sd.p, i, j)];
        s.delta(i, j) = v;
        s.delta(j, i) = v;
      }
    }
  }

  global_ = std::make_unique<GlobalState>();
  const int p = data_[0].p;
  global_->gamma.assign(n_groups_, std::vector<double>(p, 0.0));
  global_->sigma_beta2.assign(n_groups_, std::vector<double>(p, 1.0));
  global_->sigma_delta2.assign(n_groups_, Matrix(p, p, 1.0));
  for (auto& sdel : global_->sigma_delta2) {
    for (int i = 0; i < p; ++i) sdel(i, i) = 0.0;
  }
  global_->schools_of_group.assign(n_groups_, {});
  for (std::size_t m = 0; m < data_.size(); ++m) {
    global_->schools_of_group[data_[m].group].push_back(static_cast<int>(m));
  }
  // mu starts at the group mean of the initial deltas.
  global_->mu.assign(n_groups_, Matrix(p, p));
  for (int g = 0; g < n_groups_; ++g) {
    const auto& members = global_->schools_of_group[g];
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        double acc = 0.0;
        for (int m : members) acc += states_[m]->delta(i, j);
        const double v = acc / static_cast<double>(members.size());
        global_->mu[g](i, j) = v;
        global_->mu[g](j, i) = v;
      }
    }
  }
}

void Sampler::refresh_derived(int m) {
  const auto& sd = data_[m];
  auto& s = *states_[m];
  const int d = config_.d;
  const int np = sd.p * (sd.p - 1) / 2;
  const int nz = sd.n * (sd.n - 1) / 2;

  s.dw.assign(np, 0.0);
  s.log_dw.assign(np, 0.0);
  for (int i = 0; i < sd.p; ++i) {
    for (int j = i + 1; j < sd.p; ++j) {
      const double v = euclidean(s.W.row(i), s.W.row(j), d);
      s.dw[pair_idx(sd.p, i, j)] = v;
      s.log_dw[pair_idx(sd.p, i, j)] = std::log(v);
    }
  }
  s.dz.assign(nz, 0.0);
  for (int k = 0; k < sd.n; ++k) {
    for (int l = k + 1; l < sd.n; ++l) {
      s.dz[pair_idx(sd.n, k, l)] = euclidean(s.Z.row(k), s.Z.row(l), d);
    }
  }
  s.zmean = Matrix(sd.n, d);
  for (int k = 0; k < sd.n; ++k) {
    const auto mean = link_respondent_centered(s.W, sd.X.row(k), sd.p);
    for (int c = 0; c < d; ++c) s.zmean(k, c) = mean[c];
  }
  s.B.assign(np, 0.0);
  for (int idx = 0; idx < np; ++idx) {
    s.B[idx] = math::sum_softplus_array_minus_scalar(s.theta.data(), sd.n, s.dw[idx]);
  }
  s.C.assign(nz, 0.0);
  for (int idx = 0; idx < nz; ++idx) {
    s.C[idx] = math::sum_softplus_array_minus_scalar(s.beta.data(), sd.p, s.dz[idx]);
  }
}

// ---------------------------------------------------------------------------
// MH moves

double Sampler::item_move_log_ratio(int m, int i, const double* w_new) const {
  const auto& sd = data_[m];
  const auto& s = *states_[m];
  const int d = config_.d;

  double dlik = 0.0, dprior = 0.0;
  for (int j = 0; j < sd.p; ++j) {
    if (j == i) continue;
    const int idx = j < i ? pair_idx(sd.p, j, i) : pair_idx(sd.p, i, j);
    const double dn = euclidean(w_new, s.W.row(j), d);
    if (dn <= 0.0) return kNegInf;
    const double Bn = math::sum_softplus_array_minus_scalar(s.theta.data(), sd.n, dn);
    dlik += -sd.S1(i, j) * (dn - s.dw[idx]) - (Bn - s.B[idx]);
    const double ln = std::log(dn);
    const double del = s.delta(i, j);
    const double lo = s.log_dw[idx];
    dprior += (-(ln + 0.5 * (ln - del) * (ln - del) / s.sigma_dm2)) -
              (-(lo + 0.5 * (lo - del) * (lo - del) / s.sigma_dm2));
  }
  double dlink = 0.0;
  for (int k : sd.pos_resp[i]) {
    double q_old = 0.0, q_new = 0.0;
    const double inv = 1.0 / sd.row_count[k];
    for (int c = 0; c < d; ++c) {
      const double r_old = s.Z(k, c) - s.zmean(k, c);
      const double r_new = s.Z(k, c) - (s.zmean(k, c) + (w_new[c] - s.W(i, c)) * inv);
      q_old += r_old * r_old;
      q_new += r_new * r_new;
    }
    dlink += -(q_new - q_old) / (2.0 * s.sigma_z2);
  }
  return dlik + dprior + dlink;
}

bool Sampler::update_item_position(int m, int i, Rng& rng) {
  const auto& sd = data_[m];
  auto& s = *states_[m];
  const int d = config_.d;

  double prop[16];
  double eps[16];
  for (int c = 0; c < d; ++c) eps[c] = s.scale.w * rng.normal();
  if (config_.init_motion) {
    const auto& Q = config_.init_motion->Q;
    for (int c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int c2 = 0; c2 < d; ++c2) acc += Q(c, c2) * eps[c2];
      prop[c] = s.W(i, c) + acc;
    }
  } else {
    for (int c = 0; c < d; ++c) prop[c] = s.W(i, c) + eps[c];
  }

  // Evaluate and stash per-pair quantities for the accept path.
  double dlik = 0.0, dprior = 0.0;
  bool collision = false;
  for (int j = 0; j < sd.p; ++j) {
    if (j == i) continue;
    const int idx = j < i ? pair_idx(sd.p, j, i) : pair_idx(sd.p, i, j);
    const double dn = euclidean(prop, s.W.row(j), d);
    if (dn <= 0.0) {
      collision = true;
      break;
    }
    const double Bn = math::sum_softplus_array_minus_scalar(s.theta.data(), sd.n, dn);
    s.s_d[j] = dn;
    s.s_B[j] = Bn;
    const double ln = std::log(dn);
    s.s_logd[j] = ln;
    dlik += -sd.S1(i, j) * (dn - s.dw[idx]) - (Bn - s.B[idx]);
    const double del = s.delta(i, j);
    const double lo = s.log_dw[idx];
    dprior += (-(ln + 0.5 * (ln - del) * (ln - del) / s.sigma_dm2)) -
              (-(lo + 0.5 * (lo - del) * (lo - del) / s.sigma_dm2));
  }

  double ratio;
  if (collision) {
    ratio = kNegInf;
  } else {
    double dlink = 0.0;
    for (int k : sd.pos_resp[i]) {
      double q_old = 0.0, q_new = 0.0;
      const double inv = 1.0 / sd.row_count[k];
      for (int c = 0; c < d; ++c) {
        const double r_old = s.Z(k, c) - s.zmean(k, c);
        const double r_new = s.Z(k, c) - (s.zmean(k, c) + (prop[c] - s.W(i, c)) * inv);
        q_old += r_old * r_old;
        q_new += r_new * r_new;
      }
      dlink += -(q_new - q_old) / (2.0 * s.sigma_z2);
    }
    ratio = dlik + dprior + dlink;
  }

  ++s.counter.w.proposals;
  ++s.window.w.proposals;
  bool accept = ratio >= 0.0;
  if (!accept) accept = std::log(rng.uniform_pos()) < ratio;
  if (!accept) return false;

  for (int k : sd.pos_resp[i]) {
    const double inv = 1.0 / sd.row_count[k];
    for (int c = 0; c < d; ++c) s.zmean(k, c) += (prop[c] - s.W(i, c)) * inv;
  }
  for (int c = 0; c < d; ++c) s.W(i, c) = prop[c];
  for (int j = 0; j < sd.p; ++j) {
    if (j == i) continue;
    const int idx = j < i ? pair_idx(sd.p, j, i) : pair_idx(sd.p, i, j);
    s.dw[idx] = s.s_d[j];
    s.log_dw[idx] = s.s_logd[j];
    s.B[idx] = s.s_B[j];
  }
  ++s.counter.w.accepts;
  ++s.window.w.accepts;
  return true;
}

double Sampler::theta_move_log_ratio(int m, int k, double theta_new) const {
  const auto& sd = data_[m];
  const auto& s = *states_[m];
  const int np = sd.p * (sd.p - 1) / 2;
  const double a_old = math::sum_softplus_scalar_minus_array(s.theta[k], s.dw.data(), np);
  const double a_new = math::sum_softplus_scalar_minus_array(theta_new, s.dw.data(), np);
  const double dlik = (theta_new - s.theta[k]) * sd.theta_pairs[k] - (a_new - a_old);
  // factored form: exact zero for an identity proposal under FP contraction
  const double dprior = -(theta_new - s.theta[k]) * (theta_new + s.theta[k]) /
                        (2.0 * config_.hyper.sigma_theta2);
  return dlik + dprior;
}

bool Sampler::update_theta_one(int m, int k, Rng& rng) {
  auto& s = *states_[m];
  const double prop = s.theta[k] + s.scale.theta * rng.normal();
  const double ratio = theta_move_log_ratio(m, k, prop);
  ++s.counter.theta.proposals;
  ++s.window.theta.proposals;
  bool accept = ratio >= 0.0;
  if (!accept) accept = std::log(rng.uniform_pos()) < ratio;
  if (!accept) return false;
  s.theta[k] = prop;
  ++s.counter.theta.accepts;
  ++s.window.theta.accepts;
  return true;
}

double Sampler::z_move_log_ratio(int m, int k, const double* z_new) const {
  const auto& sd = data_[m];
  const auto& s = *states_[m];
  const int d = config_.d;
  double dlik = 0.0;
  for (int l = 0; l < sd.n; ++l) {
    if (l == k) continue;
    const int idx = l < k ? pair_idx(sd.n, l, k) : pair_idx(sd.n, k, l);
    const double dn = euclidean(z_new, s.Z.row(l), d);
    const double Cn = math::sum_softplus_array_minus_scalar(s.beta.data(), sd.p, dn);
    dlik += -sd.T1(k, l) * (dn - s.dz[idx]) - (Cn - s.C[idx]);
  }
  double q_old = 0.0, q_new = 0.0;
  for (int c = 0; c < d; ++c) {
    const double r_old = s.Z(k, c) - s.zmean(k, c);
    const double r_new = z_new[c] - s.zmean(k, c);
    q_old += r_old * r_old;
    q_new += r_new * r_new;
  }
  return dlik - (q_new - q_old) / (2.0 * s.sigma_z2);
}

bool Sampler::update_z_one(int m, int k, Rng& rng) {
  const auto& sd = data_[m];
  auto& s = *states_[m];
  const int d = config_.d;

  double prop[16];
  double eps[16];
  for (int c = 0; c < d; ++c) eps[c] = s.scale.z * rng.normal();
  if (config_.init_motion) {
    const auto& Q = config_.init_motion->Q;
    for (int c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int c2 = 0; c2 < d; ++c2) acc += Q(c, c2) * eps[c2];
      prop[c] = s.Z(k, c) + acc;
    }
  } else {
    for (int c = 0; c < d; ++c) prop[c] = s.Z(k, c) + eps[c];
  }

  double dlik = 0.0;
  for (int l = 0; l < sd.n; ++l) {
    if (l == k) continue;
    const int idx = l < k ? pair_idx(sd.n, l, k) : pair_idx(sd.n, k, l);
    const double dn = euclidean(prop, s.Z.row(l), d);
    const double Cn = math::sum_softplus_array_minus_scalar(s.beta.data(), sd.p, dn);
    s.s_d[l] = dn;
    s.s_B[l] = Cn;
    dlik += -sd.T1(k, l) * (dn - s.dz[idx]) - (Cn - s.C[idx]);
  }
  double q_old = 0.0, q_new = 0.0;
  for (int c = 0; c < d; ++c) {
    const double r_old = s.Z(k, c) - s.zmean(k, c);
    const double r_new = prop[c] - s.zmean(k, c);
    q_old += r_old * r_old;
    q_new += r_new * r_new;
  }
  const double ratio = dlik - (q_new - q_old) / (2.0 * s.sigma_z2);

  ++s.counter.z.proposals;
  ++s.window.z.proposals;
  bool accept = ratio >= 0.0;
  if (!accept) accept = std::log(rng.uniform_pos()) < ratio;
  if (!accept) return false;

  for (int c = 0; c < d; ++c) s.Z(k, c) = prop[c];
  for (int l = 0; l < sd.n; ++l) {
    if (l == k) continue;
    const int idx = l < k ? pair_idx(sd.n, l, k) : pair_idx(sd.n, k, l);
    s.dz[idx] = s.s_d[l];
    s.C[idx] = s.s_B[l];
  }
  ++s.counter.z.accepts;
  ++s.window.z.accepts;
  return true;
}

double Sampler::beta_move_log_ratio(int m, int i, double beta_new) const {
  const auto& sd = data_[m];
  const auto& s = *states_[m];
  const int nz = sd.n * (sd.n - 1) / 2;
  const double g = global_->gamma[sd.group][i];
  const double v = global_->sigma_beta2[sd.group][i];
  const double d_old = math::sum_softplus_scalar_minus_array(s.beta[i], s.dz.data(), nz);
  const double d_new = math::sum_softplus_scalar_minus_array(beta_new, s.dz.data(), nz);
  const double dlik = (beta_new - s.beta[i]) * sd.beta_pairs[i] - (d_new - d_old);
  const double dprior = -(beta_new - s.beta[i]) * (beta_new + s.beta[i] - 2.0 * g) / (2.0 * v);
  return dlik + dprior;
}

bool Sampler::update_beta_one(int m, int i, Rng& rng) {
  auto& s = *states_[m];
  const double prop = s.beta[i] + s.scale.beta * rng.normal();
  const double ratio = beta_move_log_ratio(m, i, prop);
  ++s.counter.beta.proposals;
  ++s.window.beta.proposals;
  bool accept = ratio >= 0.0;
  if (!accept) accept = std::log(rng.uniform_pos()) < ratio;
  if (!accept) return false;
  s.beta[i] = prop;
  ++s.counter.beta.accepts;
  ++s.window.beta.accepts;
  return true;
}

// ---------------------------------------------------------------------------
// Sweeps

void Sampler::step_update_W(int m, Rng& rng) {
  const auto& sd = data_[m];
  auto& s = *states_[m];
  const int d = config_.d;
  // theta moved last iteration; refresh the pair cache and the linking
  // means (the latter also bounds incremental float drift).
  const int np = sd.p * (sd.p - 1) / 2;
  for (int idx = 0; idx < np; ++idx) {
    s.B[idx] = math::sum_softplus_array_minus_scalar(s.theta.data(), sd.n, s.dw[idx]);
  }
  for (int k = 0; k < sd.n; ++k) {
    const auto* xr = sd.X.row(k);
    double acc[16] = {};
    for (int i = 0; i < sd.p; ++i) {
      if (xr[i]) {
        for (int c = 0; c < d; ++c) acc[c] += s.W(i, c);
      }
    }
    if (sd.row_count[k] > 0) {
      for (int c = 0; c < d; ++c) s.zmean(k, c) = acc[c] / sd.row_count[k];
    } else {
      for (int c = 0; c < d; ++c) s.zmean(k, c) = 0.0;
    }
  }
  rng.shuffle(s.order_items);
  for (int i : s.order_items) update_item_position(m, i, rng);
}

void Sampler::step_update_theta(int m, Rng& rng) {
  auto& s = *states_[m];
  rng.shuffle(s.order_resp);
  for (int k : s.order_resp) update_theta_one(m, k, rng);
}

void Sampler::step_update_Z(int m, Rng& rng) {
  const auto& sd = data_[m];
  auto& s = *states_[m];
  // beta moved last iteration; refresh the pair cache.
  const int nz = sd.n * (sd.n - 1) / 2;
  for (int idx = 0; idx < nz; ++idx) {
    s.C[idx] = math::sum_softplus_array_minus_scalar(s.beta.data(), sd.p, s.dz[idx]);
  }
  rng.shuffle(s.order_resp);
  for (int k : s.order_resp) update_z_one(m, k, rng);
}

void Sampler::step_update_beta(int m, Rng& rng) {
  auto& s = *states_[m];
  rng.shuffle(s.order_items);
  for (int i : s.order_items) update_beta_one(m, i, rng);
}

// ---------------------------------------------------------------------------
// Closed-form conditionals

IgParams Sampler::sigma_dm2_conditional(int m) const {
  const auto& sd = data_[m];
  const auto& s = *states_[m];
  const auto& mu_g = global_->mu[sd.group];
  const double np = 0.5 * sd.p * (sd.p - 1);
  double q_d = 0.0, q_shrink = 0.0;
  for (int i = 0; i < sd.p; ++i) {
    for (int j = i + 1; j < sd.p; ++j) {
      const double r = s.log_dw[pair_idx(sd.p, i, j)] - s.delta(i, j);
      q_d += r * r;
      const double h = s.delta(i, j) - mu_g(i, j);
      q_shrink += h * h;
    }
  }
  return {config_.hyper.a + 0.5 * np,
          config_.hyper.b + 0.5 * q_d + 0.5 * (np / (np + 1.0)) * q_shrink};
}

IgParams Sampler::sigma_delta2_conditional(int g, int i, int j) const {
  const auto& members = global_->schools_of_group[g];
  const double mg = static_cast<double>(members.size());
  const double mu_ij = global_->mu[g](i, j);
  double q = 0.0;
  for (int m : members) {
    const double r = states_[m]->delta(i, j) - mu_ij;
    q += r * r;
  }
  return {config_.hyper.a + 0.5 * mg,
          config_.hyper.b + 0.5 * q + 0.5 * (mg / (mg + 1.0)) * mu_ij * mu_ij};
}

IgParams Sampler::sigma_z2_conditional(int m) const {
  const auto& sd = data_[m];
  const auto& s = *states_[m];
  const int d = config_.d;
  double q = 0.0;
  for (int k = 0; k < sd.n; ++k) {
    for (int c = 0; c < d; ++c) {
      const double r = s.Z(k, c) - s.zmean(k, c);
      q += r * r;
    }
  }
  return {config_.hyper.a + 0.5 * sd.n * d, config_.hyper.b + 0.5 * q};
}

IgParams Sampler::sigma_beta2_conditional(int g, int i) const {
  const auto& members = global_->schools_of_group[g];
  const double mg = static_cast<double>(members.size());
  const double gam = global_->gamma[g][i];
  double q = 0.0;
  for (int m : members) {
    const double r = states_[m]->beta[i] - gam;
    q += r * r;
  }
  return {config_.hyper.a + 0.5 * mg,
          config_.hyper.b + 0.5 * q + 0.5 * (mg / (mg + 1.0)) * gam * gam};
}

NormalParams Sampler::delta_conditional(int m, int i, int j) const {
  const auto& sd = data_[m];
  const auto& s = *states_[m];
  const double prec_d = 1.0 / s.sigma_dm2;
  const double prec_del = 1.0 / global_->sigma_delta2[sd.group](i, j);
  const double mu_ij = global_->mu[sd.group](i, j);
  const double prec = prec_d + prec_del;
  const double mean = (s.log_dw[pair_idx(sd.p, i, j)] * prec_d + mu_ij * prec_del) / prec;
  return {mean, 1.0 / prec};
}

NormalParams Sampler::mu_conditional(int g, int i, int j) const {
  const auto& members = global_->schools_of_group[g];
  const double mg = static_cast<double>(members.size());
  const double sdel = global_->sigma_delta2[g](i, j);
  double sum = 0.0;
  for (int m : members) sum += states_[m]->delta(i, j);
  const double prec = 1.0 / config_.hyper.sigma_mu2 + mg / sdel;
  return {(sum / sdel) / prec, 1.0 / prec};
}

NormalParams Sampler::gamma_conditional(int g, int i) const {
  const auto& members = global_->schools_of_group[g];
  const double mg = static_cast<double>(members.size());
  const double v = global_->sigma_beta2[g][i];
  double sum = 0.0;
  for (int m : members) sum += states_[m]->beta[i];
  const double prec = 1.0 / config_.hyper.sigma_gamma2 + mg / v;
  return {(sum / v) / prec, 1.0 / prec};
}

void Sampler::step_gibbs_distance_variances(Rng& rng) {
  for (std::size_t m = 0; m < data_.size(); ++m) {
    const auto [shape, scale] = sigma_dm2_conditional(static_cast<int>(m));
    states_[m]->sigma_dm2 = rng.inv_gamma(shape, scale);
  }
  const int p = data_[0].p;
  for (int g = 0; g < n_groups_; ++g) {
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const auto [shape, scale] = sigma_delta2_conditional(g, i, j);
        const double v = rng.inv_gamma(shape, scale);
        global_->sigma_delta2[g](i, j) = v;
        global_->sigma_delta2[g](j, i) = v;
      }
    }
  }
}

void Sampler::step_gibbs_delta_mu(Rng& rng) {
  const int p = data_[0].p;
  for (std::size_t m = 0; m < data_.size(); ++m) {
    auto& s = *states_[m];
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const auto [mean, var] = delta_conditional(static_cast<int>(m), i, j);
        const double v = rng.normal(mean, std::sqrt(var));
        s.delta(i, j) = v;
        s.delta(j, i) = v;
      }
    }
  }
  for (int g = 0; g < n_groups_; ++g) {
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const auto [mean, var] = mu_conditional(g, i, j);
        const double v = rng.normal(mean, std::sqrt(var));
        global_->mu[g](i, j) = v;
        global_->mu[g](j, i) = v;
      }
    }
  }
}

void Sampler::step_gibbs_sigma_z(int m, Rng& rng) {
  const auto [shape, scale] = sigma_z2_conditional(m);
  states_[m]->sigma_z2 = rng.inv_gamma(shape, scale);
}

void Sampler::step_gibbs_gamma_sigma_beta(Rng& rng) {
  const int p = data_[0].p;
  for (int g = 0; g < n_groups_; ++g) {
    for (int i = 0; i < p; ++i) {
      const auto [shape, scale] = sigma_beta2_conditional(g, i);
      global_->sigma_beta2[g][i] = rng.inv_gamma(shape, scale);
      const auto [mean, var] = gamma_conditional(g, i);
      global_->gamma[g][i] = rng.normal(mean, std::sqrt(var));
    }
  }
}

// ---------------------------------------------------------------------------

void Sampler::iteration(int iter_index) {
  parallel_schools([&](int m) {
    auto& rng = school_rngs_[m];
    step_update_W(m, rng);
    step_update_theta(m, rng);
  });
  step_gibbs_distance_variances(global_rng_);
  step_gibbs_delta_mu(global_rng_);
  parallel_schools([&](int m) {
    auto& rng = school_rngs_[m];
    step_update_Z(m, rng);
    step_gibbs_sigma_z(m, rng);
    step_update_beta(m, rng);
  });
  step_gibbs_gamma_sigma_beta(global_rng_);
  if (config_.adapt && iter_index <= config_.burn_in && iter_index % kAdaptWindow == 0) {
    adapt_scales(iter_index);
  }
  check_finite(iter_index);
}

void Sampler::adapt_scales(int iter_index) {
  const double target = 0.5 * (config_.target_accept_low + config_.target_accept_high);
  const double step = 1.0 / std::sqrt(static_cast<double>(iter_index) / kAdaptWindow);
  for (auto& stp : states_) {
    auto tune = [&](FamilyCounter& cnt, double& scale) {
      if (cnt.proposals == 0) return;
      scale = std::clamp(scale * std::exp(step * (cnt.rate() - target)), 1e-4, 50.0);
      cnt = FamilyCounter{};
    };
    tune(stp->window.w, stp->scale.w);
    tune(stp->window.theta, stp->scale.theta);
    tune(stp->window.z, stp->scale.z);
    tune(stp->window.beta, stp->scale.beta);
  }
}

void Sampler::check_finite(int iter_index) const {
  auto bad = [iter_index](const char* what) {
    throw ChainError("non-finite " + std::string(what) + " at iteration " +
                     std::to_string(iter_index));
  };
  for (std::size_t m = 0; m < data_.size(); ++m) {
    const auto& s = *states_[m];
    if (!(std::isfinite(s.sigma_z2) && s.sigma_z2 > 0)) bad("sigma_z2");
    if (!(std::isfinite(s.sigma_dm2) && s.sigma_dm2 > 0)) bad("sigma_dm2");
    for (double v : s.beta)
      if (!std::isfinite(v)) bad("beta");
    for (double v : s.theta)
      if (!std::isfinite(v)) bad("theta");
    for (std::size_t q = 0; q < s.Z.size(); ++q)
      if (!std::isfinite(s.Z.data()[q])) bad("Z");
    for (std::size_t q = 0; q < s.W.size(); ++q)
      if (!std::isfinite(s.W.data()[q])) bad("W");
    for (std::size_t q = 0; q < s.delta.size(); ++q)
      if (!std::isfinite(s.delta.data()[q])) bad("delta");
  }
  for (int g = 0; g < n_groups_; ++g) {
    for (double v : global_->gamma[g])
      if (!std::isfinite(v)) bad("gamma");
    for (double v : global_->sigma_beta2[g])
      if (!(std::isfinite(v) && v > 0)) bad("sigma_beta2");
    for (std::size_t q = 0; q < global_->mu[g].size(); ++q)
      if (!std::isfinite(global_->mu[g].data()[q])) bad("mu");
  }
}

void Sampler::parallel_schools(const std::function<void(int)>& fn) {
  const int M = static_cast<int>(data_.size());
  if (config_.threads <= 1 || M == 1) {
    for (int m = 0; m < M; ++m) fn(m);
    return;
  }
  if (pool_ == nullptr) {
    pool_ = std::make_unique<detail::PoolHandle>(std::min(config_.threads, M));
  }
  pool_->pool.parallel_for(M, fn);
}

double Sampler::log_posterior() const {
  const auto& hp = config_.hyper;
  double lp = 0.0;
  for (std::size_t m = 0; m < data_.size(); ++m) {
    const auto& sd = data_[m];
    const auto& s = *states_[m];
    lp += loglik_person_network(sd.nets.item_layers, s.Z, s.beta);
    lp += loglik_item_network(sd.nets.person_layers, s.W, s.theta);
    for (int k = 0; k < sd.n; ++k) {
      for (int c = 0; c < config_.d; ++c) {
        lp += math::normal_logpdf(s.Z(k, c), s.zmean(k, c), s.sigma_z2);
      }
      lp += math::normal_logpdf(s.theta[k], 0.0, hp.sigma_theta2);
    }
    lp += logprior_beta(s.beta, global_->gamma[sd.group], global_->sigma_beta2[sd.group]);
    for (int i = 0; i < sd.p; ++i) {
      for (int j = i + 1; j < sd.p; ++j) {
        const int idx = pair_idx(sd.p, i, j);
        lp += math::lognormal_logpdf(s.dw[idx], s.delta(i, j), s.sigma_dm2);
        lp += math::normal_logpdf(s.delta(i, j), global_->mu[sd.group](i, j),
                                  global_->sigma_delta2[sd.group](i, j));
      }
    }
    lp += math::invgamma_logpdf(s.sigma_z2, hp.a, hp.b);
    lp += math::invgamma_logpdf(s.sigma_dm2, hp.a, hp.b);
  }
  const int p = data_[0].p;
  for (int g = 0; g < n_groups_; ++g) {
    for (int i = 0; i < p; ++i) {
      lp += math::normal_logpdf(global_->gamma[g][i], 0.0, hp.sigma_gamma2);
      lp += math::invgamma_logpdf(global_->sigma_beta2[g][i], hp.a, hp.b);
      for (int j = i + 1; j < p; ++j) {
        lp += math::normal_logpdf(global_->mu[g](i, j), 0.0, hp.sigma_mu2);
        lp += math::invgamma_logpdf(global_->sigma_delta2[g](i, j), hp.a, hp.b);
      }
    }
  }
  return lp;
}

PosteriorSamples Sampler::run() {
  const auto t0 = std::chrono::steady_clock::now();
  {
    const double lp = log_posterior();
    if (!std::isfinite(lp)) {
      throw ChainError("non-finite log-posterior at initialization: " + std::to_string(lp));
    }
  }

  PosteriorSamples out;
  out.config = config_;
  out.M = static_cast<int>(data_.size());
  out.p = data_[0].p;
  out.d = config_.d;
  out.n_groups = n_groups_;
  out.group_names = group_names_;
  const int n_draws = (config_.n_iter - config_.burn_in) / config_.thin;
  for (const auto& sd : data_) {
    out.school_ids.push_back(sd.id);
    out.group_of_school.push_back(sd.group);
    out.n_per_school.push_back(sd.n);
  }
  const int np = out.npairs();
  out.beta.assign(out.M, {});
  out.theta.assign(out.M, {});
  out.sigma_dm2.assign(out.M, {});
  out.sigma_z2.assign(out.M, {});
  out.delta_mean.assign(out.M, Matrix(out.p, out.p));
  out.item_dist_mean.assign(out.M, Matrix(out.p, out.p));
  for (int m = 0; m < out.M; ++m) {
    out.beta[m].reserve(static_cast<std::size_t>(n_draws) * out.p);
    out.theta[m].reserve(static_cast<std::size_t>(n_draws) * data_[m].n);
    out.sigma_dm2[m].reserve(n_draws);
    out.sigma_z2[m].reserve(n_draws);
  }
  out.gamma.assign(n_groups_, {});
  out.sigma_beta2.assign(n_groups_, {});
  out.mu.assign(n_groups_, {});
  out.sigma_delta2.assign(n_groups_, {});
  if (config_.store_item_distances) out.item_dist_draws.assign(out.M, {});
  if (config_.store_person_distances) out.person_dist_draws.assign(out.M, {});
  if (config_.store_delta_draws) out.delta_draws.assign(out.M, {});
  if (config_.store_positions) {
    out.z_draws.assign(out.M, {});
    out.w_draws.assign(out.M, {});
  }
  for (int g = 0; g < n_groups_; ++g) {
    out.gamma[g].reserve(static_cast<std::size_t>(n_draws) * out.p);
    out.mu[g].reserve(static_cast<std::size_t>(n_draws) * np);
  }

  for (int iter = 1; iter <= config_.n_iter; ++iter) {
    iteration(iter);
    if (iter > config_.burn_in && (iter - config_.burn_in) % config_.thin == 0) {
      store_draw(out);
    }
    if (config_.progress_every > 0 && iter % config_.progress_every == 0) {
      std::fprintf(stderr, "iteration %d/%d\n", iter, config_.n_iter);
    }
  }
  out.n_draws = static_cast<int>(out.sigma_dm2.empty() ? 0 : out.sigma_dm2[0].size());

  for (int m = 0; m < out.M; ++m) {
    const double inv = out.n_draws > 0 ? 1.0 / out.n_draws : 0.0;
    for (std::size_t q = 0; q < out.delta_mean[m].size(); ++q) {
      out.delta_mean[m].data()[q] *= inv;
      out.item_dist_mean[m].data()[q] *= inv;
    }
    out.accept_by_school.push_back(states_[m]->counter);
    out.final_scales.push_back(states_[m]->scale);
    out.accept.w += states_[m]->counter.w;
    out.accept.theta += states_[m]->counter.theta;
    out.accept.z += states_[m]->counter.z;
    out.accept.beta += states_[m]->counter.beta;
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void Sampler::store_draw(PosteriorSamples& out) {
  for (int m = 0; m < out.M; ++m) {
    const auto& sd = data_[m];
    const auto& s = *states_[m];
    out.beta[m].insert(out.beta[m].end(), s.beta.begin(), s.beta.end());
    out.theta[m].insert(out.theta[m].end(), s.theta.begin(), s.theta.end());
    out.sigma_dm2[m].push_back(s.sigma_dm2);
    out.sigma_z2[m].push_back(s.sigma_z2);
    for (int i = 0; i < sd.p; ++i) {
      for (int j = i + 1; j < sd.p; ++j) {
        const int idx = pair_idx(sd.p, i, j);
        out.delta_mean[m](i, j) += s.delta(i, j);
        out.delta_mean[m](j, i) += s.delta(i, j);
        out.item_dist_mean[m](i, j) += s.dw[idx];
        out.item_dist_mean[m](j, i) += s.dw[idx];
      }
    }
    if (config_.store_item_distances) {
      out.item_dist_draws[m].insert(out.item_dist_draws[m].end(), s.dw.begin(), s.dw.end());
    }
    if (config_.store_person_distances) {
      out.person_dist_draws[m].insert(out.person_dist_draws[m].end(), s.dz.begin(), s.dz.end());
    }
    if (config_.store_delta_draws) {
      for (int i = 0; i < sd.p; ++i) {
        for (int j = i + 1; j < sd.p; ++j) out.delta_draws[m].push_back(s.delta(i, j));
      }
    }
    if (config_.store_positions) {
      out.z_draws[m].insert(out.z_draws[m].end(), s.Z.data(), s.Z.data() + s.Z.size());
      out.w_draws[m].insert(out.w_draws[m].end(), s.W.data(), s.W.data() + s.W.size());
    }
  }
  for (int g = 0; g < n_groups_; ++g) {
    out.gamma[g].insert(out.gamma[g].end(), global_->gamma[g].begin(), global_->gamma[g].end());
    out.sigma_beta2[g].insert(out.sigma_beta2[g].end(), global_->sigma_beta2[g].begin(),
                              global_->sigma_beta2[g].end());
    const int p = out.p;
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        out.mu[g].push_back(global_->mu[g](i, j));
        out.sigma_delta2[g].push_back(global_->sigma_delta2[g](i, j));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Accessors

AcceptStats Sampler::accept_stats() const {
  AcceptStats out;
  for (const auto& st : states_) {
    out.w += st->counter.w;
    out.theta += st->counter.theta;
    out.z += st->counter.z;
    out.beta += st->counter.beta;
  }
  return out;
}

int Sampler::n_schools() const { return static_cast<int>(data_.size()); }
int Sampler::n_groups() const { return n_groups_; }
const BitMatrix& Sampler::responses(int m) const { return data_[m].X; }
const std::string& Sampler::school_id(int m) const { return data_[m].id; }
int Sampler::group_of_school(int m) const { return data_[m].group; }
int Sampler::school_size(int m) const { return data_[m].n; }
const Matrix& Sampler::Z(int m) const { return states_[m]->Z; }
const Matrix& Sampler::W(int m) const { return states_[m]->W; }
const std::vector<double>& Sampler::beta(int m) const { return states_[m]->beta; }
const std::vector<double>& Sampler::theta(int m) const { return states_[m]->theta; }
double Sampler::sigma_z2(int m) const { return states_[m]->sigma_z2; }
double Sampler::sigma_dm2(int m) const { return states_[m]->sigma_dm2; }
const Matrix& Sampler::delta(int m) const { return states_[m]->delta; }
const std::vector<double>& Sampler::gamma(int g) const { return global_->gamma[g]; }
const std::vector<double>& Sampler::sigma_beta2(int g) const { return global_->sigma_beta2[g]; }
const Matrix& Sampler::mu(int g) const { return global_->mu[g]; }
const Matrix& Sampler::sigma_delta2(int g) const { return global_->sigma_delta2[g]; }

double Sampler::item_distance(int m, int i, int j) const {
  if (i == j) return 0.0;
  if (j < i) std::swap(i, j);
  return states_[m]->dw[pair_idx(data_[m].p, i, j)];
}

std::vector<double> Sampler::linking_mean(int m, int k) const {
  const auto& s = *states_[m];
  std::vector<double> mean(config_.d);
  for (int c = 0; c < config_.d; ++c) mean[c] = s.zmean(k, c);
  return mean;
}

void Sampler::set_Z(int m, const Matrix& Z) { states_[m]->Z = Z; }
void Sampler::set_W(int m, const Matrix& W) { states_[m]->W = W; }
void Sampler::set_beta(int m, const std::vector<double>& beta) { states_[m]->beta = beta; }
void Sampler::set_theta(int m, const std::vector<double>& theta) { states_[m]->theta = theta; }
void Sampler::set_sigma_z2(int m, double v) { states_[m]->sigma_z2 = v; }
void Sampler::set_sigma_dm2(int m, double v) { states_[m]->sigma_dm2 = v; }
void Sampler::set_delta(int m, const Matrix& delta) { states_[m]->delta = delta; }
void Sampler::set_gamma(int g, const std::vector<double>& gamma) { global_->gamma[g] = gamma; }
void Sampler::set_sigma_beta2(int g, const std::vector<double>& v) {
  global_->sigma_beta2[g] = v;
}
void Sampler::set_mu(int g, const Matrix& mu) { global_->mu[g] = mu; }
void Sampler::set_sigma_delta2(int g, const Matrix& v) { global_->sigma_delta2[g] = v; }

PosteriorSamples run_chain(std::vector<SchoolInput> inputs, const ChainConfig& config) {
  Sampler s(std::move(inputs), config);
  return s.run();
}

}  // namespace hnirm
