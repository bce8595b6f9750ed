#include "hnirm/postprocess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hnirm/math.hpp"
#include "hnirm/within_school.hpp"

namespace hnirm {
namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  }
  return out;
}

Matrix from_eigen(const Eigen::MatrixXd& m) {
  Matrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  }
  return out;
}

void require_square_symmetric(const Matrix& D, const char* what) {
  if (D.rows() != D.cols()) throw DomainError(std::string(what) + ": matrix must be square");
  for (int i = 0; i < D.rows(); ++i) {
    if (D(i, i) != 0.0) throw DomainError(std::string(what) + ": diagonal must be zero");
    for (int j = 0; j < i; ++j) {
      if (std::abs(D(i, j) - D(j, i)) > 1e-9 * (1.0 + std::abs(D(i, j)))) {
        throw DomainError(std::string(what) + ": matrix must be symmetric");
      }
      if (D(i, j) < 0.0) throw DomainError(std::string(what) + ": entries must be nonnegative");
    }
  }
}

// Pool-adjacent-violators for a nondecreasing fit, unit weights.
std::vector<double> pava(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> mean(n);
  std::vector<int> count(n);
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean[blocks] = y[i];
    count[blocks] = 1;
    ++blocks;
    while (blocks > 1 && mean[blocks - 2] > mean[blocks - 1]) {
      const double tot = mean[blocks - 2] * count[blocks - 2] + mean[blocks - 1] * count[blocks - 1];
      count[blocks - 2] += count[blocks - 1];
      mean[blocks - 2] = tot / count[blocks - 2];
      --blocks;
    }
  }
  std::vector<double> fit(n);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (int c = 0; c < count[b]; ++c) fit[pos++] = mean[b];
  }
  return fit;
}

struct KMeansOut {
  std::vector<int> labels;
  double inertia = 0.0;
};

KMeansOut kmeans(const Eigen::MatrixXd& X, int k, Rng& rng, int restarts) {
  const int n = static_cast<int>(X.rows());
  KMeansOut best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    // k-means++ seeding
    Eigen::MatrixXd centers(k, X.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    int first = static_cast<int>(rng.uniform_below(n));
    centers.row(0) = X.row(first);
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], (X.row(i) - centers.row(c - 1)).squaredNorm());
        total += d2[i];
      }
      int pick = n - 1;
      if (total > 0.0) {
        const double u = rng.uniform() * total;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc >= u) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<int>(rng.uniform_below(n));
      }
      centers.row(c) = X.row(pick);
    }

    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int bestc = 0;
        double bestd = (X.row(i) - centers.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double d = (X.row(i) - centers.row(c)).squaredNorm();
          if (d < bestd) {
            bestd = d;
            bestc = c;
          }
        }
        if (labels[i] != bestc) {
          labels[i] = bestc;
          changed = true;
        }
      }
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
      std::vector<int> counts(k, 0);
      for (int i = 0; i < n; ++i) {
        sums.row(labels[i]) += X.row(i);
        ++counts[labels[i]];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) {
          // revive an empty cluster at the point farthest from its center
          int far_i = 0;
          double far_d = -1.0;
          for (int i = 0; i < n; ++i) {
            const double d = (X.row(i) - centers.row(labels[i])).squaredNorm();
            if (d > far_d) {
              far_d = d;
              far_i = i;
            }
          }
          centers.row(c) = X.row(far_i);
          labels[far_i] = c;
          changed = true;
        } else {
          centers.row(c) = sums.row(c) / counts[c];
        }
      }
      if (!changed) break;
    }
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += (X.row(i) - centers.row(labels[i])).squaredNorm();
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.labels = labels;
    }
  }
  return best;
}

}  // namespace

ProcrustesResult procrustes_align(const std::vector<Matrix>& position_draws,
                                  const Matrix& reference) {
  if (position_draws.empty()) throw DomainError("procrustes_align: no draws");
  const int r = reference.rows();
  const int d = reference.cols();
  for (const auto& P : position_draws) {
    if (P.rows() != r || P.cols() != d) {
      throw DomainError("procrustes_align: draw shape does not match reference");
    }
  }
  const Eigen::MatrixXd ref = to_eigen(reference);
  const Eigen::RowVectorXd ref_mean = ref.colwise().mean();
  const Eigen::MatrixXd ref_c = ref.rowwise() - ref_mean;

  ProcrustesResult out;
  out.aligned.reserve(position_draws.size());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(r, d);
  for (const auto& P : position_draws) {
    Eigen::MatrixXd X = to_eigen(P);
    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    const Eigen::MatrixXd M = Xc.transpose() * ref_c;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::MatrixXd A;
    if (sv(0) <= 0.0 || sv(sv.size() - 1) / sv(0) < 1e-12) {
      ++out.fallback_count;  // translation-only
      A = Xc;
    } else {
      A = Xc * (svd.matrixU() * svd.matrixV().transpose());
    }
    A.rowwise() += ref_mean;
    acc += A;
    out.aligned.push_back(from_eigen(A));
  }
  acc /= static_cast<double>(position_draws.size());
  out.mean = from_eigen(acc);
  return out;
}

ClusterResult spectral_cluster(const Matrix& distance_matrix, int k, Rng& rng) {
  require_square_symmetric(distance_matrix, "spectral_cluster");
  const int r = distance_matrix.rows();
  if (k < 2 || k >= r) throw DomainError("spectral_cluster: need 2 <= k < r");

  std::vector<double> offdiag;
  offdiag.reserve(static_cast<std::size_t>(r) * (r - 1) / 2);
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) offdiag.push_back(distance_matrix(i, j));
  }
  std::sort(offdiag.begin(), offdiag.end());
  const std::size_t h = offdiag.size() / 2;
  double bandwidth = offdiag.size() % 2 ? offdiag[h] : 0.5 * (offdiag[h - 1] + offdiag[h]);
  if (!(bandwidth > 0.0)) {
    throw DomainError("spectral_cluster: degenerate geometry (median distance is zero)");
  }

  Eigen::MatrixXd A(r, r);
  Eigen::VectorXd deg(r);
  int widen = 0;
  for (;; ++widen) {
    for (int i = 0; i < r; ++i) {
      A(i, i) = 0.0;
      for (int j = 0; j < r; ++j) {
        if (i == j) continue;
        const double q = distance_matrix(i, j) / bandwidth;
        A(i, j) = std::exp(-0.5 * q * q);
      }
    }
    deg = A.rowwise().sum();
    if (deg.minCoeff() > 1e-12) break;
    if (widen >= 3) {
      throw DomainError("spectral_cluster: similarity graph disconnected after widening");
    }
    bandwidth *= 2.0;
  }

  Eigen::MatrixXd N(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) N(i, j) = A(i, j) / std::sqrt(deg(i) * deg(j));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (N + N.transpose()));
  Eigen::MatrixXd U = es.eigenvectors().rightCols(k);
  for (int i = 0; i < r; ++i) {
    const double nrm = U.row(i).norm();
    if (nrm > 0.0) U.row(i) /= nrm;
  }
  auto km = kmeans(U, k, rng, 20);
  ClusterResult out;
  out.labels = std::move(km.labels);
  out.bandwidth = bandwidth;
  out.inertia = km.inertia;
  return out;
}

Embedding kruskal_mds(const Matrix& dissimilarity, int dim, Rng& rng, int max_iter, double tol) {
  require_square_symmetric(dissimilarity, "kruskal_mds");
  const int r = dissimilarity.rows();
  if (r < dim + 1) {
    throw DomainError("kruskal_mds: need at least dim+1 points, got " + std::to_string(r));
  }

  Embedding emb;
  bool all_zero = true;
  for (int i = 0; i < r && all_zero; ++i) {
    for (int j = i + 1; j < r; ++j) {
      if (dissimilarity(i, j) != 0.0) {
        all_zero = false;
        break;
      }
    }
  }
  if (all_zero) {
    emb.positions = Matrix(r, dim);
    emb.degenerate = true;
    return emb;
  }

  // Classical scaling start.
  Eigen::MatrixXd D2(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) D2(i, j) = dissimilarity(i, j) * dissimilarity(i, j);
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(r, r) -
                      Eigen::MatrixXd::Constant(r, r, 1.0 / r);
  Eigen::MatrixXd B = -0.5 * J * D2 * J;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));
  Eigen::MatrixXd X(r, dim);
  for (int c = 0; c < dim; ++c) {
    const int idx = r - 1 - c;  // eigenvalues ascending
    const double lam = std::max(es.eigenvalues()(idx), 0.0);
    X.col(c) = es.eigenvectors().col(idx) * std::sqrt(lam);
  }
  // Break exact collapses so the Guttman transform can move every point.
  for (int c = 0; c < dim; ++c) {
    if (X.col(c).norm() == 0.0) {
      for (int i = 0; i < r; ++i) X(i, c) = 1e-6 * rng.normal();
    }
  }

  const int npairs = r * (r - 1) / 2;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(npairs);
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) pairs.emplace_back(i, j);
  }

  std::vector<int> order(npairs);
  std::vector<double> dist(npairs), fit_in(npairs), dhat(npairs);
  double stress = std::numeric_limits<double>::infinity();

  for (int it = 0; it < max_iter; ++it) {
    for (int q = 0; q < npairs; ++q) {
      dist[q] = (X.row(pairs[q].first) - X.row(pairs[q].second)).norm();
    }
    // Primary approach to ties: within equal dissimilarities the fit is
    // unconstrained, realized by ordering tied pairs by current distance.
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = dissimilarity(pairs[a].first, pairs[a].second);
      const double db = dissimilarity(pairs[b].first, pairs[b].second);
      if (da != db) return da < db;
      if (dist[a] != dist[b]) return dist[a] < dist[b];
      return a < b;
    });
    for (int q = 0; q < npairs; ++q) fit_in[q] = dist[order[q]];
    const auto fit = pava(fit_in);
    for (int q = 0; q < npairs; ++q) dhat[order[q]] = fit[q];

    double num = 0.0, den = 0.0;
    for (int q = 0; q < npairs; ++q) {
      num += (dist[q] - dhat[q]) * (dist[q] - dhat[q]);
      den += dist[q] * dist[q];
    }
    const double s = den > 0.0 ? std::sqrt(num / den) : 0.0;
    emb.stress_history.push_back(s);
    if (std::abs(stress - s) < tol || s < 1e-14) {
      stress = s;
      break;
    }
    stress = s;
    if (it == max_iter - 1) break;  // keep emb.stress in sync with positions

    // Guttman transform with the fitted disparities.
    Eigen::MatrixXd Xn = Eigen::MatrixXd::Zero(r, dim);
    for (int q = 0; q < npairs; ++q) {
      const auto [i, j] = pairs[q];
      const double w = dist[q] > 0.0 ? dhat[q] / dist[q] : 0.0;
      Xn.row(i) += w * (X.row(i) - X.row(j));
      Xn.row(j) += w * (X.row(j) - X.row(i));
    }
    X = Xn / static_cast<double>(r);
  }

  emb.positions = from_eigen(X);
  emb.stress = stress;
  return emb;
}

std::pair<SchoolDistanceMatrix, Embedding> school_space_from_delta(
    const std::vector<Matrix>& delta_means, int dim, Rng& rng) {
  const int M = static_cast<int>(delta_means.size());
  if (M < 2) throw DomainError("school_space_from_delta: need at least 2 schools");
  SchoolDistanceMatrix sdm;
  sdm.construction = SchoolSpaceConstruction::DeltaBased;
  sdm.S = Matrix(M, M);
  const int p = delta_means[0].rows();
  for (int q = 0; q < M; ++q) {
    for (int s = q + 1; s < M; ++s) {
      double acc = 0.0;
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          if (i == j) continue;
          const double dq = delta_means[q](i, j) - delta_means[s](i, j);
          acc += dq * dq;
        }
      }
      const double v = std::sqrt(acc);
      sdm.S(q, s) = v;
      sdm.S(s, q) = v;
    }
  }
  Embedding emb = kruskal_mds(sdm.S, dim, rng);
  return {std::move(sdm), std::move(emb)};
}

MuSpaceResult school_space_from_mu(const Matrix& mu_mean,
                                   const std::vector<BinarySchoolMatrix>& schools, int dim,
                                   Rng& rng, SchoolAggregation agg, LinkingMode linking) {
  if (linking != LinkingMode::RespondentCentered) {
    throw ValidationError(
        "school_space_from_mu: only supported with respondent-centered linking");
  }
  const int p = mu_mean.rows();
  Matrix diss(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) diss(i, j) = i == j ? 0.0 : std::exp(mu_mean(i, j));
  }
  MuSpaceResult out;
  out.items = kruskal_mds(diss, dim, rng);

  const int M = static_cast<int>(schools.size());
  out.schools.positions = Matrix(M, dim);
  std::vector<double> axis;
  for (int m = 0; m < M; ++m) {
    const auto& X = schools[m].X;
    const int n = X.rows();
    Matrix resp(n, dim);
    for (int k = 0; k < n; ++k) {
      const auto mean = link_respondent_centered(out.items.positions, X.row(k), p);
      for (int c = 0; c < dim; ++c) resp(k, c) = mean[c];
    }
    for (int c = 0; c < dim; ++c) {
      if (agg == SchoolAggregation::Mean) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += resp(k, c);
        out.schools.positions(m, c) = acc / n;
      } else {
        axis.clear();
        for (int k = 0; k < n; ++k) axis.push_back(resp(k, c));
        std::sort(axis.begin(), axis.end());
        out.schools.positions(m, c) =
            n % 2 ? axis[n / 2] : 0.5 * (axis[n / 2 - 1] + axis[n / 2]);
      }
    }
  }
  out.S.construction = SchoolSpaceConstruction::MuBased;
  out.S.S = pairwise_distances(out.schools.positions);
  return out;
}

IntegratedSpace integrate_item_school_space(const Embedding& items, const Embedding& schools) {
  const int d = items.positions.cols();
  if (schools.positions.cols() != d) {
    throw DomainError("integrate_item_school_space: dimension mismatch");
  }
  IntegratedSpace out;
  const int ni = items.positions.rows();
  const int ns = schools.positions.rows();
  out.positions = Matrix(ni + ns, d);

  auto standardize = [&](const Matrix& P, int row0) {
    for (int c = 0; c < d; ++c) {
      double m = 0.0;
      for (int r = 0; r < P.rows(); ++r) m += P(r, c);
      m /= P.rows();
      double var = 0.0;
      for (int r = 0; r < P.rows(); ++r) var += (P(r, c) - m) * (P(r, c) - m);
      var /= P.rows();
      if (var > 0.0) {
        const double sd = std::sqrt(var);
        for (int r = 0; r < P.rows(); ++r) out.positions(row0 + r, c) = (P(r, c) - m) / sd;
      } else {
        // zero-variance axis: center only
        if (std::find(out.centered_only_axes.begin(), out.centered_only_axes.end(), c) ==
            out.centered_only_axes.end()) {
          out.centered_only_axes.push_back(c);
        }
        for (int r = 0; r < P.rows(); ++r) out.positions(row0 + r, c) = P(r, c) - m;
      }
    }
  };
  standardize(items.positions, 0);
  standardize(schools.positions, ni);
  for (int r = 0; r < ni; ++r) {
    out.role.push_back("item");
    out.index.push_back(r);
  }
  for (int r = 0; r < ns; ++r) {
    out.role.push_back("school");
    out.index.push_back(r);
  }
  return out;
}

SummaryTable summarize(const PosteriorSamples& s, double level) {
  SummaryTable table;
  table.level = level;
  const int np = s.npairs();

  auto series_of = [&](const std::vector<double>& flat, int stride, int offset) {
    std::vector<double> out;
    out.reserve(s.n_draws);
    for (int t = 0; t < s.n_draws; ++t) out.push_back(flat[static_cast<std::size_t>(t) * stride + offset]);
    return out;
  };
  auto add = [&](const std::string& family, int g, int m, int i, int j,
                 std::vector<double> series) {
    SummaryTable::Row row;
    row.family = family;
    row.group = g;
    row.school = m;
    row.i = i;
    row.j = j;
    row.mean = math::mean(series);
    const auto [lo, hi] = hpd_interval(std::move(series), level);
    row.hpd_lo = lo;
    row.hpd_hi = hi;
    row.excludes_zero = lo > 0.0 || hi < 0.0;
    table.rows.push_back(row);
  };

  for (int m = 0; m < s.M; ++m) {
    for (int i = 0; i < s.p; ++i) add("beta", -1, m, i, -1, series_of(s.beta[m], s.p, i));
    for (int k = 0; k < s.n_per_school[m]; ++k) {
      add("theta", -1, m, k, -1, series_of(s.theta[m], s.n_per_school[m], k));
    }
    add("sigma_d2", -1, m, -1, -1, s.sigma_dm2[m]);
    add("sigma_z2", -1, m, -1, -1, s.sigma_z2[m]);
  }
  for (int g = 0; g < s.n_groups; ++g) {
    for (int i = 0; i < s.p; ++i) {
      add("gamma", g, -1, i, -1, series_of(s.gamma[g], s.p, i));
      add("sigma_beta2", g, -1, i, -1, series_of(s.sigma_beta2[g], s.p, i));
    }
    for (int i = 0; i < s.p; ++i) {
      for (int j = i + 1; j < s.p; ++j) {
        const int idx = s.pair_index(i, j);
        add("mu", g, -1, i, j, series_of(s.mu[g], np, idx));
        add("sigma_delta2", g, -1, i, j, series_of(s.sigma_delta2[g], np, idx));
      }
    }
  }
  if (s.n_groups >= 2) {
    for (int g = 1; g < s.n_groups; ++g) {
      for (int i = 0; i < s.p; ++i) {
        auto a = series_of(s.gamma[g], s.p, i);
        const auto b = series_of(s.gamma[0], s.p, i);
        for (std::size_t t = 0; t < a.size(); ++t) a[t] -= b[t];
        add("gamma_diff", g, -1, i, -1, std::move(a));
      }
    }
  }
  return table;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw DomainError("adjusted_rand_index: label vectors must be same nonempty size");
  }
  const int n = static_cast<int>(a.size());
  const int ka = 1 + *std::max_element(a.begin(), a.end());
  const int kb = 1 + *std::max_element(b.begin(), b.end());
  std::vector<std::vector<long long>> table(ka, std::vector<long long>(kb, 0));
  for (int t = 0; t < n; ++t) ++table[a[t]][b[t]];
  auto choose2 = [](long long v) { return v * (v - 1) / 2; };
  long long sum_ij = 0, sum_a = 0, sum_b = 0;
  for (int i = 0; i < ka; ++i) {
    long long row = 0;
    for (int j = 0; j < kb; ++j) {
      sum_ij += choose2(table[i][j]);
      row += table[i][j];
    }
    sum_a += choose2(row);
  }
  for (int j = 0; j < kb; ++j) {
    long long col = 0;
    for (int i = 0; i < ka; ++i) col += table[i][j];
    sum_b += choose2(col);
  }
  const double expected = static_cast<double>(sum_a) * sum_b / choose2(n);
  const double maxidx = 0.5 * (sum_a + sum_b);
  if (maxidx == expected) return 1.0;
  return (sum_ij - expected) / (maxidx - expected);
}

}  // namespace hnirm
