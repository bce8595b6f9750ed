#include "hnirm/within_school.hpp"

#include <cmath>

#include "hnirm/math.hpp"

namespace hnirm {

double euclidean(const double* a, const double* b, int d) {
  double q = 0.0;
  for (int c = 0; c < d; ++c) {
    const double r = a[c] - b[c];
    q += r * r;
  }
  return std::sqrt(q);
}

double edge_logit_person(double beta_i, const double* z_k, const double* z_l, int d) {
  return beta_i - euclidean(z_k, z_l, d);
}

double edge_logit_item(double theta_k, const double* w_i, const double* w_j, int d) {
  return theta_k - euclidean(w_i, w_j, d);
}

double loglik_person_network(const std::vector<BitMatrix>& item_layers, const Matrix& Z,
                             const std::vector<double>& beta) {
  const int n = Z.rows();
  const int d = Z.cols();
  double ll = 0.0;
  for (std::size_t i = 0; i < item_layers.size(); ++i) {
    const auto& Y = item_layers[i];
    for (int k = 1; k < n; ++k) {
      for (int l = 0; l < k; ++l) {
        const double eta = beta[i] - euclidean(Z.row(k), Z.row(l), d);
        ll += math::bernoulli_logit_loglik(Y(k, l) != 0, eta);
      }
    }
  }
  return ll;
}

double loglik_item_network(const std::vector<BitMatrix>& person_layers, const Matrix& W,
                           const std::vector<double>& theta) {
  const int p = W.rows();
  const int d = W.cols();
  double ll = 0.0;
  for (std::size_t k = 0; k < person_layers.size(); ++k) {
    const auto& U = person_layers[k];
    for (int i = 1; i < p; ++i) {
      for (int j = 0; j < i; ++j) {
        const double eta = theta[k] - euclidean(W.row(i), W.row(j), d);
        ll += math::bernoulli_logit_loglik(U(i, j) != 0, eta);
      }
    }
  }
  return ll;
}

std::vector<double> link_respondent_centered(const Matrix& W, const std::uint8_t* x_row, int p) {
  const int d = W.cols();
  std::vector<double> mean(d, 0.0);
  int count = 0;
  for (int i = 0; i < p; ++i) {
    if (x_row[i]) {
      for (int c = 0; c < d; ++c) mean[c] += W(i, c);
      ++count;
    }
  }
  if (count == 0) return mean;  // all-negative row: origin
  for (double& v : mean) v /= count;
  return mean;
}

std::vector<double> link_item_centered(const Matrix& Z, const std::vector<std::uint8_t>& x_col) {
  const int d = Z.cols();
  std::vector<double> mean(d, 0.0);
  int count = 0;
  for (int k = 0; k < Z.rows(); ++k) {
    if (x_col[k]) {
      for (int c = 0; c < d; ++c) mean[c] += Z(k, c);
      ++count;
    }
  }
  if (count == 0) return mean;
  for (double& v : mean) v /= count;
  return mean;
}

Matrix pairwise_distances(const Matrix& P) {
  const int r = P.rows();
  Matrix D(r, r);
  for (int i = 1; i < r; ++i) {
    for (int j = 0; j < i; ++j) {
      const double v = euclidean(P.row(i), P.row(j), P.cols());
      D(i, j) = v;
      D(j, i) = v;
    }
  }
  return D;
}

}  // namespace hnirm
