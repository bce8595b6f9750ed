#pragma once

#include <vector>

#include "hnirm/dataset.hpp"
#include "hnirm/types.hpp"

namespace hnirm {

/// Per-school latent-space state. d_w is the deterministic distance matrix
/// of the current W; the sampler recomputes affected entries after every
/// accepted item move.
struct WithinSchoolState {
  Matrix Z;                   // n x d respondent positions
  Matrix W;                   // p x d item positions
  std::vector<double> beta;   // p item intercepts
  std::vector<double> theta;  // n respondent intercepts
  double sigma_z2 = 1.0;      // respondent-centered linking variance
  Matrix d_w;                 // p x p between-item distances
  // Item-centered linking error variance (eq. counterpart of sigma_z2).
  // Housed for the alternative linking route; it has no update rule in the
  // shipped sampler and stays at its initial value.
  double sigma_eps2 = 1.0;
};

double euclidean(const double* a, const double* b, int d);

/// Log odds that respondents k,l both answer an item positively.
double edge_logit_person(double beta_i, const double* z_k, const double* z_l, int d);

/// Log odds that items i,j are both answered positively by a respondent.
double edge_logit_item(double theta_k, const double* w_i, const double* w_j, int d);

/// Bernoulli log-likelihood of all item layers: sum over items i and pairs
/// k<l with logit beta_i - ||z_k - z_l||.
double loglik_person_network(const std::vector<BitMatrix>& item_layers, const Matrix& Z,
                             const std::vector<double>& beta);

/// Mirror over respondents k and item pairs i<j with logit
/// theta_k - ||w_i - w_j||.
double loglik_item_network(const std::vector<BitMatrix>& person_layers, const Matrix& W,
                           const std::vector<double>& theta);

/// Prior mean of z_k: average item position over positively answered items;
/// origin when the row is all zero.
std::vector<double> link_respondent_centered(const Matrix& W, const std::uint8_t* x_row, int p);

/// Prior mean of w_i under the item-centered alternative: average position
/// of respondents who answered item i positively; origin when none did.
std::vector<double> link_item_centered(const Matrix& Z, const std::vector<std::uint8_t>& x_col);

/// All pairwise Euclidean row distances; symmetric, zero diagonal.
Matrix pairwise_distances(const Matrix& P);

}  // namespace hnirm
