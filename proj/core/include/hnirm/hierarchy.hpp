#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hnirm/dataset.hpp"
#include "hnirm/types.hpp"

namespace hnirm {

/// Fixed hyperparameters. Defaults follow the shipped run configuration:
/// sd 10 on the pooled intercepts/means and IG(0.01, 0.01) on variances.
struct HyperPriors {
  double sigma_gamma2 = 100.0;
  double sigma_theta2 = 100.0;
  double sigma_mu2 = 100.0;
  double a = 0.01;
  double b = 0.01;
};

enum class GroupMode { Single, ByLabel };

/// Between-school layer. gamma/sigma_beta2/mu/sigma_delta2 are per group
/// (one group in single-group mode); delta and sigma_dm2 are per school.
struct HierarchicalState {
  int n_groups = 1;
  std::vector<std::vector<double>> gamma;        // [g][i]
  std::vector<std::vector<double>> sigma_beta2;  // [g][i]
  std::vector<Matrix> delta;                     // [m], p x p symmetric, zero diag
  std::vector<double> sigma_dm2;                 // [m]
  std::vector<Matrix> mu;                        // [g], p x p symmetric, zero diag
  std::vector<Matrix> sigma_delta2;              // [g], p x p positive entries
  std::vector<int> group_of_school;              // [m]
};

/// Gaussian prior of one school's item intercepts around the pooled ones.
double logprior_beta(const std::vector<double>& beta_m, const std::vector<double>& gamma_g,
                     const std::vector<double>& sigma_beta2_g);

/// Log-normal prior of the between-item distances: sum over pairs i<j of the
/// log-normal density with log-scale mean delta_m and variance sigma_dm2.
/// Any nonpositive off-diagonal distance yields -inf.
double logprior_distances(const Matrix& d_w, const Matrix& delta_m, double sigma_dm2);

/// Gaussian hyper-prior of delta_m around the pooled mu, summed over i<j.
double logprior_delta(const Matrix& delta_m, const Matrix& mu_g, const Matrix& sigma_delta2_g);

/// Map schools to groups: Single puts every school in group 0; ByLabel
/// enumerates distinct labels in school order and requires every school to
/// carry one.
std::vector<int> assign_groups(const std::vector<std::optional<std::string>>& labels,
                               GroupMode mode, std::vector<std::string>* group_names = nullptr);

std::vector<int> assign_groups(const ResponseDataset& dataset, GroupMode mode,
                               std::vector<std::string>* group_names = nullptr);

}  // namespace hnirm
