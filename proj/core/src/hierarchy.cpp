#include "hnirm/hierarchy.hpp"

#include <cmath>
#include <limits>

#include "hnirm/math.hpp"

namespace hnirm {

double logprior_beta(const std::vector<double>& beta_m, const std::vector<double>& gamma_g,
                     const std::vector<double>& sigma_beta2_g) {
  double lp = 0.0;
  for (std::size_t i = 0; i < beta_m.size(); ++i) {
    if (!(sigma_beta2_g[i] > 0.0)) throw DomainError("logprior_beta: nonpositive variance");
    lp += math::normal_logpdf(beta_m[i], gamma_g[i], sigma_beta2_g[i]);
  }
  return lp;
}

double logprior_distances(const Matrix& d_w, const Matrix& delta_m, double sigma_dm2) {
  if (!(sigma_dm2 > 0.0)) throw DomainError("logprior_distances: nonpositive variance");
  const int p = d_w.rows();
  double lp = 0.0;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const double v = math::lognormal_logpdf(d_w(i, j), delta_m(i, j), sigma_dm2);
      if (v == -std::numeric_limits<double>::infinity()) return v;
      lp += v;
    }
  }
  return lp;
}

double logprior_delta(const Matrix& delta_m, const Matrix& mu_g, const Matrix& sigma_delta2_g) {
  const int p = delta_m.rows();
  double lp = 0.0;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (!(sigma_delta2_g(i, j) > 0.0)) throw DomainError("logprior_delta: nonpositive variance");
      lp += math::normal_logpdf(delta_m(i, j), mu_g(i, j), sigma_delta2_g(i, j));
    }
  }
  return lp;
}

std::vector<int> assign_groups(const std::vector<std::optional<std::string>>& labels,
                               GroupMode mode, std::vector<std::string>* group_names) {
  std::vector<int> groups(labels.size(), 0);
  if (mode == GroupMode::Single) {
    if (group_names) *group_names = {"all"};
    return groups;
  }
  std::vector<std::string> names;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    if (!labels[m]) {
      throw ValidationError("group mode by_label: school index " + std::to_string(m) +
                            " has no group label");
    }
    int g = -1;
    for (std::size_t q = 0; q < names.size(); ++q) {
      if (names[q] == *labels[m]) g = static_cast<int>(q);
    }
    if (g < 0) {
      g = static_cast<int>(names.size());
      names.push_back(*labels[m]);
    }
    groups[m] = g;
  }
  if (group_names) *group_names = names;
  return groups;
}

std::vector<int> assign_groups(const ResponseDataset& dataset, GroupMode mode,
                               std::vector<std::string>* group_names) {
  return assign_groups(dataset.group_labels, mode, group_names);
}

}  // namespace hnirm
