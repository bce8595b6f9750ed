#pragma once

#include <string>
#include <vector>

#include "hnirm/dataset.hpp"
#include "hnirm/rng.hpp"
#include "hnirm/sampler.hpp"
#include "hnirm/types.hpp"

namespace hnirm {

/// A low-dimensional point configuration with its fit quality.
struct Embedding {
  Matrix positions;  // r x d
  double stress = 0.0;
  std::vector<int> labels;  // optional cluster assignment
  bool degenerate = false;
  std::vector<double> stress_history;
};

enum class SchoolSpaceConstruction { DeltaBased, MuBased };

struct SchoolDistanceMatrix {
  Matrix S;  // M x M symmetric, zero diagonal
  SchoolSpaceConstruction construction = SchoolSpaceConstruction::DeltaBased;
};

struct ProcrustesResult {
  std::vector<Matrix> aligned;
  Matrix mean;             // posterior-mean configuration
  int fallback_count = 0;  // draws aligned translation-only
};

/// Rotate/reflect/translate each draw onto the reference (least squares).
/// Pairwise distances within every draw are preserved.
ProcrustesResult procrustes_align(const std::vector<Matrix>& position_draws,
                                  const Matrix& reference);

struct ClusterResult {
  std::vector<int> labels;
  double bandwidth = 0.0;  // Gaussian kernel width actually used
  double inertia = 0.0;    // best k-means within-cluster sum of squares
};

/// Normalized spectral clustering: Gaussian similarity (median-distance
/// bandwidth), symmetric-normalized Laplacian, top-k eigenvectors with row
/// normalization, then seeded k-means with restarts. The bandwidth widens
/// x2 up to 3 times if the similarity graph is numerically disconnected.
ClusterResult spectral_cluster(const Matrix& distance_matrix, int k, Rng& rng);

/// Nonmetric multidimensional scaling: classical-scaling start, then
/// alternating isotonic regression on dissimilarity ranks and Guttman
/// transform updates, minimizing Kruskal stress-1.
Embedding kruskal_mds(const Matrix& dissimilarity, int dim, Rng& rng, int max_iter = 1000,
                      double tol = 1e-10);

/// Frobenius distances between school-level mean log-distance matrices
/// (full-matrix convention: both (i,j) and (j,i) enter the sum), embedded
/// with kruskal_mds.
std::pair<SchoolDistanceMatrix, Embedding> school_space_from_delta(
    const std::vector<Matrix>& delta_means, int dim, Rng& rng);

enum class LinkingMode { RespondentCentered, ItemCentered };
enum class SchoolAggregation { Mean, Median };

struct MuSpaceResult {
  Embedding items;    // global item space from exp(mu)
  Embedding schools;  // school positions in the same coordinates
  SchoolDistanceMatrix S;
};

/// School space via the pooled mean dependence matrix: embed exp(mu), place
/// respondents by positive-response averaging, aggregate per school.
/// Requires respondent-centered linking.
MuSpaceResult school_space_from_mu(const Matrix& mu_mean,
                                   const std::vector<BinarySchoolMatrix>& schools, int dim,
                                   Rng& rng,
                                   SchoolAggregation agg = SchoolAggregation::Mean,
                                   LinkingMode linking = LinkingMode::RespondentCentered);

struct IntegratedSpace {
  Matrix positions;               // items first, then schools
  std::vector<std::string> role;  // "item" or "school"
  std::vector<int> index;         // row index within its own embedding
  std::vector<int> centered_only_axes;  // zero-variance axes (flagged)
};

/// Standardize both embeddings per axis (zero mean, unit variance) and stack
/// them with role tags for overlay plotting.
IntegratedSpace integrate_item_school_space(const Embedding& items, const Embedding& schools);

struct SummaryTable {
  struct Row {
    std::string family;
    int group = -1, school = -1, i = -1, j = -1;
    double mean = 0.0, hpd_lo = 0.0, hpd_hi = 0.0;
    bool excludes_zero = false;
  };
  std::vector<Row> rows;
  double level = 0.95;
};

/// Posterior means and HPD intervals for every monitored family; for
/// multiple-group fits, adds per-item group-difference rows with an
/// HPD-excludes-zero flag.
SummaryTable summarize(const PosteriorSamples& samples, double level = 0.95);

/// Chance-corrected agreement between two labelings (1.0 = identical).
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace hnirm
