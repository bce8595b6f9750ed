#pragma once

#include <map>
#include <string>
#include <vector>

#include "hnirm/dataset.hpp"
#include "hnirm/diagnostics.hpp"
#include "hnirm/postprocess.hpp"
#include "hnirm/sampler.hpp"

namespace hnirm::io {

/// FNV-1a 64-bit digest, hex-encoded.
std::string fnv1a64_hex(const std::string& bytes);
std::string file_digest(const std::string& path);

/// Flat key=value config file ('#' comments, blank lines ignored).
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Write text to path atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& text);

struct RunBundle {
  PosteriorSamples samples;
  std::vector<std::string> item_ids;
  std::vector<BinarySchoolMatrix> schools;  // binarized inputs, school order
  std::vector<std::vector<std::string>> respondent_ids;
};

/// Everything cmd_fit persists: one CSV per parameter family (long format),
/// the binarized inputs, and manifest.json (written last, atomically).
void write_run(const std::string& dir, const PosteriorSamples& samples,
               const std::vector<std::string>& item_ids,
               const std::vector<BinarySchoolMatrix>& schools,
               const std::vector<std::vector<std::string>>& respondent_ids,
               const std::string& input_path, const std::string& input_digest);

/// Load a run directory back (inverse of write_run).
RunBundle read_run(const std::string& dir);

/// Dataset CSV emitter (the wide format load_responses reads).
void write_dataset_wide(const std::string& path, const ResponseDataset& dataset);

struct GroundTruthFiles {
  std::vector<std::string> school_ids, item_ids;
  std::vector<Matrix> Z, W;
  std::vector<std::vector<double>> beta, theta;
  std::vector<double> gamma;
  Matrix mu;
  std::vector<int> item_cluster;
};

void write_ground_truth(const std::string& dir, const GroundTruthFiles& files);

void write_summary_csv(const std::string& path, const SummaryTable& table,
                       const std::vector<std::string>& school_ids,
                       const std::vector<std::string>& group_names,
                       const std::vector<std::string>& item_ids);

void write_embedding_csv(const std::string& path, const Embedding& emb,
                         const std::vector<std::string>& row_ids, const std::string& id_column);

void write_clusters_csv(const std::string& path,
                        const std::vector<std::pair<std::string, std::vector<int>>>& kinds,
                        const std::vector<std::vector<std::string>>& ids);

void write_integrated_csv(const std::string& path, const IntegratedSpace& space,
                          const std::vector<std::string>& item_ids,
                          const std::vector<std::string>& school_ids);

void write_diagnostics_csv(const std::string& dir, const DiagnosticsReport& report);

}  // namespace hnirm::io
