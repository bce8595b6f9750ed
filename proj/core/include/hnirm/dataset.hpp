#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hnirm/types.hpp"

namespace hnirm {

/// Multilevel item-response data after ingestion filtering: every respondent
/// has a code for every item, belongs to exactly one school, and schools and
/// respondents are in sorted-id order.
struct ResponseDataset {
  struct Respondent {
    std::string id;
    int school = 0;  // index into school_ids
    std::vector<int> codes;
  };

  std::vector<std::string> item_ids;
  std::vector<std::string> school_ids;
  std::vector<std::optional<std::string>> group_labels;  // per school
  std::vector<Respondent> respondents;                   // grouped by school
  std::vector<int> school_offsets;                       // size M+1
  int dropped_count = 0;  // respondents removed for missing items

  int n_schools() const { return static_cast<int>(school_ids.size()); }
  int n_items() const { return static_cast<int>(item_ids.size()); }
  int n_in_school(int m) const { return school_offsets[m + 1] - school_offsets[m]; }
  int n_respondents() const { return static_cast<int>(respondents.size()); }
};

enum class CsvFormat { Wide, Long };
enum class CodeMode { Likert, Binary };

/// One school's dichotomized responses, rows = respondents, cols = items.
struct BinarySchoolMatrix {
  std::string school_id;
  BitMatrix X;
};

/// Co-positivity adjacency layers of one school: item_layers[i](k,l) =
/// X(k,i)*X(l,i) and person_layers[k](i,j) = X(k,i)*X(k,j), symmetric with
/// zero diagonals.
struct MultiplexNetworks {
  std::vector<BitMatrix> item_layers;    // p matrices, each n x n
  std::vector<BitMatrix> person_layers;  // n matrices, each p x p
};

/// Parse a UTF-8 CSV (header required) in wide or long layout. Respondents
/// with any missing item are dropped and counted in dropped_count.
ResponseDataset load_responses(const std::string& path, CsvFormat format);

/// Same, from an in-memory buffer (used by tests and the simulate path).
ResponseDataset load_responses_text(const std::string& text, CsvFormat format,
                                    const std::string& origin = "<memory>");

/// Threshold Likert codes at `cut` (code >= cut maps to 1), or validate and
/// pass through already-binary codes. One matrix per school in school order.
std::vector<BinarySchoolMatrix> dichotomize(const ResponseDataset& dataset, int cut,
                                            CodeMode mode = CodeMode::Likert);

/// Build both adjacency families of one school from its binary matrix.
MultiplexNetworks build_multiplex(const BinarySchoolMatrix& school);

}  // namespace hnirm
