#include "hnirm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hnirm {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == ".";
}

int parse_code(const std::string& s, const std::string& origin, std::size_t line_no) {
  int v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(origin + ":" + std::to_string(line_no) + ": malformed response code '" + s +
                     "'");
  }
  return v;
}

struct RawRespondent {
  std::string id;
  std::string school;
  std::optional<std::string> group;
  std::vector<std::optional<int>> codes;
};

ResponseDataset assemble(std::vector<RawRespondent> raw, std::vector<std::string> item_ids,
                         const std::string& origin) {
  if (item_ids.size() < 2) {
    throw SchemaError(origin + ": need at least 2 items, found " +
                      std::to_string(item_ids.size()));
  }

  ResponseDataset ds;
  ds.item_ids = std::move(item_ids);

  // Listwise deletion of respondents with any missing item.
  std::vector<RawRespondent> kept;
  kept.reserve(raw.size());
  for (auto& r : raw) {
    const bool complete =
        std::all_of(r.codes.begin(), r.codes.end(), [](const auto& c) { return c.has_value(); });
    if (complete) {
      kept.push_back(std::move(r));
    } else {
      ++ds.dropped_count;
    }
  }

  // Respondent ids are global: one id, one school.
  std::map<std::string, std::string> school_of;
  for (const auto& r : kept) {
    auto [it, inserted] = school_of.emplace(r.id, r.school);
    if (!inserted) {
      if (it->second == r.school) {
        throw ValidationError(origin + ": duplicated respondent_id '" + r.id + "' in school '" +
                              r.school + "'");
      }
      throw ValidationError(origin + ": respondent_id '" + r.id + "' appears in schools '" +
                            it->second + "' and '" + r.school + "'");
    }
  }

  std::set<std::string> school_set;
  for (const auto& r : kept) school_set.insert(r.school);
  ds.school_ids.assign(school_set.begin(), school_set.end());
  ds.group_labels.assign(ds.school_ids.size(), std::nullopt);

  std::map<std::string, int> school_index;
  for (int m = 0; m < ds.n_schools(); ++m) school_index[ds.school_ids[m]] = m;

  for (const auto& r : kept) {
    const int m = school_index[r.school];
    if (r.group) {
      if (ds.group_labels[m] && *ds.group_labels[m] != *r.group) {
        throw ValidationError(origin + ": school '" + r.school +
                              "' carries conflicting group labels '" + *ds.group_labels[m] +
                              "' and '" + *r.group + "'");
      }
      ds.group_labels[m] = r.group;
    }
  }

  std::sort(kept.begin(), kept.end(), [&](const RawRespondent& a, const RawRespondent& b) {
    const int ma = school_index[a.school], mb = school_index[b.school];
    if (ma != mb) return ma < mb;
    return a.id < b.id;
  });

  ds.respondents.reserve(kept.size());
  for (auto& r : kept) {
    ResponseDataset::Respondent out;
    out.id = std::move(r.id);
    out.school = school_index[r.school];
    out.codes.reserve(r.codes.size());
    for (const auto& c : r.codes) out.codes.push_back(*c);
    ds.respondents.push_back(std::move(out));
  }

  ds.school_offsets.assign(ds.n_schools() + 1, 0);
  for (const auto& r : ds.respondents) ++ds.school_offsets[r.school + 1];
  for (int m = 0; m < ds.n_schools(); ++m) ds.school_offsets[m + 1] += ds.school_offsets[m];

  for (int m = 0; m < ds.n_schools(); ++m) {
    if (ds.n_in_school(m) < 2) {
      throw ValidationError(origin + ": school '" + ds.school_ids[m] + "' has " +
                            std::to_string(ds.n_in_school(m)) +
                            " complete respondents; at least 2 required");
    }
  }
  if (ds.n_schools() == 0) throw ValidationError(origin + ": no complete respondents");
  return ds;
}

ResponseDataset parse_wide(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(origin + ": empty file");
  auto header = split_csv(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 2 || header[0] != "respondent_id" || header[1] != "school_id") {
    throw SchemaError(origin + ": wide header must start with respondent_id,school_id");
  }
  std::size_t first_item = 2;
  bool has_group = false;
  if (header.size() > 2 && header[2] == "group_label") {
    has_group = true;
    first_item = 3;
  }
  std::vector<std::string> item_ids(header.begin() + first_item, header.end());

  std::vector<RawRespondent> raw;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    RawRespondent r;
    r.id = trim(fields[0]);
    r.school = trim(fields[1]);
    if (r.id.empty() || r.school.empty()) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": empty respondent or school id");
    }
    if (has_group) {
      const auto g = trim(fields[2]);
      if (!g.empty()) r.group = g;
    }
    r.codes.reserve(item_ids.size());
    for (std::size_t c = first_item; c < fields.size(); ++c) {
      const auto f = trim(fields[c]);
      if (is_missing(f)) {
        r.codes.emplace_back(std::nullopt);
      } else {
        r.codes.emplace_back(parse_code(f, origin, line_no));
      }
    }
    raw.push_back(std::move(r));
  }
  return assemble(std::move(raw), std::move(item_ids), origin);
}

ResponseDataset parse_long(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(origin + ": empty file");
  auto header = split_csv(line);
  for (auto& h : header) h = trim(h);
  if (header.size() != 4 || header[0] != "respondent_id" || header[1] != "school_id" ||
      header[2] != "item_id" || header[3] != "code") {
    throw SchemaError(origin + ": long header must be respondent_id,school_id,item_id,code");
  }

  std::vector<std::string> item_ids;
  std::map<std::string, int> item_index;
  struct Cell {
    std::string school;
    std::map<int, int> codes;  // item index -> code
  };
  std::vector<std::string> respondent_order;
  std::map<std::string, Cell> cells;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": expected 4 fields, found " +
                       std::to_string(fields.size()));
    }
    const auto rid = trim(fields[0]);
    const auto school = trim(fields[1]);
    const auto item = trim(fields[2]);
    const auto code_str = trim(fields[3]);
    if (rid.empty() || school.empty() || item.empty()) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": empty id field");
    }
    auto [iit, inserted] = item_index.emplace(item, static_cast<int>(item_ids.size()));
    if (inserted) item_ids.push_back(item);

    auto cit = cells.find(rid);
    if (cit == cells.end()) {
      cit = cells.emplace(rid, Cell{school, {}}).first;
      respondent_order.push_back(rid);
    } else if (cit->second.school != school) {
      throw ValidationError(origin + ":" + std::to_string(line_no) + ": respondent_id '" + rid +
                            "' appears in schools '" + cit->second.school + "' and '" + school +
                            "'");
    }
    if (is_missing(code_str)) continue;  // treated as absent -> listwise deletion
    const int code = parse_code(code_str, origin, line_no);
    if (!cit->second.codes.emplace(iit->second, code).second) {
      throw ValidationError(origin + ":" + std::to_string(line_no) + ": duplicate response of '" +
                            rid + "' to item '" + item + "'");
    }
  }

  std::vector<RawRespondent> raw;
  raw.reserve(respondent_order.size());
  for (const auto& rid : respondent_order) {
    const auto& cell = cells[rid];
    RawRespondent r;
    r.id = rid;
    r.school = cell.school;
    r.codes.assign(item_ids.size(), std::nullopt);
    for (const auto& [idx, code] : cell.codes) r.codes[idx] = code;
    raw.push_back(std::move(r));
  }
  return assemble(std::move(raw), std::move(item_ids), origin);
}

}  // namespace

ResponseDataset load_responses(const std::string& path, CsvFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return format == CsvFormat::Wide ? parse_wide(in, path) : parse_long(in, path);
}

ResponseDataset load_responses_text(const std::string& text, CsvFormat format,
                                    const std::string& origin) {
  std::istringstream in(text);
  return format == CsvFormat::Wide ? parse_wide(in, origin) : parse_long(in, origin);
}

std::vector<BinarySchoolMatrix> dichotomize(const ResponseDataset& dataset, int cut,
                                            CodeMode mode) {
  if (mode == CodeMode::Likert && (cut < 2 || cut > 5)) {
    throw DomainError("likert cut must be in [2, 5], got " + std::to_string(cut));
  }
  std::vector<BinarySchoolMatrix> out;
  out.reserve(dataset.n_schools());
  const int p = dataset.n_items();
  for (int m = 0; m < dataset.n_schools(); ++m) {
    BinarySchoolMatrix bsm;
    bsm.school_id = dataset.school_ids[m];
    bsm.X = BitMatrix(dataset.n_in_school(m), p);
    for (int k = 0; k < dataset.n_in_school(m); ++k) {
      const auto& r = dataset.respondents[dataset.school_offsets[m] + k];
      for (int i = 0; i < p; ++i) {
        const int code = r.codes[i];
        if (mode == CodeMode::Likert) {
          if (code < 1 || code > 5) {
            throw DomainError("respondent '" + r.id + "': code " + std::to_string(code) +
                              " outside Likert range 1..5 for item '" + dataset.item_ids[i] + "'");
          }
          bsm.X(k, i) = code >= cut ? 1 : 0;
        } else {
          if (code != 0 && code != 1) {
            throw DomainError("respondent '" + r.id + "': code " + std::to_string(code) +
                              " is not binary for item '" + dataset.item_ids[i] + "'");
          }
          bsm.X(k, i) = static_cast<std::uint8_t>(code);
        }
      }
    }
    out.push_back(std::move(bsm));
  }
  return out;
}

MultiplexNetworks build_multiplex(const BinarySchoolMatrix& school) {
  const int n = school.X.rows();
  const int p = school.X.cols();
  MultiplexNetworks nets;
  nets.item_layers.assign(p, BitMatrix(n, n));
  nets.person_layers.assign(n, BitMatrix(p, p));
  for (int i = 0; i < p; ++i) {
    auto& Y = nets.item_layers[i];
    for (int k = 1; k < n; ++k) {
      for (int l = 0; l < k; ++l) {
        const std::uint8_t e = school.X(k, i) & school.X(l, i);
        Y(k, l) = e;
        Y(l, k) = e;
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    auto& U = nets.person_layers[k];
    for (int i = 1; i < p; ++i) {
      for (int j = 0; j < i; ++j) {
        const std::uint8_t e = school.X(k, i) & school.X(k, j);
        U(i, j) = e;
        U(j, i) = e;
      }
    }
  }
  return nets;
}

}  // namespace hnirm
