#include "hnirm/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hnirm/version.hpp"

namespace hnirm::io {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : path_(path), tmp_(path + ".tmp") {
    out_.open(tmp_, std::ios::binary);
    if (!out_) throw ParseError(path + ": cannot open for writing");
  }
  ~CsvWriter() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }
  template <typename... Args>
  void row(const Args&... args) {
    bool first = true;
    ((out_ << (first ? "" : ","), first = false, put(args)), ...);
    out_ << '\n';
  }
  void commit() {
    out_.close();
    fs::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  void put(const std::string& s) { out_ << s; }
  void put(const char* s) { out_ << s; }
  void put(double v) { out_ << fmt_double(v); }
  void put(int v) { out_ << v; }
  void put(std::uint64_t v) { out_ << v; }

  std::string path_, tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

json accept_json(const FamilyCounter& c) {
  return json{{"proposals", c.proposals}, {"accepts", c.accepts}, {"rate", c.rate()}};
}

}  // namespace

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open for digest");
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64_hex(ss.str());
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open config file");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << text;
  }
  fs::rename(tmp, path);
}

void write_run(const std::string& dir, const PosteriorSamples& s,
               const std::vector<std::string>& item_ids,
               const std::vector<BinarySchoolMatrix>& schools,
               const std::vector<std::vector<std::string>>& respondent_ids,
               const std::string& input_path, const std::string& input_digest) {
  fs::create_directories(dir);
  const int np = s.npairs();

  {
    CsvWriter w(dir + "/beta.csv");
    w.row("draw", "school", "item", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) {
        for (int i = 0; i < s.p; ++i) {
          w.row(t + 1, s.school_ids[m], i + 1, s.beta[m][static_cast<std::size_t>(t) * s.p + i]);
        }
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/theta.csv");
    w.row("draw", "school", "respondent", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) {
        const int n = s.n_per_school[m];
        for (int k = 0; k < n; ++k) {
          w.row(t + 1, s.school_ids[m], k + 1, s.theta[m][static_cast<std::size_t>(t) * n + k]);
        }
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/gamma.csv");
    w.row("draw", "group", "item", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int g = 0; g < s.n_groups; ++g) {
        for (int i = 0; i < s.p; ++i) {
          w.row(t + 1, s.group_names[g], i + 1, s.gamma[g][static_cast<std::size_t>(t) * s.p + i]);
        }
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/sigma_beta2.csv");
    w.row("draw", "group", "item", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int g = 0; g < s.n_groups; ++g) {
        for (int i = 0; i < s.p; ++i) {
          w.row(t + 1, s.group_names[g], i + 1,
                s.sigma_beta2[g][static_cast<std::size_t>(t) * s.p + i]);
        }
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/mu.csv");
    w.row("draw", "group", "item_i", "item_j", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int g = 0; g < s.n_groups; ++g) {
        for (int i = 0; i < s.p; ++i) {
          for (int j = i + 1; j < s.p; ++j) {
            w.row(t + 1, s.group_names[g], i + 1, j + 1,
                  s.mu[g][static_cast<std::size_t>(t) * np + s.pair_index(i, j)]);
          }
        }
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/sigma_delta2.csv");
    w.row("draw", "group", "item_i", "item_j", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int g = 0; g < s.n_groups; ++g) {
        for (int i = 0; i < s.p; ++i) {
          for (int j = i + 1; j < s.p; ++j) {
            w.row(t + 1, s.group_names[g], i + 1, j + 1,
                  s.sigma_delta2[g][static_cast<std::size_t>(t) * np + s.pair_index(i, j)]);
          }
        }
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/sigma_d2.csv");
    w.row("draw", "school", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) w.row(t + 1, s.school_ids[m], s.sigma_dm2[m][t]);
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/sigma_z2.csv");
    w.row("draw", "school", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) w.row(t + 1, s.school_ids[m], s.sigma_z2[m][t]);
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/delta_mean.csv");
    w.row("school", "item_i", "item_j", "value");
    for (int m = 0; m < s.M; ++m) {
      for (int i = 0; i < s.p; ++i) {
        for (int j = i + 1; j < s.p; ++j) {
          w.row(s.school_ids[m], i + 1, j + 1, s.delta_mean[m](i, j));
        }
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/item_dist_mean.csv");
    w.row("school", "item_i", "item_j", "value");
    for (int m = 0; m < s.M; ++m) {
      for (int i = 0; i < s.p; ++i) {
        for (int j = i + 1; j < s.p; ++j) {
          w.row(s.school_ids[m], i + 1, j + 1, s.item_dist_mean[m](i, j));
        }
      }
    }
    w.commit();
  }
  if (!s.item_dist_draws.empty()) {
    CsvWriter w(dir + "/item_dist.csv");
    w.row("draw", "school", "item_i", "item_j", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) {
        for (int i = 0; i < s.p; ++i) {
          for (int j = i + 1; j < s.p; ++j) {
            w.row(t + 1, s.school_ids[m], i + 1, j + 1,
                  s.item_dist_draws[m][static_cast<std::size_t>(t) * np + s.pair_index(i, j)]);
          }
        }
      }
    }
    w.commit();
  }
  if (!s.delta_draws.empty()) {
    CsvWriter w(dir + "/delta.csv");
    w.row("draw", "school", "item_i", "item_j", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) {
        for (int i = 0; i < s.p; ++i) {
          for (int j = i + 1; j < s.p; ++j) {
            w.row(t + 1, s.school_ids[m], i + 1, j + 1,
                  s.delta_draws[m][static_cast<std::size_t>(t) * np + s.pair_index(i, j)]);
          }
        }
      }
    }
    w.commit();
  }
  if (!s.person_dist_draws.empty()) {
    CsvWriter w(dir + "/person_dist.csv");
    w.row("draw", "school", "resp_k", "resp_l", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) {
        const int n = s.n_per_school[m];
        const int npp = n * (n - 1) / 2;
        int idx = 0;
        for (int k = 0; k < n; ++k) {
          for (int l = k + 1; l < n; ++l, ++idx) {
            w.row(t + 1, s.school_ids[m], k + 1, l + 1,
                  s.person_dist_draws[m][static_cast<std::size_t>(t) * npp + idx]);
          }
        }
      }
    }
    w.commit();
  }
  if (!s.z_draws.empty()) {
    CsvWriter w(dir + "/z.csv");
    w.row("draw", "school", "respondent", "coord", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) {
        const int n = s.n_per_school[m];
        for (int k = 0; k < n; ++k) {
          for (int c = 0; c < s.d; ++c) {
            w.row(t + 1, s.school_ids[m], k + 1, c + 1,
                  s.z_draws[m][(static_cast<std::size_t>(t) * n + k) * s.d + c]);
          }
        }
      }
    }
    w.commit();
    CsvWriter w2(dir + "/w.csv");
    w2.row("draw", "school", "item", "coord", "value");
    for (int t = 0; t < s.n_draws; ++t) {
      for (int m = 0; m < s.M; ++m) {
        for (int i = 0; i < s.p; ++i) {
          for (int c = 0; c < s.d; ++c) {
            w2.row(t + 1, s.school_ids[m], i + 1, c + 1,
                   s.w_draws[m][(static_cast<std::size_t>(t) * s.p + i) * s.d + c]);
          }
        }
      }
    }
    w2.commit();
  }
  {
    CsvWriter w(dir + "/acceptance.csv");
    w.row("family", "school", "proposals", "accepts", "rate");
    auto fam = [&](const char* name, const FamilyCounter& c, const std::string& school) {
      w.row(name, school, c.proposals, c.accepts, c.rate());
    };
    fam("w", s.accept.w, "ALL");
    fam("theta", s.accept.theta, "ALL");
    fam("z", s.accept.z, "ALL");
    fam("beta", s.accept.beta, "ALL");
    for (int m = 0; m < s.M; ++m) {
      fam("w", s.accept_by_school[m].w, s.school_ids[m]);
      fam("theta", s.accept_by_school[m].theta, s.school_ids[m]);
      fam("z", s.accept_by_school[m].z, s.school_ids[m]);
      fam("beta", s.accept_by_school[m].beta, s.school_ids[m]);
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/binary_matrix.csv");
    w.row("school", "respondent", "item", "x");
    for (int m = 0; m < s.M; ++m) {
      const auto& X = schools[m].X;
      for (int k = 0; k < X.rows(); ++k) {
        for (int i = 0; i < X.cols(); ++i) {
          w.row(s.school_ids[m], respondent_ids[m][k], item_ids[i], static_cast<int>(X(k, i)));
        }
      }
    }
    w.commit();
  }

  json manifest;
  manifest["version"] = std::string(kVersion);
  manifest["input"] = {{"path", input_path}, {"digest_fnv1a64", input_digest}};
  manifest["config"] = {
      {"n_iter", s.config.n_iter},
      {"burn_in", s.config.burn_in},
      {"thin", s.config.thin},
      {"d", s.config.d},
      {"jump_w", s.config.jump.w},
      {"jump_theta", s.config.jump.theta},
      {"jump_z", s.config.jump.z},
      {"jump_beta", s.config.jump.beta},
      {"seed", s.config.seed},
      {"group_mode", s.config.group_mode == GroupMode::Single ? "single" : "by_label"},
      {"adapt", s.config.adapt},
      {"threads", s.config.threads},
      {"target_accept_low", s.config.target_accept_low},
      {"target_accept_high", s.config.target_accept_high},
      {"sigma_gamma2", s.config.hyper.sigma_gamma2},
      {"sigma_theta2", s.config.hyper.sigma_theta2},
      {"sigma_mu2", s.config.hyper.sigma_mu2},
      {"a", s.config.hyper.a},
      {"b", s.config.hyper.b},
      {"store_item_distances", s.config.store_item_distances},
      {"store_person_distances", s.config.store_person_distances},
      {"store_delta_draws", s.config.store_delta_draws},
      {"store_positions", s.config.store_positions},
  };
  manifest["dims"] = {
      {"M", s.M},           {"p", s.p},
      {"d", s.d},           {"n_groups", s.n_groups},
      {"n_draws", s.n_draws}, {"n_per_school", s.n_per_school},
  };
  manifest["school_ids"] = s.school_ids;
  manifest["group_names"] = s.group_names;
  manifest["group_of_school"] = s.group_of_school;
  manifest["item_ids"] = item_ids;
  manifest["acceptance"] = {
      {"w", accept_json(s.accept.w)},
      {"theta", accept_json(s.accept.theta)},
      {"z", accept_json(s.accept.z)},
      {"beta", accept_json(s.accept.beta)},
  };
  json scales = json::array();
  for (const auto& sc : s.final_scales) {
    scales.push_back({{"w", sc.w}, {"theta", sc.theta}, {"z", sc.z}, {"beta", sc.beta}});
  }
  manifest["final_jump_scales"] = scales;
  manifest["wall_seconds"] = s.wall_seconds;
  write_file_atomic(dir + "/manifest.json", manifest.dump(2) + "\n");
}

namespace {

struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  CsvFile out;
  std::string line;
  if (std::getline(in, line)) out.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.rows.push_back(split_line(line));
  }
  return out;
}

}  // namespace

RunBundle read_run(const std::string& dir) {
  std::ifstream mf(dir + "/manifest.json");
  if (!mf) throw ParseError(dir + "/manifest.json: cannot open (not a run directory?)");
  json manifest = json::parse(mf);

  RunBundle b;
  auto& s = b.samples;
  s.M = manifest["dims"]["M"];
  s.p = manifest["dims"]["p"];
  s.d = manifest["dims"]["d"];
  s.n_groups = manifest["dims"]["n_groups"];
  s.n_draws = manifest["dims"]["n_draws"];
  s.n_per_school = manifest["dims"]["n_per_school"].get<std::vector<int>>();
  s.school_ids = manifest["school_ids"].get<std::vector<std::string>>();
  s.group_names = manifest["group_names"].get<std::vector<std::string>>();
  s.group_of_school = manifest["group_of_school"].get<std::vector<int>>();
  b.item_ids = manifest["item_ids"].get<std::vector<std::string>>();
  s.config.n_iter = manifest["config"]["n_iter"];
  s.config.burn_in = manifest["config"]["burn_in"];
  s.config.thin = manifest["config"]["thin"];
  s.config.d = manifest["config"]["d"];
  s.config.seed = manifest["config"]["seed"];
  s.accept.w.proposals = manifest["acceptance"]["w"]["proposals"];
  s.accept.w.accepts = manifest["acceptance"]["w"]["accepts"];
  s.accept.theta.proposals = manifest["acceptance"]["theta"]["proposals"];
  s.accept.theta.accepts = manifest["acceptance"]["theta"]["accepts"];
  s.accept.z.proposals = manifest["acceptance"]["z"]["proposals"];
  s.accept.z.accepts = manifest["acceptance"]["z"]["accepts"];
  s.accept.beta.proposals = manifest["acceptance"]["beta"]["proposals"];
  s.accept.beta.accepts = manifest["acceptance"]["beta"]["accepts"];

  std::map<std::string, int> school_index, group_index, item_index;
  for (int m = 0; m < s.M; ++m) school_index[s.school_ids[m]] = m;
  for (int g = 0; g < s.n_groups; ++g) group_index[s.group_names[g]] = g;
  for (std::size_t i = 0; i < b.item_ids.size(); ++i) {
    item_index[b.item_ids[i]] = static_cast<int>(i);
  }
  const int np = s.npairs();

  s.beta.assign(s.M, std::vector<double>(static_cast<std::size_t>(s.n_draws) * s.p, 0.0));
  for (const auto& r : read_csv(dir + "/beta.csv").rows) {
    const int t = std::stoi(r[0]) - 1;
    const int m = school_index.at(r[1]);
    const int i = std::stoi(r[2]) - 1;
    s.beta[m][static_cast<std::size_t>(t) * s.p + i] = std::stod(r[3]);
  }
  s.theta.assign(s.M, {});
  for (int m = 0; m < s.M; ++m) {
    s.theta[m].assign(static_cast<std::size_t>(s.n_draws) * s.n_per_school[m], 0.0);
  }
  for (const auto& r : read_csv(dir + "/theta.csv").rows) {
    const int t = std::stoi(r[0]) - 1;
    const int m = school_index.at(r[1]);
    const int k = std::stoi(r[2]) - 1;
    s.theta[m][static_cast<std::size_t>(t) * s.n_per_school[m] + k] = std::stod(r[3]);
  }
  s.gamma.assign(s.n_groups, std::vector<double>(static_cast<std::size_t>(s.n_draws) * s.p, 0.0));
  for (const auto& r : read_csv(dir + "/gamma.csv").rows) {
    const int t = std::stoi(r[0]) - 1;
    const int g = group_index.at(r[1]);
    const int i = std::stoi(r[2]) - 1;
    s.gamma[g][static_cast<std::size_t>(t) * s.p + i] = std::stod(r[3]);
  }
  s.sigma_beta2.assign(s.n_groups,
                       std::vector<double>(static_cast<std::size_t>(s.n_draws) * s.p, 0.0));
  for (const auto& r : read_csv(dir + "/sigma_beta2.csv").rows) {
    const int t = std::stoi(r[0]) - 1;
    const int g = group_index.at(r[1]);
    const int i = std::stoi(r[2]) - 1;
    s.sigma_beta2[g][static_cast<std::size_t>(t) * s.p + i] = std::stod(r[3]);
  }
  s.mu.assign(s.n_groups, std::vector<double>(static_cast<std::size_t>(s.n_draws) * np, 0.0));
  for (const auto& r : read_csv(dir + "/mu.csv").rows) {
    const int t = std::stoi(r[0]) - 1;
    const int g = group_index.at(r[1]);
    const int idx = s.pair_index(std::stoi(r[2]) - 1, std::stoi(r[3]) - 1);
    s.mu[g][static_cast<std::size_t>(t) * np + idx] = std::stod(r[4]);
  }
  s.sigma_delta2.assign(s.n_groups,
                        std::vector<double>(static_cast<std::size_t>(s.n_draws) * np, 0.0));
  for (const auto& r : read_csv(dir + "/sigma_delta2.csv").rows) {
    const int t = std::stoi(r[0]) - 1;
    const int g = group_index.at(r[1]);
    const int idx = s.pair_index(std::stoi(r[2]) - 1, std::stoi(r[3]) - 1);
    s.sigma_delta2[g][static_cast<std::size_t>(t) * np + idx] = std::stod(r[4]);
  }
  s.sigma_dm2.assign(s.M, {});
  s.sigma_z2.assign(s.M, {});
  for (int m = 0; m < s.M; ++m) {
    s.sigma_dm2[m].assign(s.n_draws, 0.0);
    s.sigma_z2[m].assign(s.n_draws, 0.0);
  }
  for (const auto& r : read_csv(dir + "/sigma_d2.csv").rows) {
    s.sigma_dm2[school_index.at(r[1])][std::stoi(r[0]) - 1] = std::stod(r[2]);
  }
  for (const auto& r : read_csv(dir + "/sigma_z2.csv").rows) {
    s.sigma_z2[school_index.at(r[1])][std::stoi(r[0]) - 1] = std::stod(r[2]);
  }
  s.delta_mean.assign(s.M, Matrix(s.p, s.p));
  for (const auto& r : read_csv(dir + "/delta_mean.csv").rows) {
    const int m = school_index.at(r[0]);
    const int i = std::stoi(r[1]) - 1, j = std::stoi(r[2]) - 1;
    const double v = std::stod(r[3]);
    s.delta_mean[m](i, j) = v;
    s.delta_mean[m](j, i) = v;
  }
  s.item_dist_mean.assign(s.M, Matrix(s.p, s.p));
  for (const auto& r : read_csv(dir + "/item_dist_mean.csv").rows) {
    const int m = school_index.at(r[0]);
    const int i = std::stoi(r[1]) - 1, j = std::stoi(r[2]) - 1;
    const double v = std::stod(r[3]);
    s.item_dist_mean[m](i, j) = v;
    s.item_dist_mean[m](j, i) = v;
  }

  // binarized inputs
  b.schools.resize(s.M);
  b.respondent_ids.assign(s.M, {});
  {
    std::vector<std::map<std::string, int>> resp_index(s.M);
    const auto f = read_csv(dir + "/binary_matrix.csv");
    for (const auto& r : f.rows) {
      const int m = school_index.at(r[0]);
      auto [it, inserted] =
          resp_index[m].emplace(r[1], static_cast<int>(b.respondent_ids[m].size()));
      if (inserted) b.respondent_ids[m].push_back(r[1]);
    }
    for (int m = 0; m < s.M; ++m) {
      b.schools[m].school_id = s.school_ids[m];
      b.schools[m].X = BitMatrix(static_cast<int>(b.respondent_ids[m].size()), s.p);
    }
    for (const auto& r : f.rows) {
      const int m = school_index.at(r[0]);
      const int k = resp_index[m].at(r[1]);
      const int i = item_index.at(r[2]);
      b.schools[m].X(k, i) = static_cast<std::uint8_t>(std::stoi(r[3]));
    }
  }
  return b;
}

void write_dataset_wide(const std::string& path, const ResponseDataset& dataset) {
  const bool has_groups =
      std::any_of(dataset.group_labels.begin(), dataset.group_labels.end(),
                  [](const auto& g) { return g.has_value(); });
  CsvWriter w(path);
  {
    std::vector<std::string> header = {"respondent_id", "school_id"};
    if (has_groups) header.push_back("group_label");
    for (const auto& it : dataset.item_ids) header.push_back(it);
    std::string line;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) line += ",";
      line += header[c];
    }
    w.row(line);
  }
  for (const auto& r : dataset.respondents) {
    std::string line = r.id + "," + dataset.school_ids[r.school];
    if (has_groups) {
      line += ",";
      if (dataset.group_labels[r.school]) line += *dataset.group_labels[r.school];
    }
    for (int code : r.codes) line += "," + std::to_string(code);
    w.row(line);
  }
  w.commit();
}

void write_ground_truth(const std::string& dir, const GroundTruthFiles& t) {
  fs::create_directories(dir);
  {
    CsvWriter w(dir + "/truth_positions.csv");
    w.row("school", "kind", "id", "coord", "value");
    for (std::size_t m = 0; m < t.Z.size(); ++m) {
      for (int k = 0; k < t.Z[m].rows(); ++k) {
        for (int c = 0; c < t.Z[m].cols(); ++c) {
          w.row(t.school_ids[m], "respondent", k + 1, c + 1, t.Z[m](k, c));
        }
      }
      for (int i = 0; i < t.W[m].rows(); ++i) {
        for (int c = 0; c < t.W[m].cols(); ++c) {
          w.row(t.school_ids[m], "item", i + 1, c + 1, t.W[m](i, c));
        }
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/truth_intercepts.csv");
    w.row("school", "kind", "id", "value");
    for (std::size_t m = 0; m < t.beta.size(); ++m) {
      for (std::size_t i = 0; i < t.beta[m].size(); ++i) {
        w.row(t.school_ids[m], "beta", static_cast<int>(i) + 1, t.beta[m][i]);
      }
      for (std::size_t k = 0; k < t.theta[m].size(); ++k) {
        w.row(t.school_ids[m], "theta", static_cast<int>(k) + 1, t.theta[m][k]);
      }
    }
    for (std::size_t i = 0; i < t.gamma.size(); ++i) {
      w.row("ALL", "gamma", static_cast<int>(i) + 1, t.gamma[i]);
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/truth_mu.csv");
    w.row("item_i", "item_j", "value");
    for (int i = 0; i < t.mu.rows(); ++i) {
      for (int j = i + 1; j < t.mu.cols(); ++j) w.row(i + 1, j + 1, t.mu(i, j));
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/truth_clusters.csv");
    w.row("item", "cluster");
    for (std::size_t i = 0; i < t.item_cluster.size(); ++i) {
      w.row(static_cast<int>(i) + 1, t.item_cluster[i]);
    }
    w.commit();
  }
}

void write_summary_csv(const std::string& path, const SummaryTable& table,
                       const std::vector<std::string>& school_ids,
                       const std::vector<std::string>& group_names,
                       const std::vector<std::string>& item_ids) {
  CsvWriter w(path);
  w.row("family", "group", "school", "index_i", "index_j", "mean", "hpd_lo", "hpd_hi",
        "excludes_zero");
  auto label_i = [&](const SummaryTable::Row& r) -> std::string {
    const bool item_indexed = r.family == "beta" || r.family == "gamma" ||
                              r.family == "sigma_beta2" || r.family == "gamma_diff" ||
                              r.family == "mu" || r.family == "sigma_delta2";
    if (r.i < 0) return "";
    if (item_indexed && r.i < static_cast<int>(item_ids.size())) return item_ids[r.i];
    return std::to_string(r.i + 1);
  };
  for (const auto& r : table.rows) {
    w.row(r.family, r.group >= 0 ? group_names[r.group] : "",
          r.school >= 0 ? school_ids[r.school] : "", label_i(r),
          r.j >= 0 ? item_ids[r.j] : "", r.mean, r.hpd_lo, r.hpd_hi,
          static_cast<int>(r.excludes_zero));
  }
  w.commit();
}

void write_embedding_csv(const std::string& path, const Embedding& emb,
                         const std::vector<std::string>& row_ids, const std::string& id_column) {
  CsvWriter w(path);
  {
    std::string header = id_column;
    for (int c = 0; c < emb.positions.cols(); ++c) header += ",axis_" + std::to_string(c + 1);
    header += ",cluster";
    w.row(header);
  }
  for (int r = 0; r < emb.positions.rows(); ++r) {
    std::string line = row_ids[r];
    for (int c = 0; c < emb.positions.cols(); ++c) {
      line += "," + fmt_double(emb.positions(r, c));
    }
    line += ",";
    if (r < static_cast<int>(emb.labels.size())) line += std::to_string(emb.labels[r]);
    w.row(line);
  }
  w.commit();
}

void write_clusters_csv(const std::string& path,
                        const std::vector<std::pair<std::string, std::vector<int>>>& kinds,
                        const std::vector<std::vector<std::string>>& ids) {
  CsvWriter w(path);
  w.row("kind", "id", "cluster");
  for (std::size_t q = 0; q < kinds.size(); ++q) {
    for (std::size_t r = 0; r < kinds[q].second.size(); ++r) {
      w.row(kinds[q].first, ids[q][r], kinds[q].second[r]);
    }
  }
  w.commit();
}

void write_integrated_csv(const std::string& path, const IntegratedSpace& space,
                          const std::vector<std::string>& item_ids,
                          const std::vector<std::string>& school_ids) {
  CsvWriter w(path);
  {
    std::string header = "role,id";
    for (int c = 0; c < space.positions.cols(); ++c) header += ",axis_" + std::to_string(c + 1);
    w.row(header);
  }
  for (int r = 0; r < space.positions.rows(); ++r) {
    const bool is_item = space.role[r] == "item";
    std::string line = space.role[r] + "," +
                       (is_item ? item_ids[space.index[r]] : school_ids[space.index[r]]);
    for (int c = 0; c < space.positions.cols(); ++c) {
      line += "," + fmt_double(space.positions(r, c));
    }
    w.row(line);
  }
  w.commit();
}

void write_diagnostics_csv(const std::string& dir, const DiagnosticsReport& report) {
  fs::create_directories(dir);
  {
    CsvWriter w(dir + "/diagnostics.csv");
    w.row("family", "group", "school", "index_i", "index_j", "mean", "sd", "ess",
          "lag1_autocorr", "degenerate");
    for (const auto& e : report.entries) {
      w.row(e.family, e.group, e.school, e.i, e.j, e.stats.mean, e.stats.sd, e.stats.ess,
            e.stats.autocorr.size() > 1 ? e.stats.autocorr[1] : 0.0,
            static_cast<int>(e.stats.degenerate));
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/autocorr.csv");
    w.row("family", "group", "school", "index_i", "index_j", "lag", "rho");
    for (const auto& e : report.entries) {
      for (std::size_t lag = 0; lag < e.stats.autocorr.size(); ++lag) {
        w.row(e.family, e.group, e.school, e.i, e.j, static_cast<int>(lag),
              e.stats.autocorr[lag]);
      }
    }
    w.commit();
  }
  {
    CsvWriter w(dir + "/acceptance_rates.csv");
    w.row("family", "proposals", "accepts", "rate");
    w.row("w", report.accept.w.proposals, report.accept.w.accepts, report.accept.w.rate());
    w.row("theta", report.accept.theta.proposals, report.accept.theta.accepts,
          report.accept.theta.rate());
    w.row("z", report.accept.z.proposals, report.accept.z.accepts, report.accept.z.rate());
    w.row("beta", report.accept.beta.proposals, report.accept.beta.accepts,
          report.accept.beta.rate());
    w.commit();
  }
}

}  // namespace hnirm::io
