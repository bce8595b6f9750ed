#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hnirm/io.hpp"
#include "hnirm/postprocess.hpp"
#include "hnirm/sampler.hpp"
#include "hnirm/synthgen.hpp"

using namespace hnirm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hnirm_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("fnv digest is stable") {
  CHECK(io::fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(io::fnv1a64_hex("hello") != io::fnv1a64_hex("hellp"));
}

TEST_CASE("config file parsing") {
  TempDir tmp;
  const auto path = (tmp.path / "run.cfg").string();
  {
    std::ofstream out(path);
    out << "# comment\n"
        << "n_iter = 500\n"
        << "jump_w=0.1\n"
        << "\n"
        << "group_mode = by_label  # trailing comment\n";
  }
  const auto kv = io::load_config_file(path);
  CHECK(kv.at("n_iter") == "500");
  CHECK(kv.at("jump_w") == "0.1");
  CHECK(kv.at("group_mode") == "by_label");

  {
    std::ofstream out(path);
    out << "no equals sign here\n";
  }
  CHECK_THROWS_AS(io::load_config_file(path), ParseError);
}

TEST_CASE("write_run and read_run round trip") {
  GenConfig gcfg;
  gcfg.M = 3;
  gcfg.n_per_school = 6;
  gcfg.p = 4;
  gcfg.n_groups = 2;
  gcfg.seed = 11;
  auto [ds, truth] = generate(gcfg);
  auto matrices = dichotomize(ds, 4, CodeMode::Binary);

  ChainConfig cfg;
  cfg.n_iter = 60;
  cfg.burn_in = 20;
  cfg.thin = 2;
  cfg.seed = 7;
  cfg.group_mode = GroupMode::ByLabel;
  auto samples = run_chain(make_inputs(ds), cfg);

  std::vector<std::vector<std::string>> rids(3);
  for (int m = 0; m < 3; ++m) {
    for (int k = 0; k < ds.n_in_school(m); ++k) {
      rids[m].push_back(ds.respondents[ds.school_offsets[m] + k].id);
    }
  }

  TempDir tmp;
  const auto dir = (tmp.path / "run").string();
  io::write_run(dir, samples, ds.item_ids, matrices, rids, "input.csv", "deadbeef");
  CHECK(fs::exists(dir + "/manifest.json"));
  CHECK(fs::exists(dir + "/beta.csv"));

  const auto bundle = io::read_run(dir);
  CHECK(bundle.samples.M == samples.M);
  CHECK(bundle.samples.n_draws == samples.n_draws);
  CHECK(bundle.samples.n_groups == 2);
  CHECK(bundle.item_ids == ds.item_ids);
  CHECK(bundle.samples.school_ids == samples.school_ids);
  CHECK(bundle.samples.group_of_school == samples.group_of_school);

  // numeric round trip is exact (%.17g)
  CHECK(bundle.samples.beta == samples.beta);
  CHECK(bundle.samples.theta == samples.theta);
  CHECK(bundle.samples.gamma == samples.gamma);
  CHECK(bundle.samples.mu == samples.mu);
  CHECK(bundle.samples.sigma_delta2 == samples.sigma_delta2);
  CHECK(bundle.samples.sigma_dm2 == samples.sigma_dm2);
  for (int m = 0; m < samples.M; ++m) {
    CHECK(bundle.samples.delta_mean[m] == samples.delta_mean[m]);
    CHECK(bundle.samples.item_dist_mean[m] == samples.item_dist_mean[m]);
    CHECK(bundle.schools[m].X == matrices[m].X);
    CHECK(bundle.respondent_ids[m] == rids[m]);
  }
  CHECK(bundle.samples.accept.w.proposals == samples.accept.w.proposals);
}

TEST_CASE("dataset wide writer round trips through the loader") {
  GenConfig gcfg;
  gcfg.M = 2;
  gcfg.n_per_school = 5;
  gcfg.p = 3;
  gcfg.n_groups = 2;
  gcfg.seed = 3;
  auto [ds, truth] = generate(gcfg);
  TempDir tmp;
  const auto path = (tmp.path / "resp.csv").string();
  io::write_dataset_wide(path, ds);
  const auto back = load_responses(path, CsvFormat::Wide);
  CHECK(back.n_schools() == ds.n_schools());
  CHECK(back.item_ids == ds.item_ids);
  CHECK(back.group_labels == ds.group_labels);
  for (int q = 0; q < ds.n_respondents(); ++q) {
    CHECK(back.respondents[q].id == ds.respondents[q].id);
    CHECK(back.respondents[q].codes == ds.respondents[q].codes);
  }
}

TEST_CASE("summary and diagnostics writers produce parseable files") {
  GenConfig gcfg;
  gcfg.M = 2;
  gcfg.n_per_school = 5;
  gcfg.p = 3;
  gcfg.seed = 13;
  auto [ds, truth] = generate(gcfg);
  ChainConfig cfg;
  cfg.n_iter = 40;
  cfg.burn_in = 10;
  cfg.thin = 1;
  cfg.seed = 5;
  auto samples = run_chain(make_inputs(ds), cfg);

  TempDir tmp;
  const auto table = summarize(samples);
  io::write_summary_csv((tmp.path / "summary.csv").string(), table, samples.school_ids,
                        samples.group_names, ds.item_ids);
  const auto report = diagnostics(samples);
  io::write_diagnostics_csv(tmp.path.string(), report);
  CHECK(fs::exists(tmp.path / "summary.csv"));
  CHECK(fs::exists(tmp.path / "diagnostics.csv"));
  CHECK(fs::exists(tmp.path / "autocorr.csv"));

  std::ifstream in(tmp.path / "summary.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "family,group,school,index_i,index_j,mean,hpd_lo,hpd_hi,excludes_zero");
  int lines = 0;
  std::string l;
  while (std::getline(in, l)) ++lines;
  CHECK(lines == static_cast<int>(table.rows.size()));
}

}  // TEST_SUITE
