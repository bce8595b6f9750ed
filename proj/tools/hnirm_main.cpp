// Command-line front end: fit / simulate / analyze / diagnose.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hnirm/dataset.hpp"
#include "hnirm/diagnostics.hpp"
#include "hnirm/io.hpp"
#include "hnirm/postprocess.hpp"
#include "hnirm/sampler.hpp"
#include "hnirm/svg.hpp"
#include "hnirm/synthgen.hpp"
#include "hnirm/version.hpp"

namespace fs = std::filesystem;
using namespace hnirm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::uint64_t seed_fallback() {
  if (const char* env = std::getenv("HNIRM_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

struct FitArgs {
  std::string data, out, config;
  std::string format = "wide";
  std::string groups = "single";
  int n_iter = 15000, burn_in = 2500, thin = 5, d = 2;
  double jump_w = 0.05, jump_theta = 0.05, jump_z = 0.2, jump_beta = 1.0;
  double sigma_gamma = 10.0, sigma_theta = 10.0, sigma_mu = 10.0;
  double prior_a = 0.01, prior_b = 0.01;
  std::uint64_t seed = 0;
  int parallel = 1;
  int likert_cut = 4;
  bool binary = false;
  bool adapt = false;
  bool store_distances = false;
  bool store_positions = false;
  int progress = 0;
};

// Config file values fill any option the command line left untouched; keys
// mirror the chain-config field names.
void apply_config_file(CLI::App* cmd, FitArgs& a, const std::string& path) {
  auto kv = io::load_config_file(path);
  auto untouched = [&](const char* flag) {
    const auto* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() == 0;
  };
  auto to_bool = [&](const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError(path + ": expected boolean, got '" + v + "'");
  };
  for (auto& [key, value] : kv) {
    if (key == "n_iter" && untouched("--n-iter")) a.n_iter = std::stoi(value);
    else if (key == "burn_in" && untouched("--burn-in")) a.burn_in = std::stoi(value);
    else if (key == "thin" && untouched("--thin")) a.thin = std::stoi(value);
    else if (key == "d" && untouched("--d")) a.d = std::stoi(value);
    else if (key == "jump_w" && untouched("--jump-w")) a.jump_w = std::stod(value);
    else if (key == "jump_theta" && untouched("--jump-theta")) a.jump_theta = std::stod(value);
    else if (key == "jump_z" && untouched("--jump-z")) a.jump_z = std::stod(value);
    else if (key == "jump_beta" && untouched("--jump-beta")) a.jump_beta = std::stod(value);
    else if (key == "seed" && untouched("--seed")) a.seed = std::stoull(value);
    else if (key == "group_mode" && untouched("--groups")) a.groups = value;
    else if (key == "format" && untouched("--format")) a.format = value;
    else if (key == "sigma_gamma" && untouched("--sigma-gamma")) a.sigma_gamma = std::stod(value);
    else if (key == "sigma_theta" && untouched("--sigma-theta")) a.sigma_theta = std::stod(value);
    else if (key == "sigma_mu" && untouched("--sigma-mu")) a.sigma_mu = std::stod(value);
    else if (key == "a" && untouched("--prior-a")) a.prior_a = std::stod(value);
    else if (key == "b" && untouched("--prior-b")) a.prior_b = std::stod(value);
    else if (key == "cut" && untouched("--cut")) a.likert_cut = std::stoi(value);
    else if (key == "binary" && untouched("--binary")) a.binary = to_bool(value);
    else if (key == "adapt" && untouched("--adapt")) a.adapt = to_bool(value);
    else if (key == "parallel" && untouched("--parallel")) a.parallel = std::stoi(value);
    else if (key == "store_distances" && untouched("--store-distances"))
      a.store_distances = to_bool(value);
    else if (key == "store_positions" && untouched("--store-positions"))
      a.store_positions = to_bool(value);
    else {
      const char* known[] = {"n_iter", "burn_in", "thin", "d", "jump_w", "jump_theta",
                             "jump_z", "jump_beta", "seed", "group_mode", "format",
                             "sigma_gamma", "sigma_theta", "sigma_mu", "a", "b", "cut",
                             "binary", "adapt", "parallel", "store_distances",
                             "store_positions"};
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok) throw ValidationError(path + ": unknown config key '" + key + "'");
    }
  }
}

int cmd_fit(const FitArgs& a) {
  const auto format = a.format == "long" ? CsvFormat::Long : CsvFormat::Wide;
  auto dataset = load_responses(a.data, format);
  if (dataset.dropped_count > 0) {
    std::fprintf(stderr, "note: dropped %d respondent(s) with missing items\n",
                 dataset.dropped_count);
  }
  auto matrices = dichotomize(dataset, a.likert_cut,
                              a.binary ? CodeMode::Binary : CodeMode::Likert);
  for (const auto& bsm : matrices) {
    for (int k = 0; k < bsm.X.rows(); ++k) {
      bool any = false;
      for (int i = 0; i < bsm.X.cols(); ++i) any = any || bsm.X(k, i);
      if (!any) {
        std::fprintf(stderr, "warning: school %s respondent row %d is all-negative\n",
                     bsm.school_id.c_str(), k + 1);
      }
    }
  }

  ChainConfig config;
  config.n_iter = a.n_iter;
  config.burn_in = a.burn_in;
  config.thin = a.thin;
  config.d = a.d;
  config.jump = {a.jump_w, a.jump_theta, a.jump_z, a.jump_beta};
  config.hyper.sigma_gamma2 = a.sigma_gamma * a.sigma_gamma;
  config.hyper.sigma_theta2 = a.sigma_theta * a.sigma_theta;
  config.hyper.sigma_mu2 = a.sigma_mu * a.sigma_mu;
  config.hyper.a = a.prior_a;
  config.hyper.b = a.prior_b;
  config.seed = a.seed ? a.seed : seed_fallback();
  config.group_mode = a.groups == "by_label" ? GroupMode::ByLabel : GroupMode::Single;
  config.threads = a.parallel;
  config.adapt = a.adapt;
  config.store_item_distances = a.store_distances;
  config.store_delta_draws = a.store_distances;
  config.store_positions = a.store_positions;
  config.progress_every = a.progress;

  std::vector<SchoolInput> inputs;
  inputs.reserve(matrices.size());
  std::vector<std::vector<std::string>> respondent_ids(matrices.size());
  for (std::size_t m = 0; m < matrices.size(); ++m) {
    SchoolInput in;
    in.nets = build_multiplex(matrices[m]);
    in.group_label = dataset.group_labels[m];
    in.school = matrices[m];
    inputs.push_back(std::move(in));
    for (int k = 0; k < dataset.n_in_school(static_cast<int>(m)); ++k) {
      respondent_ids[m].push_back(
          dataset.respondents[dataset.school_offsets[m] + k].id);
    }
  }

  auto samples = run_chain(std::move(inputs), config);
  io::write_run(a.out, samples, dataset.item_ids, matrices, respondent_ids, a.data,
                io::file_digest(a.data));
  std::printf("fit: %d draws, %zu schools, wall %.1fs -> %s\n", samples.n_draws,
              matrices.size(), samples.wall_seconds, a.out.c_str());
  std::printf("acceptance: w=%.3f theta=%.3f z=%.3f beta=%.3f\n", samples.accept.w.rate(),
              samples.accept.theta.rate(), samples.accept.z.rate(), samples.accept.beta.rate());
  return kExitOk;
}

struct SimArgs {
  std::string out;
  int M = 6, n = 50, p = 20, d = 2;
  int clusters = 3;
  std::string groups = "single";
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimArgs& a) {
  GenConfig cfg;
  cfg.M = a.M;
  cfg.n_per_school = a.n;
  cfg.p = a.p;
  cfg.d = a.d;
  cfg.item_clusters = a.clusters;
  cfg.n_groups = a.groups == "two" ? 2 : 1;
  cfg.seed = a.seed ? a.seed : seed_fallback();
  auto [dataset, truth] = generate(cfg);

  fs::create_directories(a.out);
  io::write_dataset_wide(a.out + "/responses.csv", dataset);
  io::GroundTruthFiles files;
  files.school_ids = dataset.school_ids;
  files.item_ids = dataset.item_ids;
  files.Z = truth.Z;
  files.W = truth.W;
  files.beta = truth.beta;
  files.theta = truth.theta;
  files.gamma = truth.gamma;
  files.mu = truth.mu;
  files.item_cluster = truth.item_cluster;
  io::write_ground_truth(a.out, files);
  std::printf("simulate: M=%d n=%d p=%d -> %s\n", a.M, a.n, a.p, a.out.c_str());
  return kExitOk;
}

struct AnalyzeArgs {
  std::string samples, out;
  int item_clusters = 3;
  int school_clusters = 2;
  std::string school_space = "both";
  std::string agg = "mean";
  std::string link = "respondent";
  int d = 2;
  std::uint64_t seed = 0;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const auto bundle = io::read_run(a.samples);
  const auto& s = bundle.samples;
  const std::string out = a.out.empty() ? a.samples + "/analysis" : a.out;
  fs::create_directories(out);
  Rng rng(a.seed ? a.seed : seed_fallback());

  const auto table = summarize(s);
  io::write_summary_csv(out + "/summary.csv", table, s.school_ids, s.group_names,
                        bundle.item_ids);

  // gamma interval plot (group 0)
  {
    std::vector<svg::Interval> iv;
    for (const auto& row : table.rows) {
      if (row.family == "gamma" && row.group == 0) {
        iv.push_back({bundle.item_ids[row.i], row.mean, row.hpd_lo, row.hpd_hi});
      }
    }
    svg::write_intervals(out + "/gamma_intervals.svg", "pooled item intercepts (95% HPD)", iv);
  }

  // item space from pooled mu (group 0), clustered
  const auto linking =
      a.link == "item" ? LinkingMode::ItemCentered : LinkingMode::RespondentCentered;
  Matrix mu_mean(s.p, s.p);
  {
    const int np = s.npairs();
    for (int i = 0; i < s.p; ++i) {
      for (int j = i + 1; j < s.p; ++j) {
        double acc = 0.0;
        const int idx = s.pair_index(i, j);
        for (int t = 0; t < s.n_draws; ++t) acc += s.mu[0][static_cast<std::size_t>(t) * np + idx];
        mu_mean(i, j) = acc / s.n_draws;
        mu_mean(j, i) = mu_mean(i, j);
      }
    }
  }
  auto mu_space = school_space_from_mu(mu_mean, bundle.schools, a.d, rng,
                                       a.agg == "median" ? SchoolAggregation::Median
                                                         : SchoolAggregation::Mean,
                                       linking);
  {
    Matrix item_diss(s.p, s.p);
    for (int i = 0; i < s.p; ++i) {
      for (int j = 0; j < s.p; ++j) item_diss(i, j) = i == j ? 0.0 : std::exp(mu_mean(i, j));
    }
    const auto clusters = spectral_cluster(item_diss, a.item_clusters, rng);
    mu_space.items.labels = clusters.labels;
  }
  io::write_embedding_csv(out + "/item_space.csv", mu_space.items, bundle.item_ids, "item_id");
  {
    std::vector<svg::Point> pts;
    for (int i = 0; i < s.p; ++i) {
      pts.push_back({mu_space.items.positions(i, 0),
                     s.d > 1 ? mu_space.items.positions(i, 1) : 0.0,
                     mu_space.items.labels.empty() ? 0 : mu_space.items.labels[i],
                     std::to_string(i + 1)});
    }
    svg::write_scatter(out + "/item_space.svg", "item latent space (clusters by color)", pts);
  }

  std::vector<std::pair<std::string, std::vector<int>>> cluster_kinds;
  std::vector<std::vector<std::string>> cluster_ids;
  cluster_kinds.emplace_back("item", mu_space.items.labels);
  cluster_ids.push_back(bundle.item_ids);

  // school spaces
  std::optional<Embedding> school_emb;
  if (a.school_space == "delta" || a.school_space == "both") {
    auto [sdm, emb] = school_space_from_delta(s.delta_mean, a.d, rng);
    io::write_embedding_csv(out + "/school_space_delta.csv", emb, s.school_ids, "school_id");
    std::vector<svg::Point> pts;
    for (int m = 0; m < s.M; ++m) {
      pts.push_back({emb.positions(m, 0), a.d > 1 ? emb.positions(m, 1) : 0.0,
                     s.group_of_school[m], std::to_string(m + 1)});
    }
    svg::write_scatter(out + "/school_space_delta.svg",
                       "school latent space (delta-based, groups by color)", pts,
                       s.group_names);
  }
  if (a.school_space == "mu" || a.school_space == "both") {
    if (linking != LinkingMode::RespondentCentered) {
      throw ValidationError("mu-based school space requires respondent-centered linking");
    }
    io::write_embedding_csv(out + "/school_space_mu.csv", mu_space.schools, s.school_ids,
                            "school_id");
    std::vector<svg::Point> pts;
    for (int m = 0; m < s.M; ++m) {
      pts.push_back({mu_space.schools.positions(m, 0),
                     a.d > 1 ? mu_space.schools.positions(m, 1) : 0.0, s.group_of_school[m],
                     std::to_string(m + 1)});
    }
    svg::write_scatter(out + "/school_space_mu.svg",
                       "school latent space (mu-based, groups by color)", pts, s.group_names);

    if (s.M > a.school_clusters) {
      const auto sch_clusters = spectral_cluster(mu_space.S.S, a.school_clusters, rng);
      cluster_kinds.emplace_back("school", sch_clusters.labels);
      cluster_ids.push_back(s.school_ids);
    }

    const auto integrated = integrate_item_school_space(mu_space.items, mu_space.schools);
    io::write_integrated_csv(out + "/integrated_space.csv", integrated, bundle.item_ids,
                             s.school_ids);
    std::vector<svg::Point> ipts;
    for (int r = 0; r < integrated.positions.rows(); ++r) {
      ipts.push_back({integrated.positions(r, 0),
                      a.d > 1 ? integrated.positions(r, 1) : 0.0,
                      integrated.role[r] == "item" ? 1 : 2,
                      std::to_string(integrated.index[r] + 1)});
    }
    svg::write_scatter(out + "/integrated_space.svg",
                       "items (red) and schools (blue), standardized", ipts);
  }
  io::write_clusters_csv(out + "/clusters.csv", cluster_kinds, cluster_ids);
  std::printf("analyze: wrote %s\n", out.c_str());
  return kExitOk;
}

struct DiagnoseArgs {
  std::string samples, out;
  int max_lag = 50;
};

int cmd_diagnose(const DiagnoseArgs& a) {
  const auto bundle = io::read_run(a.samples);
  const auto report = diagnostics(bundle.samples, a.max_lag);
  const std::string out = a.out.empty() ? a.samples + "/diagnostics" : a.out;
  io::write_diagnostics_csv(out, report);
  std::printf("diagnose: wrote %s\n", out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical network item response model"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  FitArgs fit;
  auto* cfit = app.add_subcommand("fit", "fit the model to response data");
  cfit->add_option("--data", fit.data, "input CSV")->required();
  cfit->add_option("--out", fit.out, "output directory")->required();
  cfit->add_option("--config", fit.config, "key=value config file");
  cfit->add_option("--format", fit.format, "wide|long")
      ->check(CLI::IsMember({"wide", "long"}));
  cfit->add_option("--groups", fit.groups, "single|by_label")
      ->check(CLI::IsMember({"single", "by_label"}));
  cfit->add_option("--n-iter", fit.n_iter, "MCMC iterations");
  cfit->add_option("--burn-in", fit.burn_in, "burn-in iterations");
  cfit->add_option("--thin", fit.thin, "thinning interval");
  cfit->add_option("--d", fit.d, "latent dimension");
  cfit->add_option("--jump-w", fit.jump_w, "item position jump scale");
  cfit->add_option("--jump-theta", fit.jump_theta, "respondent intercept jump scale");
  cfit->add_option("--jump-z", fit.jump_z, "respondent position jump scale");
  cfit->add_option("--jump-beta", fit.jump_beta, "item intercept jump scale");
  cfit->add_option("--sigma-gamma", fit.sigma_gamma, "prior sd of pooled item intercepts");
  cfit->add_option("--sigma-theta", fit.sigma_theta, "prior sd of respondent intercepts");
  cfit->add_option("--sigma-mu", fit.sigma_mu, "prior sd of pooled log-distances");
  cfit->add_option("--prior-a", fit.prior_a, "inverse-gamma shape");
  cfit->add_option("--prior-b", fit.prior_b, "inverse-gamma scale");
  cfit->add_option("--seed", fit.seed, "RNG seed (HNIRM_SEED fallback)");
  cfit->add_option("--parallel", fit.parallel, "school-level worker threads");
  cfit->add_option("--cut", fit.likert_cut, "Likert dichotomization cut (code >= cut -> 1)");
  cfit->add_flag("--binary", fit.binary, "input codes are already 0/1");
  cfit->add_flag("--adapt", fit.adapt, "tune jump scales during burn-in");
  cfit->add_flag("--store-distances", fit.store_distances,
                 "store per-draw distance matrices and delta draws");
  cfit->add_flag("--store-positions", fit.store_positions, "store raw Z/W snapshots");
  cfit->add_option("--progress", fit.progress, "print progress every N iterations");

  SimArgs sim;
  auto* csim = app.add_subcommand("simulate", "generate a synthetic dataset with ground truth");
  csim->add_option("--out", sim.out, "output directory")->required();
  csim->add_option("--M", sim.M, "number of schools");
  csim->add_option("--n", sim.n, "respondents per school");
  csim->add_option("--p", sim.p, "number of items");
  csim->add_option("--d", sim.d, "latent dimension");
  csim->add_option("--clusters", sim.clusters, "planted item clusters");
  csim->add_option("--groups", sim.groups, "single|two")
      ->check(CLI::IsMember({"single", "two"}));
  csim->add_option("--seed", sim.seed, "RNG seed (HNIRM_SEED fallback)");

  AnalyzeArgs ana;
  auto* cana = app.add_subcommand("analyze", "summaries, clustering, embeddings, plots");
  cana->add_option("--samples", ana.samples, "fit output directory")->required();
  cana->add_option("--out", ana.out, "analysis output directory (default: samples/analysis)");
  cana->add_option("--item-clusters", ana.item_clusters, "spectral clusters for items");
  cana->add_option("--school-clusters", ana.school_clusters, "spectral clusters for schools");
  cana->add_option("--school-space", ana.school_space, "delta|mu|both")
      ->check(CLI::IsMember({"delta", "mu", "both"}));
  cana->add_option("--agg", ana.agg, "school aggregation of respondent positions: mean|median")
      ->check(CLI::IsMember({"mean", "median"}));
  cana->add_option("--link", ana.link, "respondent|item linking")
      ->check(CLI::IsMember({"respondent", "item"}));
  cana->add_option("--d", ana.d, "embedding dimension");
  cana->add_option("--seed", ana.seed, "RNG seed for clustering/MDS restarts");

  DiagnoseArgs diag;
  auto* cdia = app.add_subcommand("diagnose", "trace/autocorrelation/ESS tables");
  cdia->add_option("--samples", diag.samples, "fit output directory")->required();
  cdia->add_option("--out", diag.out, "output directory (default: samples/diagnostics)");
  cdia->add_option("--max-lag", diag.max_lag, "autocorrelation lags");

  try {
    app.parse(argc, argv);
    if (cfit->parsed() && !fit.config.empty()) apply_config_file(cfit, fit, fit.config);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }

  try {
    if (cfit->parsed()) return cmd_fit(fit);
    if (csim->parsed()) return cmd_simulate(sim);
    if (cana->parsed()) return cmd_analyze(ana);
    if (cdia->parsed()) return cmd_diagnose(diag);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const ChainError& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitValidation;
}
