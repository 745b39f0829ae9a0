// fastimpute command-line front end: complete / synth / bench / select-rank.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fastimpute/blocks.hpp"
#include "fastimpute/completion.hpp"
#include "fastimpute/errors.hpp"
#include "fastimpute/io.hpp"
#include "fastimpute/kernels.hpp"
#include "fastimpute/synthetic.hpp"

namespace fi = fastimpute;
using nlohmann::json;

namespace {

struct CommonOpts {
  double gamma = 1e6;
  double theta = std::numbers::pi / 64.0;
  int steps = 50;
  std::int64_t block_size = 1000;
  int patience = 5;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  bool fast = false;
  bool full_gradient = false;
  int transpose_mode = -1;
  std::int64_t max_elements = 50'000'000;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--gamma", o.gamma, "Ridge regularization strength");
  cmd->add_option("--theta", o.theta, "Rotation step angle in radians");
  cmd->add_option("--steps", o.steps, "Gradient descent iteration budget");
  cmd->add_option("--block-size", o.block_size,
                  "Column block width for the no-features path");
  cmd->add_option("--patience", o.patience,
                  "Non-improving steps before the row sample doubles");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--threads", o.threads,
                  "Worker threads (0 = hardware concurrency)");
  cmd->add_flag("--fast{true},--deterministic{false}", o.fast,
                "Allow non-deterministic parallel reduction order");
  cmd->add_flag("--full-gradient", o.full_gradient,
                "Disable row/column subsampling (full gradients)");
  cmd->add_option("--transpose", o.transpose_mode,
                  "No-features path: -1 auto, 0 never, 1 always")
      ->check(CLI::Range(-1, 1));
  cmd->add_option("--max-elements", o.max_elements,
                  "Refuse dense work above this n*m element count");
}

fi::DescentConfig make_config(const CommonOpts& o) {
  fi::DescentConfig cfg;
  cfg.gamma = o.gamma;
  cfg.theta = o.theta;
  cfg.t_max = o.steps;
  cfg.patience = o.patience;
  cfg.threads = o.threads > 0
                    ? o.threads
                    : static_cast<int>(
                          std::max(1u, std::thread::hardware_concurrency()));
  return cfg;
}

json config_json(const CommonOpts& o, const fi::DescentConfig& cfg) {
  return {{"gamma", cfg.gamma},
          {"theta", cfg.theta},
          {"steps", cfg.t_max},
          {"block_size", o.block_size},
          {"patience", cfg.patience},
          {"seed", o.seed},
          {"threads", cfg.threads},
          {"deterministic", !o.fast},
          {"full_gradient", o.full_gradient},
          {"kernel_lane", fi::kernels::lane_name(fi::kernels::active_lane())}};
}

void check_element_cap(std::int64_t n, std::int64_t m, std::int64_t cap) {
  if (n * m > cap)
    throw fi::ParameterError(
        "dense work of " + std::to_string(n * m) +
        " elements exceeds --max-elements (" + std::to_string(cap) + ")");
}

json report_json(const fi::CompletionReport& rep, const CommonOpts& o,
                 const fi::DescentConfig& cfg) {
  json j;
  j["config"] = config_json(o, cfg);
  j["k_used"] = rep.k_used;
  j["block_count"] = rep.block_count;
  j["flags"] = rep.flags;
  j["empty_row_count"] = rep.empty_rows.size();
  if (rep.mape_train) j["mape_train"] = *rep.mape_train;
  if (rep.mape_holdout) j["mape_holdout"] = *rep.mape_holdout;
  j["timing_ms"] = {{"warmstart_descent", rep.ms_warmstart_descent},
                    {"fill", rep.ms_fill},
                    {"total", rep.ms_total}};
  if (!rep.trace.empty()) {
    double best = rep.trace.front().eta;
    for (const auto& r : rep.trace) best = std::min(best, r.eta);
    j["trace_summary"] = {{"steps", rep.trace.size()},
                          {"eta_first", rep.trace.front().eta},
                          {"eta_final", rep.trace.back().eta},
                          {"eta_best", best}};
  }
  return j;
}

struct CompleteOpts {
  std::string matrix_path;
  std::string features_path;
  std::string output_path;
  std::string requests_path;
  std::string predictions_path;
  std::string report_path;
  std::string trace_path;
  std::string output_format = "mtx";
  std::int64_t rank = 0;
};

int run_complete(const CompleteOpts& c, const CommonOpts& o) {
  if (c.rank < 1) throw fi::ParameterError("rank must be >= 1");
  const fi::ObservedMatrix obs = fi::read_matrix_market(c.matrix_path);
  check_element_cap(obs.n_rows(), obs.n_cols(), o.max_elements);

  fi::FeatureMatrix features = fi::FeatureMatrix::identity(obs.n_cols());
  if (!c.features_path.empty()) {
    Eigen::MatrixXd b = fi::read_csv_matrix(c.features_path);
    if (b.cols() != obs.n_cols())
      throw fi::InputError(c.features_path + ": feature matrix has " +
                           std::to_string(b.cols()) + " columns but matrix has " +
                           std::to_string(obs.n_cols()));
    features = fi::FeatureMatrix::dense(std::move(b));
  }

  const fi::DescentConfig cfg = make_config(o);
  fi::PipelineOptions opts;
  opts.block_size = o.block_size;
  opts.transpose_mode = o.transpose_mode;
  opts.subsample = !o.full_gradient;
  opts.materialize = true;

  const fi::CompletionReport rep =
      fi::run_pipeline(obs, features, c.rank, cfg, opts, o.seed);

  if (!c.output_path.empty()) {
    if (c.output_format == "csv")
      fi::write_csv_matrix(c.output_path, rep.filled);
    else
      fi::write_matrix_market_dense(c.output_path, rep.filled);
  }
  if (!c.requests_path.empty()) {
    const auto requests = fi::read_requests_csv(c.requests_path);
    std::vector<double> values;
    values.reserve(requests.size());
    for (const auto& [i, j] : requests) {
      if (i < 0 || i >= rep.filled.rows() || j < 0 || j >= rep.filled.cols())
        throw fi::InputError(c.requests_path + ": request (" +
                             std::to_string(i) + ", " + std::to_string(j) +
                             ") out of bounds");
      values.push_back(rep.filled(i, j));
    }
    const std::string out = c.predictions_path.empty() ? "predictions.csv"
                                                       : c.predictions_path;
    fi::write_predictions_csv(out, requests, values);
  }
  if (!c.trace_path.empty()) fi::write_trace_csv(c.trace_path, rep.trace);
  if (!c.report_path.empty()) {
    std::ofstream out(c.report_path);
    out << report_json(rep, o, cfg).dump(2) << '\n';
  }
  if (rep.mape_train)
    std::cout << "train MAPE " << *rep.mape_train << ", "
              << rep.block_count << " block(s), " << rep.ms_total / 1000.0
              << "s\n";
  return 0;
}

struct SynthOpts {
  std::string out_dir;
  std::int64_t n = 0, m = 0, p = 0, rank = 0;
  double mu = 0.0;
  bool identity = false;
};

int run_synth(const SynthOpts& s, const CommonOpts& o) {
  check_element_cap(s.n, s.m, o.max_elements);
  fi::SyntheticParams params;
  params.n = s.n;
  params.m = s.m;
  params.p = s.identity ? s.m : s.p;
  params.k = s.rank;
  params.mu = s.mu;
  params.seed = o.seed;
  params.identity_features = s.identity;
  const fi::SyntheticInstance inst = fi::generate_synthetic(params);

  namespace fs = std::filesystem;
  fs::create_directories(s.out_dir);
  fi::write_matrix_market_dense((fs::path(s.out_dir) / "truth.mtx").string(),
                                inst.truth);
  fi::write_matrix_market((fs::path(s.out_dir) / "observed.mtx").string(),
                          inst.observed);
  if (!inst.features.is_identity())
    fi::write_csv_matrix((fs::path(s.out_dir) / "features.csv").string(),
                         inst.features.data());
  json meta = {{"n", params.n},       {"m", params.m},
               {"p", params.p},       {"k", params.k},
               {"mu", params.mu},     {"seed", params.seed},
               {"identity", params.identity_features},
               {"omega", inst.observed.omega_size()}};
  std::ofstream((fs::path(s.out_dir) / "meta.json").string()) << meta.dump(2)
                                                              << '\n';
  std::cout << "wrote " << s.out_dir << " (|Omega| = "
            << inst.observed.omega_size() << ")\n";
  return 0;
}

struct SelectRankOpts {
  std::string matrix_path;
  std::string features_path;
  std::string report_path;
  std::vector<std::int64_t> ranks;
};

int run_select_rank(const SelectRankOpts& s, const CommonOpts& o) {
  if (s.ranks.empty()) throw fi::ParameterError("--ranks must be non-empty");
  for (auto k : s.ranks)
    if (k < 1) throw fi::ParameterError("rank must be >= 1");
  const fi::ObservedMatrix obs = fi::read_matrix_market(s.matrix_path);
  check_element_cap(obs.n_rows(), obs.n_cols(), o.max_elements);
  fi::FeatureMatrix features = fi::FeatureMatrix::identity(obs.n_cols());
  if (!s.features_path.empty())
    features = fi::FeatureMatrix::dense(fi::read_csv_matrix(s.features_path));

  const fi::DescentConfig cfg = make_config(o);
  fi::PipelineOptions opts;
  opts.block_size = o.block_size;
  opts.transpose_mode = o.transpose_mode;
  opts.subsample = !o.full_gradient;

  const fi::RankChoice choice =
      fi::select_rank(obs, features, s.ranks, cfg, opts, o.seed);
  std::cout << "k,validation_mape,status\n";
  for (const auto& cand : choice.table) {
    if (cand.failed)
      std::cout << cand.k << ",," << "failed: " << cand.error << '\n';
    else
      std::cout << cand.k << ',' << cand.validation_mape << ",ok\n";
  }
  std::cout << "selected k* = " << choice.k_star << '\n';
  if (!s.report_path.empty()) {
    json j;
    j["config"] = config_json(o, cfg);
    j["k_star"] = choice.k_star;
    j["candidates"] = json::array();
    for (const auto& cand : choice.table)
      j["candidates"].push_back({{"k", cand.k},
                                 {"mape", cand.validation_mape},
                                 {"failed", cand.failed},
                                 {"error", cand.error}});
    std::ofstream(s.report_path) << j.dump(2) << '\n';
  }
  return 0;
}

struct BenchOpts {
  std::string grid_path;
  std::string output_path;
  int reps = 10;
};

int run_bench(const BenchOpts& b, const CommonOpts& o) {
  if (b.reps < 1) throw fi::ParameterError("--reps must be >= 1");
  std::ifstream grid(b.grid_path);
  if (!grid) throw fi::InputError(b.grid_path + ": cannot open for reading");

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!b.output_path.empty()) {
    file.open(b.output_path);
    if (!file) throw fi::InputError(b.output_path + ": cannot open for writing");
    out = &file;
  }
  *out << "n,m,p,k,mu,reps,mean_time_s,mean_mape\n";

  const fi::DescentConfig cfg = make_config(o);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(grid, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("n,", 0) == 0) continue;  // header
    std::int64_t n, m, p, k;
    double mu;
    if (std::sscanf(line.c_str(), "%ld,%ld,%ld,%ld,%lf", &n, &m, &p, &k, &mu) != 5)
      throw fi::InputError(b.grid_path + ":" + std::to_string(line_no) +
                           ": expected 'n,m,p,k,mu'");
    check_element_cap(n, m, o.max_elements);

    double total_s = 0.0, total_mape = 0.0;
    for (int rep = 0; rep < b.reps; ++rep) {
      fi::SyntheticParams params;
      params.n = n;
      params.m = m;
      params.p = p > 0 ? p : m;
      params.k = k;
      params.mu = mu;
      params.identity_features = p <= 0;
      params.seed = fi::splitmix64(o.seed ^ (line_no * 1000 + rep));
      const fi::SyntheticInstance inst = fi::generate_synthetic(params);

      fi::PipelineOptions opts;
      opts.block_size = o.block_size;
      opts.transpose_mode = o.transpose_mode;
      opts.subsample = !o.full_gradient;

      const auto t0 = std::chrono::steady_clock::now();
      const fi::CompletionReport rep_out = fi::run_pipeline(
          inst.observed, inst.features, k, cfg, opts, params.seed);
      total_s += std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
      total_mape += fi::mape(rep_out.filled, inst.truth);
    }
    *out << n << ',' << m << ',' << p << ',' << k << ',' << mu << ','
         << b.reps << ',' << total_s / b.reps << ',' << total_mape / b.reps
         << '\n';
    out->flush();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastimpute: rank-k matrix completion with optional column features"};
  app.require_subcommand(1);

  CommonOpts common;
  CompleteOpts complete_opts;
  SynthOpts synth_opts;
  SelectRankOpts select_opts;
  BenchOpts bench_opts;

  auto* complete = app.add_subcommand(
      "complete", "Fill a partially observed matrix");
  complete->add_option("--matrix", complete_opts.matrix_path,
                       "Observed matrix (MatrixMarket coordinate)")
      ->required();
  complete->add_option("--features", complete_opts.features_path,
                       "Column feature CSV (p rows x m columns); omit for the "
                       "blocked no-features path");
  complete->add_option("--output", complete_opts.output_path,
                       "Filled matrix output path");
  complete->add_option("--output-format", complete_opts.output_format,
                       "mtx (MatrixMarket array) or csv")
      ->check(CLI::IsMember({"mtx", "csv"}));
  complete->add_option("--requests", complete_opts.requests_path,
                       "CSV of row,col positions to predict");
  complete->add_option("--predictions", complete_opts.predictions_path,
                       "Output CSV for --requests predictions");
  complete->add_option("--report", complete_opts.report_path,
                       "JSON run report path");
  complete->add_option("--trace", complete_opts.trace_path,
                       "Per-step descent trace CSV");
  complete->add_option("--rank", complete_opts.rank, "Target rank k")
      ->required();
  add_common(complete, common);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic instance");
  synth->add_option("--out", synth_opts.out_dir, "Output directory")->required();
  synth->add_option("--n", synth_opts.n, "Rows")->required();
  synth->add_option("--m", synth_opts.m, "Columns")->required();
  synth->add_option("--p", synth_opts.p, "Feature count");
  synth->add_option("--rank", synth_opts.rank, "True rank k")->required();
  synth->add_option("--mu", synth_opts.mu, "Missing fraction")->required();
  synth->add_flag("--identity", synth_opts.identity,
                  "No side information (truth = U*S)");
  add_common(synth, common);

  auto* select = app.add_subcommand("select-rank",
                                    "Pick a rank by validation MAPE");
  select->add_option("--matrix", select_opts.matrix_path, "Observed matrix")
      ->required();
  select->add_option("--features", select_opts.features_path, "Feature CSV");
  select->add_option("--ranks", select_opts.ranks,
                     "Candidate ranks (comma separated)")
      ->required()
      ->delimiter(',');
  select->add_option("--report", select_opts.report_path, "JSON report path");
  add_common(select, common);

  auto* bench = app.add_subcommand(
      "bench", "Synthetic benchmark over a grid of (n,m,p,k,mu)");
  bench->add_option("--grid", bench_opts.grid_path,
                    "CSV grid file with rows n,m,p,k,mu (p=0: no features)")
      ->required();
  bench->add_option("--reps", bench_opts.reps, "Repetitions per grid row");
  bench->add_option("--output", bench_opts.output_path,
                    "Results CSV (default: stdout)");
  add_common(bench, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    if (*complete) return run_complete(complete_opts, common);
    if (*synth) return run_synth(synth_opts, common);
    if (*select) return run_select_rank(select_opts, common);
    if (*bench) return run_bench(bench_opts, common);
  } catch (const fi::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const fi::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 3;
  } catch (const fi::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
