// gpmm command-line tool: training, monitoring, diagnosis, data simulation,
// Monte-Carlo false-alarm studies, and the classical-equivalence check.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure,
// 4 training finished without converging (model still written).
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpmm/baselines.hpp"
#include "gpmm/contribution.hpp"
#include "gpmm/datagen.hpp"
#include "gpmm/em_random.hpp"
#include "gpmm/em_sequential.hpp"
#include "gpmm/io.hpp"
#include "gpmm/monitoring.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNotConverged = 4;

using gpmm::Matrix;
using gpmm::Vector;

// File and format problems get a dedicated type so main() can map them to
// the data-error exit code; everything else numerical stays a runtime_error.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

gpmm::CsvTable load_table(const std::string& path) {
  try {
    return gpmm::read_csv(path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

gpmm::StoredModel load_model_checked(const std::string& path) {
  try {
    return gpmm::load_model(path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  out << text;
}

gpmm::StatisticKind statistic_kind_from_string(const std::string& name) {
  for (auto kind : {gpmm::StatisticKind::TS_RAN, gpmm::StatisticKind::TZ_RAN,
                    gpmm::StatisticKind::Q_RAN, gpmm::StatisticKind::TS_P,
                    gpmm::StatisticKind::TZ_P, gpmm::StatisticKind::T_SEQ,
                    gpmm::StatisticKind::Q_SEQ, gpmm::StatisticKind::SF_RAN,
                    gpmm::StatisticKind::SS_RAN}) {
    if (gpmm::to_string(kind) == name) return kind;
  }
  throw CLI::ValidationError("--statistic", "unknown statistic: " + name);
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string mode = "random";
  std::string x_path, y_path, out_path = "model.gpmm";
  int r = 2;
  int tau = 1;
  gpmm::EmConfig em;
};

int cmd_train(const TrainOptions& opt) {
  gpmm::StoredModel stored;
  gpmm::FitDiagnostics diag;
  if (opt.mode == "random") {
    if (opt.y_path.empty())
      throw CLI::ValidationError("--y", "random mode needs an output-variable file");
    const auto x_table = load_table(opt.x_path);
    const auto y_table = load_table(opt.y_path);
    const auto norm_x = gpmm::Normalization::fit(x_table.data);
    const auto norm_y = gpmm::Normalization::fit(y_table.data);
    auto [params, d] =
        gpmm::fit_random(norm_x.apply(x_table.data), norm_y.apply(y_table.data), opt.r, opt.em);
    stored.kind = "random";
    stored.params = std::move(params);
    stored.norm_x = norm_x;
    stored.norm_y = norm_y;
    diag = std::move(d);
  } else {
    const auto x_table = load_table(opt.x_path);
    const auto norm_x = gpmm::Normalization::fit(x_table.data);
    auto [params, d] =
        gpmm::fit_sequential(norm_x.apply(x_table.data), opt.tau, opt.r, opt.em);
    stored.kind = "sequential";
    stored.params = std::move(params);
    stored.tau = opt.tau;
    stored.norm_x = norm_x;
    diag = std::move(d);
  }
  stored.converged = diag.converged;
  gpmm::save_model(opt.out_path, stored);
  std::cout << diag.to_table();
  std::cout << "model written to " << opt.out_path << " (converged: "
            << (diag.converged ? "yes" : "no") << ", iterations: " << diag.iterations
            << ")\n";
  if (!diag.converged) {
    std::cerr << "warning: iteration limit reached before convergence\n";
    return kExitNotConverged;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// monitor

struct MonitorOptions {
  std::string model_path, x_path, y_path, out_path = "monitor.csv";
  double alpha = 0.05;
};

int cmd_monitor(const MonitorOptions& opt) {
  const auto stored = load_model_checked(opt.model_path);
  const auto x_table = load_table(opt.x_path);
  if (x_table.data.cols() == 0) {
    std::cerr << "warning: input file has no samples; writing empty results\n";
    write_text(opt.out_path, "sample_index\n");
    return 0;
  }
  const Matrix xn = stored.norm_x ? stored.norm_x->apply(x_table.data) : x_table.data;

  gpmm::MonitoringResult result;
  if (stored.kind == "random") {
    if (opt.y_path.empty())
      throw CLI::ValidationError("--y", "a random-data model needs an output-variable file");
    const auto y_table = load_table(opt.y_path);
    const Matrix yn = stored.norm_y ? stored.norm_y->apply(y_table.data) : y_table.data;
    const auto specs = gpmm::build_specs_random(stored.params, opt.alpha);
    result = gpmm::monitor(stored.params, specs, xn, yn);
  } else {
    const auto spec = gpmm::build_spec_qseq(stored.params, opt.alpha);
    result = gpmm::monitor_sequential(stored.params, spec, xn, stored.tau);
  }
  write_text(opt.out_path, result.to_csv());
  write_text(opt.out_path + ".meta.json", result.metadata_json());
  std::cout << "alarm rates:";
  for (const auto& [name, rate] : result.alarm_rates()) {
    std::printf(" %s=%.4f", name.c_str(), rate);
  }
  std::printf("\n");
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseOptions {
  std::string model_path, x_path, y_path, out_path = "contributions.csv";
  std::string statistic = "TS_RAN";
  std::string method = "gdc";
  double theta = 0.5;
  double alpha = 0.05;
};

int cmd_diagnose(const DiagnoseOptions& opt) {
  const auto stored = load_model_checked(opt.model_path);
  if (stored.kind != "random")
    throw CLI::ValidationError("--model", "diagnosis supports random-data models");
  const auto kind = statistic_kind_from_string(opt.statistic);
  const auto method = gpmm::contribution_method_from_string(opt.method);
  if (opt.theta < 0.0 || opt.theta > 1.0)
    throw CLI::ValidationError("--theta", "theta must lie in [0, 1]");

  const auto x_table = load_table(opt.x_path);
  if (opt.y_path.empty())
    throw CLI::ValidationError("--y", "diagnosis needs the output-variable file");
  const auto y_table = load_table(opt.y_path);
  const Matrix xn = stored.norm_x ? stored.norm_x->apply(x_table.data) : x_table.data;
  const Matrix yn = stored.norm_y ? stored.norm_y->apply(y_table.data) : y_table.data;
  if (xn.cols() != yn.cols()) throw DataError("input/output sample counts differ");

  const auto spec = gpmm::build_spec_random(stored.params, kind, opt.alpha);
  Matrix h(stored.params.p() + stored.params.q(), xn.cols());
  h.topRows(stored.params.p()) = yn.colwise() - stored.params.c_y;
  h.bottomRows(stored.params.q()) = xn.colwise() - stored.params.c_x;

  const auto report = gpmm::diagnose(spec, h, method, opt.theta);
  write_text(opt.out_path, report.to_long_csv());
  write_text(opt.out_path + ".meta.json", report.metadata_json());
  std::cout << "contributions written to " << opt.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string kind = "random";
  std::string out_dir = ".";
  int samples = 100000;
  int sequences = 100;
  int sequence_length = 500;
  std::uint64_t seed = 0;
  // Fault injection on the input block; magnitude 0 disables it.
  int fault_variable = 0;
  int fault_onset = 0;
  double fault_magnitude = 0.0;
  std::string fault_type = "step";
  int fault_span = 0;
};

int cmd_simulate(const SimulateOptions& opt) {
  gpmm::Scenario sc;
  sc.kind = gpmm::scenario_kind_from_string(opt.kind);
  sc.samples = opt.samples;
  sc.sequences = opt.sequences;
  sc.sequence_length = opt.sequence_length;
  sc.seed = opt.seed;
  gpmm::FaultSpec fault;
  if (opt.fault_magnitude != 0.0) {
    fault.variable = opt.fault_variable;
    fault.onset = opt.fault_onset;
    fault.magnitude = opt.fault_magnitude;
    fault.type = opt.fault_type == "drift" ? gpmm::FaultType::DRIFT : gpmm::FaultType::STEP;
    fault.span = opt.fault_span;
    sc.fault = fault;
  }
  sc.validate();

  std::filesystem::create_directories(opt.out_dir);
  const auto path = [&](const std::string& name) {
    return (std::filesystem::path(opt.out_dir) / name).string();
  };
  nlohmann::json manifest;
  manifest["kind"] = opt.kind;
  manifest["seed"] = opt.seed;
  std::vector<std::string> files;

  const auto maybe_fault = [&](const Matrix& data) {
    return sc.fault ? gpmm::inject_fault(data, *sc.fault) : data;
  };
  if (sc.kind == gpmm::ScenarioKind::RANDOM) {
    const auto data = gpmm::gen_random(sc);
    gpmm::write_csv(path("x.csv"), maybe_fault(data.x),
                    gpmm::default_headers("x", int(data.x.rows())));
    gpmm::write_csv(path("y.csv"), data.y, gpmm::default_headers("y", int(data.y.rows())));
    files = {"x.csv", "y.csv"};
    manifest["samples"] = opt.samples;
  } else if (sc.kind == gpmm::ScenarioKind::SEQ_STATIONARY) {
    const auto sequences = gpmm::gen_seq_stationary(sc);
    for (std::size_t i = 0; i < sequences.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "seq_%03zu.csv", i);
      gpmm::write_csv(path(name), maybe_fault(sequences[i]),
                      gpmm::default_headers("x", int(sequences[i].rows())));
      files.push_back(name);
    }
    manifest["sequences"] = opt.sequences;
    manifest["sequence_length"] = opt.sequence_length;
  } else {
    const Matrix x = gpmm::gen_seq_random_walk(sc);
    gpmm::write_csv(path("x.csv"), maybe_fault(x),
                    gpmm::default_headers("x", int(x.rows())));
    files = {"x.csv"};
    manifest["samples"] = opt.samples;
  }
  if (sc.fault) {
    manifest["fault"] = {{"variable", fault.variable},
                         {"onset", fault.onset},
                         {"magnitude", fault.magnitude},
                         {"type", opt.fault_type},
                         {"span", fault.span}};
  }
  manifest["files"] = files;
  write_text(path("manifest.json"), manifest.dump(2) + "\n");
  std::cout << files.size() << " data file(s) written to " << opt.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// mc-far

struct McFarOptions {
  int reps = 10;
  int samples = 10000;
  int sequences = 20;
  int sequence_length = 500;
  std::uint64_t seed = 0;
  std::string out_path;  // empty: stdout
};

constexpr int kFarStatistics = 8;
const char* kFarNames[kFarStatistics] = {"TS_RAN", "TZ_RAN", "Q_RAN", "TS_P",
                                         "TZ_P",   "Q_SEQ",  "SF_RAN", "SS_RAN"};

// False-alarm rates of the eight statistics for one repetition, both alphas.
std::array<std::array<double, 2>, kFarStatistics> far_one_rep(const McFarOptions& opt,
                                                              std::uint64_t rep_seed) {
  const auto mp = gpmm::Scenario::default_params();
  const double alphas[2] = {0.05, 0.01};
  std::array<std::array<double, 2>, kFarStatistics> rates{};

  gpmm::SfaRandomModel diff_model;
  diff_model.v_mat = mp.v_mat;
  diff_model.lambda_z = 2.0 * mp.lambda_x;

  for (int a = 0; a < 2; ++a) {
    const auto ran_specs = gpmm::build_specs_random(mp, alphas[a]);
    const auto qseq_spec = gpmm::build_spec_qseq(mp, alphas[a]);
    const auto sfa_specs = gpmm::build_specs_sfa(diff_model, alphas[a]);

    gpmm::Scenario random_sc;
    random_sc.samples = opt.samples;
    random_sc.seed = rep_seed;
    const auto data = gpmm::gen_random(random_sc);
    const auto named = gpmm::monitor(mp, ran_specs, data.x, data.y).alarm_rates();
    for (int k = 0; k < 5; ++k) rates[k][a] = named.at(kFarNames[k]);

    gpmm::Scenario seq_sc;
    seq_sc.kind = gpmm::ScenarioKind::SEQ_STATIONARY;
    seq_sc.sequences = opt.sequences;
    seq_sc.sequence_length = opt.sequence_length;
    seq_sc.seed = rep_seed + 1000003;
    long alarms = 0, total = 0;
    for (const Matrix& seq : gpmm::gen_seq_stationary(seq_sc)) {
      const auto res = gpmm::monitor_sequential(mp, qseq_spec, seq, 1);
      for (bool alarm : res.alarms[0]) {
        alarms += alarm ? 1 : 0;
        ++total;
      }
    }
    rates[5][a] = double(alarms) / double(total);

    gpmm::Scenario walk_sc;
    walk_sc.kind = gpmm::ScenarioKind::SEQ_RANDOM_WALK;
    walk_sc.samples = opt.samples;
    walk_sc.seed = rep_seed + 2000003;
    const Matrix walk = gpmm::gen_seq_random_walk(walk_sc);
    long sf_alarms = 0, ss_alarms = 0;
    const long diffs = walk.cols() - 1;
    for (long t = 0; t < diffs; ++t) {
      const Vector z_dot = walk.col(t + 1) - walk.col(t);
      if (gpmm::stat_sf_ran(sfa_specs[0], diff_model, z_dot) > sfa_specs[0].control_limit)
        ++sf_alarms;
      if (gpmm::stat_ss_ran(sfa_specs[1], diff_model, z_dot) > sfa_specs[1].control_limit)
        ++ss_alarms;
    }
    rates[6][a] = double(sf_alarms) / double(diffs);
    rates[7][a] = double(ss_alarms) / double(diffs);
  }
  return rates;
}

int cmd_mc_far(const McFarOptions& opt) {
  if (opt.reps < 1) throw CLI::ValidationError("--reps", "repetition count must be >= 1");
  std::vector<std::future<std::array<std::array<double, 2>, kFarStatistics>>> jobs;
  jobs.reserve(opt.reps);
  for (int rep = 0; rep < opt.reps; ++rep) {
    const std::uint64_t rep_seed = opt.seed * 1000000007ULL + std::uint64_t(rep) + 1;
    jobs.push_back(std::async(std::launch::async, far_one_rep, opt, rep_seed));
  }
  std::vector<std::array<std::array<double, 2>, kFarStatistics>> all;
  all.reserve(opt.reps);
  for (auto& job : jobs) all.push_back(job.get());

  std::ostringstream report;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %12s %12s %12s %12s\n", "stat",
                "mean@0.05", "std@0.05", "mean@0.01", "std@0.01");
  report << line;
  for (int k = 0; k < kFarStatistics; ++k) {
    double mean[2] = {0.0, 0.0}, stdev[2] = {0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
      for (const auto& rep : all) mean[a] += rep[k][a];
      mean[a] /= opt.reps;
      if (opt.reps > 1) {
        double ss = 0.0;
        for (const auto& rep : all) ss += (rep[k][a] - mean[a]) * (rep[k][a] - mean[a]);
        stdev[a] = std::sqrt(ss / (opt.reps - 1));
      }
    }
    if (opt.reps > 1) {
      std::snprintf(line, sizeof(line), "%-8s %12.4f %12.4f %12.4f %12.4f\n", kFarNames[k],
                    mean[0], stdev[0], mean[1], stdev[1]);
    } else {
      std::snprintf(line, sizeof(line), "%-8s %12.4f %12s %12.4f %12s\n", kFarNames[k],
                    mean[0], "", mean[1], "");
    }
    report << line;
  }
  if (opt.out_path.empty())
    std::cout << report.str();
  else
    write_text(opt.out_path, report.str());
  return 0;
}

// ---------------------------------------------------------------------------
// verify-equivalence

struct VerifyOptions {
  int samples = 10000;
  std::uint64_t seed = 0;
  bool break_restriction = false;  // negative control: perturb the couplings
};

double rel_dev(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

int cmd_verify_equivalence(const VerifyOptions& opt) {
  double dev_pca = 0.0, dev_cca = 0.0, dev_sfa = 0.0;

  {  // PCA T^2 / SPE against the isotropic input-only model.
    gpmm::Scenario sc;
    sc.samples = opt.samples;
    sc.seed = opt.seed + 11;
    const auto data = gpmm::gen_random(sc);
    const auto pca = gpmm::pca_fit(data.x, 2);
    const Matrix xn = pca.norm.apply(data.x);
    const Matrix cov = xn * xn.transpose() / double(xn.cols());
    const auto ppca = gpmm::ppca_from_covariance(cov, 2);
    auto restricted = gpmm::ppca_restricted(ppca, Vector::Zero(xn.rows()));
    if (opt.break_restriction) {
      // Negative control. Single-block statistics are invariant to the
      // coupling itself (given the coupling constraint it never enters their
      // quadratic forms), so the broken unit-coupling assumption is applied
      // where it materially lands: the effective loading picks up the
      // non-unit coupling factor.
      restricted.w_diag.setConstant(0.8);
      restricted.lambda_eps_diag =
          Vector::Ones(restricted.r()) - restricted.w_diag.cwiseAbs2();
      restricted.v_mat = restricted.v_mat * restricted.w_diag.asDiagonal();
    }
    const auto ts_spec = gpmm::build_spec_random(restricted, gpmm::StatisticKind::TS_P, 0.05);
    const auto q_spec = gpmm::build_spec_random(restricted, gpmm::StatisticKind::Q_RAN, 0.05);
    const Vector zero_y = Vector::Zero(restricted.p());
    for (int t = 0; t < opt.samples; ++t) {
      const auto [t2, spe] = gpmm::pca_stats(pca, data.x.col(t));
      dev_pca = std::max(dev_pca,
                         rel_dev(gpmm::stat_ts_p(ts_spec, restricted, xn.col(t)), t2));
      dev_pca = std::max(
          dev_pca, rel_dev(gpmm::stat_q_ran(q_spec, restricted, xn.col(t), zero_y),
                           spe / ppca.noise_var));
    }
  }

  {  // CCA T_x^2 / T_y^2 against the full-coupling restriction.
    gpmm::Scenario sc;
    sc.samples = opt.samples;
    sc.seed = opt.seed + 12;
    const auto data = gpmm::gen_random(sc);
    const auto cca = gpmm::cca_fit(data.x, data.y, 2);
    const auto restricted = gpmm::pcca_restricted(cca);
    const auto ts_spec = gpmm::build_spec_random(restricted, gpmm::StatisticKind::TS_P, 0.05);
    const auto tz_spec = gpmm::build_spec_random(restricted, gpmm::StatisticKind::TZ_P, 0.05);
    const Matrix xn = cca.norm_x.apply(data.x);
    const Matrix yn = cca.norm_y.apply(data.y);
    for (int t = 0; t < opt.samples; ++t) {
      const auto [tx2, ty2] = gpmm::cca_stats(cca, data.x.col(t), data.y.col(t));
      dev_cca = std::max(dev_cca,
                         rel_dev(gpmm::stat_ts_p(ts_spec, restricted, xn.col(t)), tx2));
      dev_cca = std::max(dev_cca,
                         rel_dev(gpmm::stat_tz_p(tz_spec, restricted, yn.col(t)), ty2));
    }
  }

  {  // SFA temporal indices against the differenced isotropic model.
    gpmm::Scenario sc;
    sc.kind = gpmm::ScenarioKind::SEQ_RANDOM_WALK;
    sc.samples = opt.samples + 1;
    sc.seed = opt.seed + 13;
    const Matrix x = gpmm::gen_seq_random_walk(sc);
    const int r_slow = 1;
    const int q = int(x.rows());
    const auto sfa = gpmm::sfa_fit(x, r_slow);
    const Matrix whitened = sfa.whitening * sfa.norm.apply(x);
    const Matrix diffs =
        whitened.rightCols(whitened.cols() - 1) - whitened.leftCols(whitened.cols() - 1);
    const Matrix diff_cov = diffs * diffs.transpose() / double(diffs.cols());
    const auto ppca = gpmm::ppca_from_covariance(diff_cov, q - r_slow);
    const auto diff_model = gpmm::sfa_diff_model(ppca);
    const auto specs = gpmm::build_specs_sfa(diff_model, 0.05);
    for (int t = 0; t < diffs.cols(); ++t) {
      const auto [ss2, sf2] = gpmm::sfa_temporal(sfa, x.col(t + 1) - x.col(t));
      dev_sfa = std::max(
          dev_sfa, rel_dev(gpmm::stat_sf_ran(specs[0], diff_model, diffs.col(t)), sf2));
      dev_sfa = std::max(dev_sfa,
                         rel_dev(gpmm::stat_ss_ran(specs[1], diff_model, diffs.col(t)),
                                 ss2 / ppca.noise_var));
    }
  }

  const double threshold = 1e-6;
  const bool pass = dev_pca < threshold && dev_cca < threshold && dev_sfa < threshold;
  std::printf("PCA comparison  max relative deviation %.3e  %s\n", dev_pca,
              dev_pca < threshold ? "pass" : "FAIL");
  std::printf("CCA comparison  max relative deviation %.3e  %s\n", dev_cca,
              dev_cca < threshold ? "pass" : "FAIL");
  std::printf("SFA comparison  max relative deviation %.3e  %s\n", dev_sfa,
              dev_sfa < threshold ? "pass" : "FAIL");
  std::printf("%s\n", pass ? "equivalence verified" : "equivalence check failed");
  return pass ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic monitoring models: train, monitor, diagnose, simulate"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Fit a model to training CSVs");
  train_cmd->set_config("--config");
  train_cmd->add_option("--mode", train.mode, "random | sequential")
      ->check(CLI::IsMember({"random", "sequential"}));
  train_cmd->add_option("--x", train.x_path, "input-variable CSV")->required();
  train_cmd->add_option("--y", train.y_path, "output-variable CSV (random mode)");
  train_cmd->add_option("--out", train.out_path, "model output path");
  train_cmd->add_option("--r", train.r, "latent dimension");
  train_cmd->add_option("--tau", train.tau, "sampling stride (sequential mode)");
  train_cmd->add_option("--max-iters", train.em.max_iters, "iteration cap");
  train_cmd->add_option("--tol", train.em.rel_tol, "relative log-likelihood tolerance");
  train_cmd->add_option("--seed", train.em.seed, "reproducibility seed");

  MonitorOptions monitor;
  auto* monitor_cmd = app.add_subcommand("monitor", "Score data against a fitted model");
  monitor_cmd->set_config("--config");
  monitor_cmd->add_option("--model", monitor.model_path, "fitted model file")->required();
  monitor_cmd->add_option("--x", monitor.x_path, "input-variable CSV")->required();
  monitor_cmd->add_option("--y", monitor.y_path, "output-variable CSV (random models)");
  monitor_cmd->add_option("--out", monitor.out_path, "results CSV path");
  monitor_cmd->add_option("--alpha", monitor.alpha, "false-alarm level")
      ->check(CLI::Range(1e-12, 1.0));

  DiagnoseOptions diagnose;
  auto* diagnose_cmd =
      app.add_subcommand("diagnose", "Per-variable contributions to a statistic");
  diagnose_cmd->set_config("--config");
  diagnose_cmd->add_option("--model", diagnose.model_path, "fitted model file")->required();
  diagnose_cmd->add_option("--x", diagnose.x_path, "input-variable CSV")->required();
  diagnose_cmd->add_option("--y", diagnose.y_path, "output-variable CSV");
  diagnose_cmd->add_option("--out", diagnose.out_path, "long-format contribution CSV");
  diagnose_cmd->add_option("--statistic", diagnose.statistic, "statistic to decompose");
  diagnose_cmd->add_option("--method", diagnose.method, "gdc | rgdc | rbc | rrbc");
  diagnose_cmd->add_option("--theta", diagnose.theta, "generalized-decomposition exponent");
  diagnose_cmd->add_option("--alpha", diagnose.alpha, "false-alarm level");

  SimulateOptions simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate benchmark datasets");
  simulate_cmd->set_config("--config");
  simulate_cmd->add_option("--kind", simulate.kind, "random | seq_stationary | random_walk");
  simulate_cmd->add_option("--out", simulate.out_dir, "output directory");
  simulate_cmd->add_option("--samples", simulate.samples, "sample count (random / walk)");
  simulate_cmd->add_option("--sequences", simulate.sequences, "sequence count (stationary)");
  simulate_cmd->add_option("--length", simulate.sequence_length,
                           "sequence length (stationary)");
  simulate_cmd->add_option("--seed", simulate.seed, "generator seed");
  simulate_cmd->add_option("--fault-variable", simulate.fault_variable, "faulted input row");
  simulate_cmd->add_option("--fault-onset", simulate.fault_onset, "first faulty sample");
  simulate_cmd->add_option("--fault-magnitude", simulate.fault_magnitude,
                           "fault size (0 disables)");
  simulate_cmd->add_option("--fault-type", simulate.fault_type, "step | drift")
      ->check(CLI::IsMember({"step", "drift"}));
  simulate_cmd->add_option("--fault-span", simulate.fault_span, "drift ramp length");

  McFarOptions mcfar;
  auto* mcfar_cmd =
      app.add_subcommand("mc-far", "Monte-Carlo false-alarm study of all statistics");
  mcfar_cmd->set_config("--config");
  mcfar_cmd->add_option("--reps", mcfar.reps, "Monte-Carlo repetitions");
  mcfar_cmd->add_option("--samples", mcfar.samples, "samples per repetition");
  mcfar_cmd->add_option("--sequences", mcfar.sequences, "stationary sequences per repetition");
  mcfar_cmd->add_option("--length", mcfar.sequence_length, "stationary sequence length");
  mcfar_cmd->add_option("--seed", mcfar.seed, "base seed");
  mcfar_cmd->add_option("--out", mcfar.out_path, "report path (default: stdout)");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand(
      "verify-equivalence", "Check agreement with classical PCA / CCA / SFA monitors");
  verify_cmd->set_config("--config");
  verify_cmd->add_option("--samples", verify.samples, "samples per comparison");
  verify_cmd->add_option("--seed", verify.seed, "generator seed");
  verify_cmd->add_flag("--break-restriction", verify.break_restriction,
                       "negative control: perturb the restriction so the check fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train);
    if (monitor_cmd->parsed()) return cmd_monitor(monitor);
    if (diagnose_cmd->parsed()) return cmd_diagnose(diagnose);
    if (simulate_cmd->parsed()) return cmd_simulate(simulate);
    if (mcfar_cmd->parsed()) return cmd_mc_far(mcfar);
    if (verify_cmd->parsed()) return cmd_verify_equivalence(verify);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
