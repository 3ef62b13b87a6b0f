// npil: sparse third-order tensor completion via biased CP factorization,
// trained by SGD with an optional nonlinear-PID-refined error signal and
// PSO-adapted controller gains.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 divergence.

#include <CLI11.hpp>
#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "npil/ingest.hpp"
#include "npil/io.hpp"
#include "npil/metrics.hpp"
#include "npil/pso.hpp"
#include "npil/sparse_tensor.hpp"
#include "npil/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace npil;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDiverged = 3;

struct Seeds {
  std::uint64_t model = 0;
  std::uint64_t split = 0;
  std::uint64_t order = 0;
  std::uint64_t swarm = 0;
  std::uint64_t mask = 0;

  static Seeds from_master(std::uint64_t master) {
    return {derive_seed(master, 0), derive_seed(master, 1),
            derive_seed(master, 2), derive_seed(master, 3),
            derive_seed(master, 4)};
  }
};

struct Settings {
  std::string dataset;
  std::string optimizer = "plain";
  std::vector<double> gains;
  HyperParams hyper;
  PsoConfig pso;
  SplitRatio ratio;
  Seeds seeds;
  std::string out = ".";
};

SplitRatio parse_ratio(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw ConfigError("split ratio must look like '8:1:1'");
  }
  SplitRatio r;
  r.train = parse_double(text.substr(0, first));
  r.validation = parse_double(text.substr(first + 1, second - first - 1));
  r.test = parse_double(text.substr(second + 1));
  return r;
}

GainVector parse_gains(const std::vector<double>& values) {
  if (values.size() != 9) {
    throw ConfigError("expected 9 gain values (Kp1,Kp2,Kp3,Ki1,Ki2,Kd1,Kd2,Kd3,Kd4), got " +
                      std::to_string(values.size()));
  }
  Vec9 v;
  for (int d = 0; d < 9; ++d) v[d] = values[d];
  return GainVector::from_vector(v);
}

void apply_json(Settings& s, const json& j) {
  if (j.contains("dataset")) s.dataset = j.at("dataset").get<std::string>();
  if (j.contains("optimizer")) s.optimizer = j.at("optimizer").get<std::string>();
  if (j.contains("gains")) s.gains = j.at("gains").get<std::vector<double>>();
  if (j.contains("out")) s.out = j.at("out").get<std::string>();
  if (j.contains("hyper")) {
    const json& h = j.at("hyper");
    if (h.contains("eta")) s.hyper.eta = h.at("eta").get<double>();
    if (h.contains("lambda")) s.hyper.lambda = h.at("lambda").get<double>();
    if (h.contains("rank")) s.hyper.rank = h.at("rank").get<Index>();
    if (h.contains("max_iters")) s.hyper.max_iters = h.at("max_iters").get<int>();
    if (h.contains("tol")) s.hyper.tol = h.at("tol").get<double>();
  }
  if (j.contains("pso")) {
    const json& p = j.at("pso");
    if (p.contains("particles")) s.pso.particles = p.at("particles").get<int>();
    if (p.contains("inertia")) s.pso.inertia = p.at("inertia").get<double>();
    if (p.contains("c1")) s.pso.c1 = p.at("c1").get<double>();
    if (p.contains("c2")) s.pso.c2 = p.at("c2").get<double>();
    if (p.contains("velocity_constraint")) {
      s.pso.velocity_constraint = p.at("velocity_constraint").get<double>();
    }
    if (p.contains("rho")) s.pso.rho = p.at("rho").get<double>();
    if (p.contains("mu")) s.pso.mu = p.at("mu").get<double>();
    if (p.contains("parallel")) s.pso.parallel = p.at("parallel").get<bool>();
  }
  if (j.contains("split")) {
    const json& sp = j.at("split");
    if (sp.contains("train")) s.ratio.train = sp.at("train").get<double>();
    if (sp.contains("validation")) s.ratio.validation = sp.at("validation").get<double>();
    if (sp.contains("test")) s.ratio.test = sp.at("test").get<double>();
  }
  if (j.contains("seeds")) {
    const json& sd = j.at("seeds");
    if (sd.contains("model")) s.seeds.model = sd.at("model").get<std::uint64_t>();
    if (sd.contains("split")) s.seeds.split = sd.at("split").get<std::uint64_t>();
    if (sd.contains("order")) s.seeds.order = sd.at("order").get<std::uint64_t>();
    if (sd.contains("swarm")) s.seeds.swarm = sd.at("swarm").get<std::uint64_t>();
    if (sd.contains("mask")) s.seeds.mask = sd.at("mask").get<std::uint64_t>();
  }
}

json settings_json(const Settings& s, const std::string& command) {
  json j;
  j["command"] = command;
  if (!s.dataset.empty()) j["dataset"] = s.dataset;
  j["optimizer"] = s.optimizer;
  if (!s.gains.empty()) j["gains"] = s.gains;
  j["hyper"] = {{"eta", s.hyper.eta},
                {"lambda", s.hyper.lambda},
                {"rank", s.hyper.rank},
                {"max_iters", s.hyper.max_iters},
                {"tol", s.hyper.tol}};
  j["pso"] = {{"particles", s.pso.particles},
              {"inertia", s.pso.inertia},
              {"c1", s.pso.c1},
              {"c2", s.pso.c2},
              {"velocity_constraint", s.pso.velocity_constraint},
              {"rho", s.pso.rho},
              {"mu", s.pso.mu},
              {"parallel", s.pso.parallel}};
  j["split"] = {{"train", s.ratio.train},
                {"validation", s.ratio.validation},
                {"test", s.ratio.test}};
  j["seeds"] = {{"model", s.seeds.model},
                {"split", s.seeds.split},
                {"order", s.seeds.order},
                {"swarm", s.seeds.swarm},
                {"mask", s.seeds.mask}};
  return j;
}

std::vector<std::string> config_comment(const json& j) {
  return {"config " + j.dump()};
}

fs::path ensure_out_dir(const Settings& s) {
  fs::path out(s.out);
  fs::create_directories(out);
  return out;
}

std::string gain_summary(const GainVector& g) {
  const Vec9 v = g.to_vector();
  std::string text;
  for (int d = 0; d < 9; ++d) {
    if (d > 0) text += ' ';
    text += GainVector::names()[d];
    text += '=';
    text += format_double(v[d]);
  }
  return text;
}

// --- ingest -----------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::optional<double> density;
  bool stats_post_mask = false;
};

int run_ingest(const Settings& s, const IngestArgs& args) {
  const fs::path out = ensure_out_dir(s);
  const RawSeries series = read_raw_csv(args.input);

  IngestStats stats;
  SparseTensor3 raw = timeseries_to_tensor(
      series.rows, static_cast<Index>(series.channel_names.size()), &stats);
  if (stats.duplicate_rows > 0) {
    std::cerr << "warning: " << stats.duplicate_rows
              << " duplicate (day,second) rows; kept the last value\n";
  }

  json cfg = settings_json(s, "ingest");
  cfg["input"] = args.input;
  if (args.density) cfg["density"] = *args.density;
  cfg["stats"] = args.stats_post_mask ? "post-mask" : "pre-mask";

  const auto finalize = [&](const SparseTensor3& tensor,
                            const NormalizationParams& params) {
    const std::string stem = fs::path(args.input).stem().string();
    const fs::path coo_path = out / (stem + ".coo");
    const fs::path params_path = out / (stem + ".params");
    write_coo(coo_path, tensor, config_comment(cfg));
    write_params(params_path, params, config_comment(cfg));
    std::cout << "wrote " << coo_path.string() << " (" << tensor.size()
              << " entries, density " << format_double(density(tensor))
              << ") and " << params_path.string() << "\n";
  };

  if (!args.density) {
    const NormalizedTensor norm = normalize(raw);
    finalize(norm.tensor, norm.params);
    return kExitOk;
  }
  if (args.stats_post_mask) {
    const SparseTensor3 masked = mask_to_density(raw, *args.density, s.seeds.mask);
    const NormalizedTensor norm = normalize(masked);
    finalize(norm.tensor, norm.params);
  } else {
    const NormalizedTensor norm = normalize(raw);
    const SparseTensor3 masked =
        mask_to_density(norm.tensor, *args.density, s.seeds.mask);
    finalize(masked, norm.params);
  }
  return kExitOk;
}

// --- train ------------------------------------------------------------

std::optional<NormalizationParams> sidecar_params(const std::string& dataset) {
  fs::path p(dataset);
  p.replace_extension(".params");
  if (fs::exists(p)) return read_params(p);
  return std::nullopt;
}

int run_train(Settings& s) {
  if (s.dataset.empty()) throw ConfigError("train requires a dataset");
  s.hyper.validate();
  const fs::path out = ensure_out_dir(s);

  const SparseTensor3 tensor = read_coo(s.dataset);
  const DataSplit data = split(tensor, s.ratio, s.seeds.split);
  FactorModel initial = init_model(tensor.dim_i(), tensor.dim_j(),
                                   tensor.dim_k(), s.hyper.rank, s.seeds.model);

  const json cfg = settings_json(s, "train");
  const std::optional<NormalizationParams> params = sidecar_params(s.dataset);
  const NormalizationParams* params_ptr = params ? &*params : nullptr;

  StopReason stop;
  if (s.optimizer == "npil") {
    s.pso.seed = s.seeds.swarm;
    SwarmResult result = evolve(std::move(initial), data, s.hyper, s.pso,
                                s.seeds.order);
    stop = result.stop;
    std::vector<std::string> comments = config_comment(cfg);
    comments.push_back("gains " + gain_summary(result.best_gains));
    save_model(out / "model.npil", result.best_model, params_ptr, comments);
    write_epoch_csv(out / "epochs.csv", result.reports, config_comment(cfg));
    write_swarm_csv(out / "swarm.csv", result.particle_trace, config_comment(cfg));
    std::cout << "npil: " << result.reports.size() << " iterations, stop="
              << to_string(stop) << ", gbest fitness "
              << format_double(result.best_fitness) << "\n"
              << "gains: " << gain_summary(result.best_gains) << "\n";
  } else {
    Optimizer optimizer;
    if (s.optimizer == "plain") {
      optimizer = SgdPlain{};
    } else if (s.optimizer == "npid-fixed") {
      if (s.gains.empty()) throw ConfigError("npid-fixed requires --gains");
      optimizer = SgdNpid{parse_gains(s.gains)};
    } else {
      throw ConfigError("unknown optimizer '" + s.optimizer + "'");
    }
    TrainResult result =
        train(std::move(initial), data, s.hyper, optimizer, s.seeds.order);
    stop = result.stop;
    save_model(out / "model.npil", result.model, params_ptr, config_comment(cfg));
    write_epoch_csv(out / "epochs.csv", result.reports, config_comment(cfg));
    std::cout << s.optimizer << ": " << result.reports.size()
              << " epochs, stop=" << to_string(stop);
    if (!result.reports.empty()) {
      std::cout << ", val rmse " << format_double(result.reports.back().val_rmse);
    }
    std::cout << "\n";
  }
  return stop == StopReason::diverged ? kExitDiverged : kExitOk;
}

// --- evaluate ---------------------------------------------------------

struct EvaluateArgs {
  std::string model;
};

int run_evaluate(const Settings& s, const EvaluateArgs& args) {
  if (s.dataset.empty()) throw ConfigError("evaluate requires a dataset");
  const fs::path out = ensure_out_dir(s);
  const ModelFile file = load_model(args.model);
  const SparseTensor3 tensor = read_coo(s.dataset);
  if (file.model.dim_i() != tensor.dim_i() ||
      file.model.dim_j() != tensor.dim_j() ||
      file.model.dim_k() != tensor.dim_k()) {
    throw DataError(
        "model dims (" + std::to_string(file.model.dim_i()) + "," +
        std::to_string(file.model.dim_j()) + "," +
        std::to_string(file.model.dim_k()) + ") do not match tensor dims (" +
        std::to_string(tensor.dim_i()) + "," + std::to_string(tensor.dim_j()) +
        "," + std::to_string(tensor.dim_k()) + ")");
  }

  const DataSplit data = split(tensor, s.ratio, s.seeds.split);
  const EvalReport report = evaluate(file.model, data.test);

  json cfg = settings_json(s, "evaluate");
  cfg["model"] = args.model;

  std::cout << "test rmse=" << format_double(report.rmse)
            << " mae=" << format_double(report.mae) << " count=" << report.count
            << "\n";

  std::ofstream csv(out / "eval.csv");
  csv << "# " << config_comment(cfg)[0] << "\n"
      << "rmse,mae,count\n"
      << format_double(report.rmse) << ',' << format_double(report.mae) << ','
      << report.count << "\n";
  return kExitOk;
}

// --- impute -----------------------------------------------------------

struct ImputeArgs {
  std::string model;
  std::string cells;
  bool all_missing = false;
  std::string params_path;
};

std::vector<std::array<Index, 3>> parse_cells(const std::string& text) {
  std::vector<std::array<Index, 3>> cells;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    const auto c1 = item.find(',');
    const auto c2 = item.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw ConfigError("cells must look like 'i,j,k;i,j,k'");
    }
    cells.push_back({static_cast<Index>(parse_int(item.substr(0, c1))),
                     static_cast<Index>(parse_int(item.substr(c1 + 1, c2 - c1 - 1))),
                     static_cast<Index>(parse_int(item.substr(c2 + 1)))});
    start = end + 1;
  }
  if (cells.empty()) throw ConfigError("no cells given");
  return cells;
}

int run_impute(const Settings& s, const ImputeArgs& args) {
  const fs::path out = ensure_out_dir(s);
  const ModelFile file = load_model(args.model);

  std::optional<NormalizationParams> params = file.params;
  if (!args.params_path.empty()) params = read_params(args.params_path);
  if (!params) {
    std::cerr << "warning: no normalization params; writing normalized values "
                 "in both columns\n";
  }

  std::vector<std::array<Index, 3>> cells;
  if (args.all_missing) {
    if (s.dataset.empty()) {
      throw ConfigError("--all-missing requires a dataset of observed cells");
    }
    const SparseTensor3 tensor = read_coo(s.dataset);
    if (tensor.dim_i() != file.model.dim_i() ||
        tensor.dim_j() != file.model.dim_j() ||
        tensor.dim_k() != file.model.dim_k()) {
      throw DataError("model and dataset dimensions do not match");
    }
    std::unordered_set<std::uint64_t> observed;
    observed.reserve(tensor.size());
    for (const Entry& e : tensor.entries()) {
      observed.insert((static_cast<std::uint64_t>(e.i) * tensor.dim_j() + e.j) *
                          tensor.dim_k() +
                      e.k);
    }
    for (Index i = 0; i < tensor.dim_i(); ++i) {
      for (Index j = 0; j < tensor.dim_j(); ++j) {
        for (Index k = 0; k < tensor.dim_k(); ++k) {
          const std::uint64_t key =
              (static_cast<std::uint64_t>(i) * tensor.dim_j() + j) *
                  tensor.dim_k() +
              k;
          if (!observed.contains(key)) cells.push_back({i, j, k});
        }
      }
    }
  } else {
    if (args.cells.empty()) {
      throw ConfigError("impute requires --cells or --all-missing");
    }
    cells = parse_cells(args.cells);
  }

  json cfg = settings_json(s, "impute");
  cfg["model"] = args.model;

  std::ofstream csv(out / "impute.csv");
  csv << "# " << config_comment(cfg)[0] << "\n";
  csv << "i,j,k,value,denormalized\n";
  for (const auto& [i, j, k] : cells) {
    const double value = predict(file.model, i, j, k);
    const double raw = params ? denormalize(value, j, *params) : value;
    csv << i << ',' << j << ',' << k << ',' << format_double(value) << ','
        << format_double(raw) << '\n';
    std::cout << i << ',' << j << ',' << k << ',' << format_double(value) << ','
              << format_double(raw) << '\n';
  }
  std::cout << "wrote " << (out / "impute.csv").string() << " (" << cells.size()
            << " cells)\n";
  return kExitOk;
}

// --- benchmark --------------------------------------------------------

int run_benchmark(const Settings& base, const json& matrix) {
  if (matrix.is_null() || !matrix.contains("dataset")) {
    throw ConfigError("benchmark requires --config with a dataset");
  }
  const std::string dataset = matrix.at("dataset").get<std::string>();
  const auto optimizers =
      matrix.value("optimizers", std::vector<std::string>{"plain", "npil"});
  const auto densities = matrix.value("densities", std::vector<double>{});
  const auto seeds = matrix.value("seeds", std::vector<std::uint64_t>{0});
  const auto gains = matrix.value("gains", std::vector<double>{});

  const fs::path out = ensure_out_dir(base);
  const SparseTensor3 source = read_coo(dataset);

  std::ofstream summary(out / "summary.csv");
  json cfg = settings_json(base, "benchmark");
  cfg["matrix"] = matrix;
  summary << "# " << config_comment(cfg)[0] << "\n";
  summary << "optimizer,density,seed,final_rmse,final_mae,epochs,seconds\n";

  int failures = 0;
  const std::vector<double> effective_densities =
      densities.empty() ? std::vector<double>{density(source)} : densities;

  for (const std::string& optimizer : optimizers) {
    for (const double target : effective_densities) {
      for (const std::uint64_t master : seeds) {
        Settings run = base;
        run.optimizer = optimizer;
        run.gains = gains;
        run.seeds = Seeds::from_master(master);

        std::string tag = optimizer + "_" +
                          format_double(target) + "_" + std::to_string(master);
        for (char& c : tag) {
          if (c == '.') c = 'p';
        }
        run.out = (out / ("run_" + tag)).string();
        run.dataset = dataset;

        double final_rmse = std::numeric_limits<double>::quiet_NaN();
        double final_mae = std::numeric_limits<double>::quiet_NaN();
        std::size_t epochs = 0;
        const auto start = std::chrono::steady_clock::now();
        try {
          const SparseTensor3 masked =
              mask_to_density(source, target, run.seeds.mask);
          const DataSplit data = split(masked, run.ratio, run.seeds.split);
          FactorModel initial =
              init_model(masked.dim_i(), masked.dim_j(), masked.dim_k(),
                         run.hyper.rank, run.seeds.model);
          fs::create_directories(run.out);
          const json run_cfg = settings_json(run, "benchmark-run");

          FactorModel final_model;
          if (optimizer == "npil") {
            run.pso.seed = run.seeds.swarm;
            SwarmResult result =
                evolve(std::move(initial), data, run.hyper, run.pso,
                       run.seeds.order);
            if (result.stop == StopReason::diverged) throw DataError("diverged");
            epochs = result.reports.size();
            final_model = std::move(result.best_model);
            write_epoch_csv(fs::path(run.out) / "epochs.csv", result.reports,
                            config_comment(run_cfg));
            write_swarm_csv(fs::path(run.out) / "swarm.csv",
                            result.particle_trace, config_comment(run_cfg));
          } else {
            Optimizer opt;
            if (optimizer == "plain") {
              opt = SgdPlain{};
            } else if (optimizer == "npid-fixed") {
              opt = SgdNpid{parse_gains(run.gains)};
            } else {
              throw ConfigError("unknown optimizer '" + optimizer + "'");
            }
            TrainResult result =
                train(std::move(initial), data, run.hyper, opt, run.seeds.order);
            if (result.stop == StopReason::diverged) throw DataError("diverged");
            epochs = result.reports.size();
            final_model = std::move(result.model);
            write_epoch_csv(fs::path(run.out) / "epochs.csv", result.reports,
                            config_comment(run_cfg));
          }
          const EvalReport report = evaluate(final_model, data.test);
          final_rmse = report.rmse;
          final_mae = report.mae;
        } catch (const std::exception& err) {
          ++failures;
          std::cerr << "run " << tag << " failed: " << err.what() << "\n";
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        summary << optimizer << ',' << format_double(target) << ',' << master
                << ',' << format_double(final_rmse) << ','
                << format_double(final_mae) << ',' << epochs << ','
                << format_double(seconds) << "\n";
      }
    }
  }
  std::cout << "wrote " << (out / "summary.csv").string();
  if (failures > 0) std::cout << " (" << failures << " runs failed)";
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse tensor completion with PID-refined SGD training"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> master_seed;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", master_seed, "master seed; derives all sub-seeds");
  app.add_option("--out", out_dir, "output directory");

  Settings s;

  // per-command argument blocks; flags override config-file values
  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "raw meter CSV -> normalized COO");
  ingest->fallthrough();
  ingest->add_option("input", ingest_args.input, "raw CSV file")->required();
  ingest->add_option("--density", ingest_args.density,
                     "mask down to this observed fraction");
  std::optional<std::uint64_t> mask_seed;
  ingest->add_option("--mask-seed", mask_seed, "seed for the density mask");
  ingest->add_flag("--stats-post-mask", ingest_args.stats_post_mask,
                   "compute normalization stats after masking");

  auto* train_cmd = app.add_subcommand("train", "fit a factor model");
  train_cmd->fallthrough();
  std::optional<std::string> dataset, optimizer, ratio_text;
  std::vector<double> gains_flag;
  std::optional<double> eta, lambda, tol, rho, mu, inertia, c1, c2, vconstraint;
  std::optional<Index> rank;
  std::optional<int> max_iters, particles;
  std::optional<std::uint64_t> model_seed, split_seed, order_seed, swarm_seed;
  bool parallel = false;
  train_cmd->add_option("--data", dataset, "COO dataset");
  train_cmd->add_option("--optimizer", optimizer, "plain | npid-fixed | npil");
  train_cmd->add_option("--gains", gains_flag,
                        "9 fixed gains for npid-fixed")->delimiter(',');
  train_cmd->add_option("--eta", eta, "learning rate");
  train_cmd->add_option("--lambda", lambda, "regularization coefficient");
  train_cmd->add_option("--rank", rank, "latent rank R");
  train_cmd->add_option("--max-iters", max_iters, "iteration cap");
  train_cmd->add_option("--tol", tol, "convergence tolerance on val RMSE");
  train_cmd->add_option("--split-ratio", ratio_text, "e.g. 8:1:1");
  train_cmd->add_option("--particles", particles, "swarm size Q");
  train_cmd->add_option("--inertia", inertia, "PSO inertia weight w");
  train_cmd->add_option("--c1", c1, "PSO personal acceleration");
  train_cmd->add_option("--c2", c2, "PSO global acceleration");
  train_cmd->add_option("--velocity-constraint", vconstraint,
                        "PSO velocity clamp m");
  train_cmd->add_option("--rho", rho, "fitness RMSE weight");
  train_cmd->add_option("--mu", mu, "fitness MAE weight");
  train_cmd->add_flag("--parallel", parallel, "evaluate particles concurrently");
  train_cmd->add_option("--model-seed", model_seed, "");
  train_cmd->add_option("--split-seed", split_seed, "");
  train_cmd->add_option("--order-seed", order_seed, "");
  train_cmd->add_option("--swarm-seed", swarm_seed, "");

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "test-set RMSE/MAE");
  evaluate_cmd->fallthrough();
  evaluate_cmd->add_option("--model", evaluate_args.model, "model file")->required();
  evaluate_cmd->add_option("--data", dataset, "COO dataset");
  evaluate_cmd->add_option("--split-ratio", ratio_text, "e.g. 8:1:1");
  evaluate_cmd->add_option("--split-seed", split_seed, "");

  ImputeArgs impute_args;
  auto* impute_cmd = app.add_subcommand("impute", "predict missing cells");
  impute_cmd->fallthrough();
  impute_cmd->add_option("--model", impute_args.model, "model file")->required();
  impute_cmd->add_option("--cells", impute_args.cells, "'i,j,k;i,j,k' list");
  impute_cmd->add_flag("--all-missing", impute_args.all_missing,
                       "every unobserved cell of --data");
  impute_cmd->add_option("--data", dataset, "COO dataset (for --all-missing)");
  impute_cmd->add_option("--params", impute_args.params_path,
                         "normalization params sidecar");

  auto* benchmark_cmd =
      app.add_subcommand("benchmark", "run an optimizer/density/seed matrix");
  benchmark_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    json file_config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config " + config_path);
      try {
        in >> file_config;
      } catch (const json::exception& err) {
        throw ConfigError("bad config JSON: " + std::string(err.what()));
      }
      apply_json(s, file_config);
    }
    if (master_seed) s.seeds = Seeds::from_master(*master_seed);
    if (out_dir) s.out = *out_dir;
    if (dataset) s.dataset = *dataset;
    if (optimizer) s.optimizer = *optimizer;
    if (!gains_flag.empty()) s.gains = gains_flag;
    if (ratio_text) s.ratio = parse_ratio(*ratio_text);
    if (eta) s.hyper.eta = *eta;
    if (lambda) s.hyper.lambda = *lambda;
    if (rank) s.hyper.rank = *rank;
    if (max_iters) s.hyper.max_iters = *max_iters;
    if (tol) s.hyper.tol = *tol;
    if (particles) s.pso.particles = *particles;
    if (inertia) s.pso.inertia = *inertia;
    if (c1) s.pso.c1 = *c1;
    if (c2) s.pso.c2 = *c2;
    if (vconstraint) s.pso.velocity_constraint = *vconstraint;
    if (rho) s.pso.rho = *rho;
    if (mu) s.pso.mu = *mu;
    if (parallel) s.pso.parallel = true;
    if (model_seed) s.seeds.model = *model_seed;
    if (split_seed) s.seeds.split = *split_seed;
    if (order_seed) s.seeds.order = *order_seed;
    if (swarm_seed) s.seeds.swarm = *swarm_seed;
    if (mask_seed) s.seeds.mask = *mask_seed;

    if (ingest->parsed()) return run_ingest(s, ingest_args);
    if (train_cmd->parsed()) return run_train(s);
    if (evaluate_cmd->parsed()) return run_evaluate(s, evaluate_args);
    if (impute_cmd->parsed()) return run_impute(s, impute_args);
    if (benchmark_cmd->parsed()) return run_benchmark(s, file_config);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
