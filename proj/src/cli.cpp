// Copyright 2026 The QBE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "qbe/baseline.hpp"
#include "qbe/errors.hpp"
#include "qbe/harness.hpp"
#include "qbe/random.hpp"
#include "qbe/search.hpp"

namespace qbe {

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("-c,--config", args.config, "scenario config file");
  if (config_required) opt->required();
  cmd->add_option("--seed", args.seed, "override run.seed");
  cmd->add_option("--out", args.out, "override run.out (output directory)");
}

ScenarioConfig resolve(const CommonArgs& args) {
  ScenarioConfig cfg = args.config.empty() ? ScenarioConfig{} : load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.out) cfg.out = *args.out;
  fs::create_directories(cfg.out);
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void cmd_simulate(const ScenarioConfig& cfg) {
  const auto truth = build_true_quantizer(cfg.quantizer);
  const auto known = build_known_quantizer(cfg.quantizer, truth);
  const double step = truth.step();
  const auto basis = build_basis(cfg.signal);
  const auto theta = build_theta(cfg.signal, step, cfg.signal.amplitude);
  const double sigma = cfg.signal.sigma.front() * step;
  const auto n = cfg.signal.samples.front();
  const auto seed = derive_seed(cfg.seed, {0});
  auto rec = acquire(ParamVector{theta, sigma}, basis, cfg.signal.lambda, n, truth, seed,
                     build_noise(cfg.signal));
  rec.quantizer_ref = "levels.txt";
  const fs::path dir = cfg.out;
  save_levels((dir / "levels.txt").string(), known);
  save_levels((dir / "levels_true.txt").string(), truth);
  auto csv = open_out(dir / "record.csv");
  write_record_csv(csv, rec);
  auto meta = open_out(dir / "record.ini");
  meta << std::setprecision(17) << "[record]\nlambda = " << rec.lambda_true
       << "\nseed = " << rec.seed << "\nquantizer_file = " << rec.quantizer_ref
       << "\nsamples = " << rec.codes.size() << "\nsigma = " << sigma << '\n';
  std::cout << "wrote " << rec.codes.size() << " samples to " << (dir / "record.csv").string()
            << '\n';
}

struct RecordMeta {
  double lambda = 0.0;
  std::string quantizer_file;
  std::optional<double> sigma;
};

RecordMeta read_meta(const fs::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
    RecordMeta m;
    m.lambda = tree.get<double>("record.lambda");
    m.quantizer_file = tree.get<std::string>("record.quantizer_file");
    if (auto s = tree.get_optional<double>("record.sigma")) m.sigma = *s;
    return m;
  } catch (const pt::ptree_error& e) {
    throw ConfigError("record metadata " + path.string() + ": " + e.what());
  }
}

void cmd_fit(const ScenarioConfig& cfg, const std::string& record_path, std::string meta_path) {
  const fs::path record(record_path);
  if (meta_path.empty()) meta_path = fs::path(record).replace_extension(".ini").string();
  const auto meta = read_meta(meta_path);
  fs::path levels_path = meta.quantizer_file;
  if (levels_path.is_relative()) levels_path = fs::path(meta_path).parent_path() / levels_path;
  const auto q = load_levels(levels_path.string());

  std::ifstream in(record);
  if (!in) throw ConfigError("cannot read " + record_path);
  const auto rec = read_record_csv(in);
  const auto basis = build_basis(cfg.signal);
  const auto options = build_qbe_options(cfg.estimator, meta.sigma);
  if (cfg.estimator.sigma_known && !meta.sigma)
    throw ConfigError("estimator.sigma = known but the record carries no sigma");
  const fs::path dir = cfg.out;

  if (cfg.estimator.qbe) {
    FitResult fit;
    if (cfg.estimator.frequency_known) {
      fit = qbe_fit(rec, basis, meta.lambda, q, options);
    } else {
      UnknownFreqOptions uo;
      uo.qbe = options;
      uo.gamma = cfg.estimator.gamma;
      uo.bracket_halfwidth = cfg.estimator.bracket_halfwidth;
      uo.use_subset_average = cfg.estimator.mse_subset_average;
      auto res = qbe_fit_unknown_freq(rec.codes, basis, q, uo);
      auto trace = open_out(dir / "trace.csv");
      write_trace_csv(trace, res.trace);
      fit = std::move(res.fit);
    }
    auto out = open_out(dir / "fit_qbe.csv");
    write_fit_csv(out, fit, basis);
    auto cdf = open_out(dir / "cdf.csv");
    write_cdf_csv(cdf, fit.cdf_points);
  }
  if (cfg.estimator.lse) {
    if (cfg.signal.basis != "sine") throw ConfigError("the sine fit needs the sine basis");
    const auto volts = reconstruct(rec.codes, build_lse_quantizer(cfg.quantizer, q));
    SineFitResult fit;
    if (cfg.estimator.frequency_known) {
      fit = sinefit3(volts, meta.lambda);
    } else {
      SineFit4Options so;
      so.gamma = cfg.estimator.gamma;
      so.halfwidth = cfg.estimator.bracket_halfwidth;
      fit = sinefit4(volts, dft_frequency_guess(volts), so);
    }
    auto out = open_out(dir / "fit_lse.csv");
    write_sinefit_csv(out, fit);
  }
}

void cmd_sweep(const ScenarioConfig& cfg) {
  const auto result = run_scenario(cfg);
  auto out = open_out(fs::path(cfg.out) / "sweep.csv");
  write_sweep_csv(out, result);
  for (const auto& r : result.rows)
    std::cout << std::setprecision(6) << "sigma=" << r.sigma << " N=" << r.samples << ' '
              << r.estimator << " rmse=" << r.rmse << " failures=" << r.failures << '\n';
}

void cmd_motivate(const ScenarioConfig& cfg) {
  const auto result = run_motivating_example(cfg);
  auto out = open_out(fs::path(cfg.out) / "motivate.csv");
  write_motivate_csv(out, result);
}

void cmd_cdf(const ScenarioConfig& cfg) {
  const auto result = run_cdf_experiment(cfg);
  const fs::path dir = cfg.out;
  auto cdf = open_out(dir / "cdf.csv");
  write_cdf_rows_csv(cdf, result);
  auto pdf = open_out(dir / "pdf.csv");
  write_pdf_rows_csv(pdf, result);
  auto sig = open_out(dir / "sigma.csv");
  write_sigma_rows_csv(sig, result);
  std::cout << std::setprecision(6) << "max |p_hat - Phi| = " << result.max_abs_deviation
            << ", sigma_hat mean = " << result.sigma_mean << " std = " << result.sigma_std
            << " (steps)\n";
}

QuantizerModel model_for(const ScenarioConfig& cfg, const std::string& levels) {
  return levels.empty() ? build_true_quantizer(cfg.quantizer) : load_levels(levels);
}

void cmd_calibrate(const ScenarioConfig& cfg, const std::string& levels) {
  const auto q = model_for(cfg, levels);
  const auto& k = cfg.calibrate;
  const auto adc = make_noisy_adc(q, k.noise_sigma * q.step(), derive_seed(cfg.seed, {k.seed}));
  ServoSettings settings;
  settings.samples_per_step = k.samples_per_step;
  settings.tolerance = k.tolerance;
  const auto measured = servo_loop_calibrate(adc, q.code_count(), q.v_lo(), q.v_hi(), settings);
  save_levels((fs::path(cfg.out) / "levels.txt").string(), measured);
}

void cmd_inl(const ScenarioConfig& cfg, const std::string& levels) {
  const auto table = compute_inl(model_for(cfg, levels));
  auto out = open_out(fs::path(cfg.out) / "inl.csv");
  out << "code,inl\n" << std::setprecision(17);
  for (std::size_t i = 0; i < table.inl.size(); ++i) out << i + 1 << ',' << table.inl[i] << '\n';
  std::cout << std::setprecision(6) << "max |INL| = " << table.max_abs() << " steps\n";
}

}  // namespace

int cli_entry(int argc, const char* const* argv) {
  CLI::App app{"Quantile-based estimation of periodic signal parameters from ADC codes"};
  app.require_subcommand(1);

  CommonArgs simulate_args, fit_args, sweep_args, motivate_args, cdf_args, calibrate_args,
      inl_args;
  std::string record_path, meta_path, calibrate_levels, inl_levels;

  auto* simulate = app.add_subcommand("simulate", "acquire a record through a simulated ADC");
  add_common(simulate, simulate_args, true);
  auto* fit = app.add_subcommand("fit", "run QBE and the sine fit on a record");
  add_common(fit, fit_args, false);
  fit->add_option("--record", record_path, "record CSV written by simulate")->required();
  fit->add_option("--meta", meta_path, "record metadata (default: record path with .ini)");
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo RMSE sweep over sigma and N");
  add_common(sweep, sweep_args, true);
  auto* motivate = app.add_subcommand("motivate", "uniform vs perturbed quantizer error ratio");
  add_common(motivate, motivate_args, true);
  auto* cdf = app.add_subcommand("cdf", "noise CDF/PDF and sigma stability experiment");
  add_common(cdf, cdf_args, true);
  auto* calibrate = app.add_subcommand("calibrate", "servo-loop transition level measurement");
  add_common(calibrate, calibrate_args, false);
  calibrate->add_option("--levels", calibrate_levels, "levels file of the converter to measure");
  auto* inl = app.add_subcommand("inl", "integral nonlinearity of a quantizer model");
  add_common(inl, inl_args, false);
  inl->add_option("--levels", inl_levels, "levels file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*simulate) cmd_simulate(resolve(simulate_args));
    if (*fit) cmd_fit(resolve(fit_args), record_path, meta_path);
    if (*sweep) cmd_sweep(resolve(sweep_args));
    if (*motivate) cmd_motivate(resolve(motivate_args));
    if (*cdf) cmd_cdf(resolve(cdf_args));
    if (*calibrate) cmd_calibrate(resolve(calibrate_args), calibrate_levels);
    if (*inl) cmd_inl(resolve(inl_args), inl_levels);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace qbe
