// lightatom: free-space light-atom interaction pipeline.
//
//   lightatom overlap        --config cfg.json [--out dir] [--format csv|json]
//   lightatom simulate       --config cfg.json --out dir [--seed N] [--samples N]
//   lightatom fit            --data spectrum.csv --model transmission --out dir
//   lightatom heating-sweep  --config cfg.json --out dir [--seed N] [--samples N]
//   lightatom replay         --artifact dir/spectrum.csv --out dir2
//
// Exit codes: 0 ok, 1 usage, 2 configuration, 3 computation, 4 I/O.

#include <omp.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "lightatom/commands.hpp"
#include "lightatom/errors.hpp"

namespace {

using namespace lightatom;

enum Exit : int { kOk = 0, kUsage = 1, kConfig = 2, kCompute = 3, kIo = 4 };

struct CommonFlags {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
};

RunConfig load(const CommonFlags& f) {
  nlohmann::json doc;
  {
    std::ifstream in(f.config);
    if (!in) throw IoError("cannot open config '" + f.config + "'");
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  if (f.seed) doc["seed"] = *f.seed;
  if (f.samples) doc["samples"] = *f.samples;
  return resolve_config(doc);
}

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_out) {
  cmd->add_option("--config", f.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  auto* out = cmd->add_option("--out", f.out, "Output directory");
  if (needs_out) out->required();
  cmd->add_option("--format", f.format, "Artifact format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "Override the configured seed");
  cmd->add_option("--samples", f.samples, "Override the Monte-Carlo sample count")->check(CLI::PositiveNumber);
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& p : files) std::cout << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-space light-atom interaction: overlap, spectra, thermal averaging, fits"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  CommonFlags overlap_f, simulate_f, sweep_f;
  auto* overlap = app.add_subcommand("overlap", "Ideal mode overlap, extinction and saturation power");
  add_common(overlap, overlap_f, false);
  auto* simulate = app.add_subcommand("simulate", "Synthetic count records and spectra");
  add_common(simulate, simulate_f, true);
  auto* sweep = app.add_subcommand("heating-sweep", "Resonance and extinction versus scattered photons");
  add_common(sweep, sweep_f, true);

  std::string data, model = "transmission", fit_out;
  auto* fit = app.add_subcommand("fit", "Weighted least-squares fit of a spectrum table");
  fit->add_option("--data", data, "CSV or JSON table: x, y, sigma in the first three columns")->required();
  fit->add_option("--model", model, "Lineshape model")
      ->check(CLI::IsMember({"transmission", "reflection", "saturation"}));
  fit->add_option("--out", fit_out, "Output directory")->required();

  std::string artifact, replay_out;
  auto* replay = app.add_subcommand("replay", "Regenerate an artifact from its embedded configuration");
  replay->add_option("--artifact", artifact, "Artifact written by any command")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // --help exits 0, every usage error 1
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*overlap) {
      const auto cfg = load(overlap_f);
      report(cli::cmd_overlap(cfg, overlap_f.out, cli::parse_format(overlap_f.format), std::cout));
    } else if (*simulate) {
      const auto cfg = load(simulate_f);
      report(cli::cmd_simulate(cfg, simulate_f.out, cli::parse_format(simulate_f.format)));
    } else if (*sweep) {
      const auto cfg = load(sweep_f);
      report(cli::cmd_heating_sweep(cfg, sweep_f.out, cli::parse_format(sweep_f.format)));
    } else if (*fit) {
      report(cli::cmd_fit(data, model, fit_out));
    } else if (*replay) {
      report(cli::cmd_replay(artifact, replay_out));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return kCompute;
  }
  return kOk;
}
