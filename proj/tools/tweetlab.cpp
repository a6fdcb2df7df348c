// Command-line front end: one subcommand per stage, `run` for all of them,
// `synth` for fixture generation.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tweetlab/common.hpp"
#include "tweetlab/pipeline.hpp"
#include "tweetlab/synth.hpp"

namespace {

using namespace tweetlab;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::data: return 3;
    case ErrorCategory::internal: return 4;
  }
  return 4;
}

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("-c,--config", f.config, "key = value run configuration");
  if (config_required) c->required();
  cmd->add_option("--seed", f.seed, "override the configured seed");
  cmd->add_option("-j,--workers", f.workers, "worker threads (0 = hardware concurrency)");
  cmd->add_option("-o,--out", f.out, "output directory");
}

pipeline::RunConfig load_run_config(const CommonFlags& f) {
  auto cfg = pipeline::RunConfig::load(f.config);
  if (f.seed) cfg.seed = cfg.train.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.out) cfg.out = *f.out;
  std::filesystem::create_directories(cfg.out);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tweetlab: election tweet analysis (sentiment, spam campaigns, bot activity)"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::optional<pipeline::Stage> stage;
  bool run_all = false;

  for (const auto s : {pipeline::Stage::ingest, pipeline::Stage::sentiment, pipeline::Stage::spamfilter,
                       pipeline::Stage::botscore, pipeline::Stage::dacmap, pipeline::Stage::diffusion,
                       pipeline::Stage::timeline}) {
    auto* cmd = app.add_subcommand(std::string(pipeline::to_string(s)),
                                   "run the " + std::string(pipeline::to_string(s)) + " stage");
    add_common(cmd, flags, true);
    cmd->callback([&stage, s] { stage = s; });
  }
  auto* run = app.add_subcommand("run", "run every stage and write summary.json");
  add_common(run, flags, true);
  run->callback([&run_all] { run_all = true; });

  std::string synth_spec;
  std::string synth_out = "synth";
  bool synth_gzip = false;
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "generate a synthetic archive with planted ground truth");
  synth->add_option("-c,--config", synth_spec, "synthetic population spec (defaults when omitted)");
  synth->add_option("-o,--out", synth_out, "output directory");
  synth->add_option("--seed", synth_seed, "override the spec seed");
  synth->add_flag("--gzip", synth_gzip, "gzip the archive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      auto spec = synth_spec.empty() ? synth::SynthSpec::defaults() : synth::SynthSpec::load(synth_spec);
      if (synth_seed) spec.seed = *synth_seed;
      spec.validate();
      const auto out = synth::generate_fixture(spec);
      synth::write_fixture(out, synth_out, synth_gzip);
      std::cout << "wrote " << out.tweets << " tweets from " << out.users.size() << " users to "
                << synth_out << "\n";
      return 0;
    }
    const auto cfg = load_run_config(flags);
    if (run_all) {
      pipeline::run_pipeline(cfg);
      std::cout << (cfg.out / "summary.json").string() << "\n";
    } else {
      const std::array<pipeline::Stage, 1> only = {*stage};
      cfg.validate(only);
      pipeline::run_stage(*stage, cfg);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error [io]: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
