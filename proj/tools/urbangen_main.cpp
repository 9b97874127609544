// Command-line front end: generate (run a stream to disk), validate (config
// lint), stats (manifest summaries). All behavior is fixed by the config and
// flags up front; nothing is interactive.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "urbangen/config.hpp"
#include "urbangen/stream.hpp"

using namespace urbangen;
using njson = nlohmann::json;

namespace {

const char* LabelName(int label)
{
  switch (label) {
  case 0: return "background";
  case 1: return "tree";
  case 2: return "lamp";
  case 3: return "human";
  case 4: return "vehicle";
  case 255: return "sky";
  }
  return "?";
}

int RunGenerate(const std::string& config_path, const std::string& preset, std::uint64_t seed,
                bool seed_given, const std::string& split, const std::string& out,
                const StreamRunOptions& options)
{
  StreamConfig config;
  if (!config_path.empty()) {
    config = LoadConfigFile(config_path);
    if (seed_given) config.globals.seed = seed;
  } else {
    config = BuildPreset(preset, seed, split);
  }

  std::printf("seed %llu  config hash %016llx  sub-sequences %zu\n",
              static_cast<unsigned long long>(config.globals.seed),
              static_cast<unsigned long long>(ConfigHash(config)), config.schedule.size());
  const StreamResult res = RunStream(config, out, options);

  const long rendered = options.emit_frames ? res.frames_total : res.frames_captured;
  std::printf("frames %ld (captured %ld, written %ld)  patches %ld  duplicates skipped %ld\n",
              res.frames_total, res.frames_captured, res.frames_written, res.patches_written,
              res.duplicates_skipped);
  std::printf("wall %.1f s  render %.1f s  throughput %.1f rendered fps\n", res.total_seconds,
              res.render_seconds, res.render_seconds > 0 ? rendered / res.render_seconds : 0.0);
  std::printf("manifest %s\n", res.manifest_path.c_str());
  return 0;
}

int RunValidate(const std::string& config_path)
{
  const StreamConfig config = LoadConfigFile(config_path);
  std::printf("ok  seed %llu  config hash %016llx  sub-sequences %zu\n",
              static_cast<unsigned long long>(config.globals.seed),
              static_cast<unsigned long long>(ConfigHash(config)), config.schedule.size());
  return 0;
}

int RunStats(const std::string& manifest_path)
{
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw std::runtime_error("stats: cannot open " + manifest_path);

  std::map<int, long> patches_per_label;
  std::map<int, std::map<int, long>> patches_per_subseq_label;
  njson header;
  njson summary;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const njson rec = njson::parse(line);
    const std::string type = rec.at("type").get<std::string>();
    if (type == "header") {
      header = rec;
    } else if (type == "summary") {
      summary = rec;
    } else if (type == "patch") {
      const int label = rec.at("label").get<int>();
      ++patches_per_label[label];
      ++patches_per_subseq_label[rec.at("t").get<int>()][label];
    }
  }

  if (!header.is_null()) {
    std::printf("seed %llu  config hash %016llx  %s  %d x %d @ %.1f fps  stride %d\n",
                header.at("seed").get<unsigned long long>(),
                header.at("config_hash").get<unsigned long long>(),
                header.value("preset", std::string("-")).empty()
                    ? "-"
                    : header.value("preset", std::string("-")).c_str(),
                header.at("width").get<int>(), header.at("height").get<int>(),
                header.at("fps").get<double>(), header.at("capture_stride").get<int>());
  }
  if (!summary.is_null()) {
    std::printf("frames %ld  captured %ld  patches %ld  duplicates skipped %ld\n",
                summary.at("frames").get<long>(), summary.at("captured").get<long>(),
                summary.at("patches").get<long>(),
                summary.at("duplicates_skipped").get<long>());
    const njson& drops = summary.at("drops");
    std::printf("drops: small %ld  overlap %ld  bg slots skipped %ld  (boxes %ld, emitted %ld)\n",
                drops.at("small").get<long>(), drops.at("overlap").get<long>(),
                drops.at("bg_skipped").get<long>(), drops.at("boxes_total").get<long>(),
                drops.at("emitted").get<long>());
  }

  std::printf("patches per object category:\n");
  for (const auto& [label, count] : patches_per_label) {
    std::printf("  %-10s %8ld\n", LabelName(label), count);
  }
  for (const auto& [t, per_label] : patches_per_subseq_label) {
    std::printf("  t=%d:", t);
    for (const auto& [label, count] : per_label) {
      std::printf("  %s %ld", LabelName(label), count);
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Deterministic procedural urban video stream generator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::uint64_t seed = 1;
  std::string split = "train";
  std::string out = "out";
  std::string transform = "none";
  std::string timing_json;
  StreamRunOptions options;
  options.emit_frames = false;
  options.emit_patches = true;
  long max_frames = 0;
  int threads = 1;

  CLI::App* generate = app.add_subcommand("generate", "Run a stream and write its artifacts");
  CLI::Option* cfg_opt = generate->add_option("--config", config_path, "Configuration JSON file");
  CLI::Option* preset_opt =
      generate->add_option("--preset", preset,
                           "incremental_class, incremental_lighting or incremental_weather");
  cfg_opt->excludes(preset_opt);
  CLI::Option* seed_opt = generate->add_option("--seed", seed, "Stream seed");
  generate->add_option("--split", split, "train or test (presets only)")
      ->check(CLI::IsMember({"train", "test"}));
  generate->add_option("--out", out, "Output directory")->required();
  generate->add_flag("--frames,!--no-frames", options.emit_frames,
                     "Write every frame's planes (default off)");
  generate->add_flag("--patches,!--no-patches", options.emit_patches,
                     "Extract and write patches (default on)");
  generate->add_option("--transform", transform, "Per-patch preprocessing")
      ->check(CLI::IsMember({"none", "colorratio", "lbp"}));
  generate->add_option("--threads", threads, "Render worker threads");
  generate->add_option("--max-frames", max_frames, "Stop after N frames (0 = whole schedule)");
  generate->add_option("--timing-json", timing_json, "Write wall-clock timing to this file");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a configuration");
  validate->add_option("--config", validate_path, "Configuration JSON file")->required();

  std::string manifest_path;
  CLI::App* stats = app.add_subcommand("stats", "Summarize a stream manifest");
  stats->add_option("--manifest", manifest_path, "manifest.jsonl path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      if (config_path.empty() && preset.empty()) {
        std::fprintf(stderr, "generate needs --config or --preset\n");
        return 2;
      }
      options.threads = threads;
      options.max_frames = max_frames;
      options.timing_path = timing_json;
      options.transform = transform == "colorratio" ? PatchTransform::ColorRatio
                          : transform == "lbp"      ? PatchTransform::Lbp
                                                    : PatchTransform::None;
      return RunGenerate(config_path, preset, seed, seed_opt->count() > 0, split, out, options);
    }
    if (validate->parsed()) return RunValidate(validate_path);
    if (stats->parsed()) return RunStats(manifest_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
