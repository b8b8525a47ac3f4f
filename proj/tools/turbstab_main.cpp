#include <CLI11.hpp>
#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "turbstab/config.hpp"
#include "turbstab/flow_io.hpp"
#include "turbstab/metrics.hpp"
#include "turbstab/pgm.hpp"
#include "turbstab/version.hpp"

namespace fs = std::filesystem;
using namespace turbstab;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed;  // string so "unset" is representable
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  cmd->add_option("--set", opts.sets, "override a config key (repeatable)");
  cmd->add_option("--seed", opts.seed, "override the RNG seed");
}

// Precedence: defaults < --config file < --set (in order) < --seed.
RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) apply_config_file(cfg, opts.config_path);
  for (const std::string& kv : opts.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw config_error("--set expects key=value, got '" + kv + "'");
    apply_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!opts.seed.empty()) apply_config_key(cfg, "seed", opts.seed);
  return cfg;
}

// Writes through a temp file so a failed run never leaves partial outputs.
template <typename Fn>
void atomic_write(const fs::path& path, Fn&& writer) {
  const fs::path tmp = path.string() + ".tmp";
  writer(tmp);
  fs::rename(tmp, path);
}

void write_text(const fs::path& path, const std::string& text) {
  atomic_write(path, [&](const fs::path& tmp) {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw io_error(io_errc::write_failure, "cannot write " + tmp.string());
  });
}

// Minimal glob (* and ?) over the pattern's parent directory.
bool glob_match(const std::string& pattern, const std::string& name) {
  std::size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& patterns) {
  std::vector<fs::path> out;
  for (const std::string& raw : patterns) {
    if (raw.find('*') == std::string::npos && raw.find('?') == std::string::npos) {
      if (!fs::exists(raw)) throw std::runtime_error("input not found: " + raw);
      out.emplace_back(raw);
      continue;
    }
    const fs::path pattern(raw);
    const fs::path dir = pattern.parent_path().empty() ? fs::path(".") : pattern.parent_path();
    const std::string leaf = pattern.filename().string();
    std::vector<fs::path> matches;
    if (fs::is_directory(dir))
      for (const auto& entry : fs::directory_iterator(dir))
        if (glob_match(leaf, entry.path().filename().string())) matches.push_back(entry.path());
    if (matches.empty()) throw std::runtime_error("no files match pattern: " + raw);
    std::sort(matches.begin(), matches.end());
    out.insert(out.end(), matches.begin(), matches.end());
  }
  return out;
}

std::string format_frame_name(const char* stem, int index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.%s", stem, index, ext);
  return buf;
}

int cmd_simulate(const std::string& truth_path, const std::string& out_dir, const CommonOpts& opts) {
  const RunConfig cfg = resolve_config(opts);
  const Image truth = load_pgm(truth_path);
  fs::create_directories(out_dir);

  const DegradeResult result = degrade(truth, cfg.sim);
  const fs::path dir(out_dir);
  for (int i = 0; i < cfg.sim.frames; ++i) {
    atomic_write(dir / format_frame_name("frame", i, "pgm"),
                 [&](const fs::path& tmp) { save_pgm(result.frames[i], tmp); });
    atomic_write(dir / format_frame_name("flow", i, "txt"),
                 [&](const fs::path& tmp) { save_flow_txt(result.fields[i], tmp); });
  }
  atomic_write(dir / "truth.pgm", [&](const fs::path& tmp) { save_pgm(truth, tmp); });
  write_text(dir / "manifest.txt", render_manifest(cfg));
  std::cout << "simulate: wrote " << cfg.sim.frames << " frames to " << out_dir << "\n";
  return 0;
}

int cmd_stabilize(const std::vector<std::string>& patterns, const std::string& out_dir,
                  const CommonOpts& opts) {
  const RunConfig cfg = resolve_config(opts);
  cfg.reject_curvelet();
  const std::vector<fs::path> paths = expand_inputs(patterns);
  if (paths.size() < 2) throw std::runtime_error("stabilize: need at least 2 frames");

  FrameSequence frames;
  frames.reserve(paths.size());
  for (const fs::path& p : paths) frames.push_back(load_pgm(p));
  for (const Image& f : frames)
    if (!f.same_shape(frames.front()))
      throw std::runtime_error("stabilize: input frames have mixed sizes");

  const StabilizerReport report = stabilize(frames, cfg.stab);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  atomic_write(dir / "restored.pgm", [&](const fs::path& tmp) { save_pgm(report.u, tmp); });

  std::string csv = "outer,inner,fidelity,objective\n";
  char line[128];
  for (const TraceRow& row : report.trace) {
    std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g\n", row.outer, row.inner, row.fidelity,
                  row.objective);
    csv += line;
  }
  write_text(dir / "trace.csv", csv);
  write_text(dir / "manifest.txt", render_manifest(cfg));
  std::printf("stabilize: %zu frames, final fidelity %.6g, wrote %s\n", frames.size(),
              report.outer_fidelity.back(), (dir / "restored.pgm").c_str());
  return 0;
}

int cmd_denoise(const std::string& in_path, const std::string& out_path, const CommonOpts& opts) {
  const RunConfig cfg = resolve_config(opts);
  cfg.reject_curvelet();
  const Image input = load_pgm(in_path);
  // Standalone prox: mu = lambda/delta; without frames there is no N to
  // derive delta from, so an unset delta means delta = 1 here.
  const double delta = cfg.stab.delta > 0.0 ? cfg.stab.delta : 1.0;
  const Image output = prox(cfg.stab.regularizer, input, cfg.stab.lambda / delta);
  atomic_write(out_path, [&](const fs::path& tmp) { save_pgm(output, tmp); });
  std::cout << "denoise: wrote " << out_path << "\n";
  return 0;
}

int cmd_flow(const std::string& ref_path, const std::string& target_path,
             const std::string& out_path, const CommonOpts& opts) {
  const RunConfig cfg = resolve_config(opts);
  const Image ref = load_pgm(ref_path);
  const Image target = load_pgm(target_path);
  const FlowField flow = estimate_flow(ref, target, cfg.stab.flow);
  atomic_write(out_path, [&](const fs::path& tmp) { save_flow_txt(flow, tmp); });
  std::cout << "flow: wrote " << out_path << "\n";
  return 0;
}

int cmd_metrics(const std::string& a_path, const std::string& b_path,
                const std::vector<std::string>& est_patterns,
                const std::vector<std::string>& true_patterns) {
  const Image a = load_pgm(a_path);
  const Image b = load_pgm(b_path);
  MetricReport report;
  report.rmse = rmse(a, b);
  report.psnr = psnr(a, b);
  if (!est_patterns.empty() || !true_patterns.empty()) {
    if (est_patterns.empty() || true_patterns.empty())
      throw std::runtime_error("metrics: flow_epe needs both --est-flows and --true-flows");
    std::vector<FlowField> est, truth;
    for (const fs::path& p : expand_inputs(est_patterns)) est.push_back(load_flow_txt(p));
    for (const fs::path& p : expand_inputs(true_patterns)) truth.push_back(load_flow_txt(p));
    report.flow_epe = flow_epe(est, truth);
  }

  std::printf("rmse=%.6f\n", report.rmse);
  if (std::isinf(report.psnr))
    std::printf("psnr=inf\n");
  else
    std::printf("psnr=%.6f\n", report.psnr);
  if (report.flow_epe) std::printf("flow_epe=%.6f\n", *report.flow_epe);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atmospheric-turbulence stabilization toolkit"};
  app.set_version_flag("--version", std::string("turbstab ") + kVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  std::string truth_path, out_path, in_path, ref_path, target_path;
  std::vector<std::string> frame_patterns, est_flows, true_flows;

  CLI::App* sim = app.add_subcommand("simulate", "degrade a truth image into turbulent frames");
  sim->add_option("truth", truth_path, "ground-truth PGM")->required();
  sim->add_option("--out", out_path, "output directory")->required();
  add_common(sim, opts);

  CLI::App* stab = app.add_subcommand("stabilize", "reconstruct one image from frames");
  stab->add_option("frames", frame_patterns, "frame files or globs")->required();
  stab->add_option("--out", out_path, "output directory")->required();
  add_common(stab, opts);

  CLI::App* den = app.add_subcommand("denoise", "apply the configured regularizer prox once");
  den->add_option("input", in_path, "input PGM")->required();
  den->add_option("--out", out_path, "output PGM")->required();
  add_common(den, opts);

  CLI::App* flw = app.add_subcommand("flow", "estimate optical flow between two images");
  flw->add_option("reference", ref_path, "reference PGM")->required();
  flw->add_option("target", target_path, "target PGM")->required();
  flw->add_option("--out", out_path, "output FLO-TXT file")->required();
  add_common(flw, opts);

  CLI::App* met = app.add_subcommand("metrics", "compare two images (and optionally flows)");
  met->add_option("a", in_path, "first PGM")->required();
  met->add_option("b", ref_path, "second PGM")->required();
  met->add_option("--est-flows", est_flows, "estimated FLO-TXT files or globs");
  met->add_option("--true-flows", true_flows, "ground-truth FLO-TXT files or globs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(truth_path, out_path, opts);
    if (stab->parsed()) return cmd_stabilize(frame_patterns, out_path, opts);
    if (den->parsed()) return cmd_denoise(in_path, out_path, opts);
    if (flw->parsed()) return cmd_flow(ref_path, target_path, out_path, opts);
    if (met->parsed()) return cmd_metrics(in_path, ref_path, est_flows, true_flows);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
