#include "turbstab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "turbstab/version.hpp"

namespace turbstab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  std::from_chars_result r{};
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars<double> is available, but stod keeps exponent handling simple.
    try {
      std::size_t pos = 0;
      out = static_cast<T>(std::stod(std::string(value), &pos));
      r.ptr = first + pos;
      r.ec = std::errc{};
    } catch (const std::exception&) {
      r.ec = std::errc::invalid_argument;
    }
  } else {
    r = std::from_chars(first, last, out);
  }
  if (r.ec != std::errc{} || r.ptr != last)
    throw config_error("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  return out;
}

}  // namespace

void RunConfig::reject_curvelet() const {
  if (curvelet_requested)
    throw config_error(
        "regularizer=curvelet is not implemented; provide a curvelet analysis/synthesis pair "
        "satisfying W^T W = I behind the frame regularizer interface "
        "(frame_analysis/frame_synthesis) to add it");
}

void apply_config_key(RunConfig& cfg, std::string_view key, std::string_view value) {
  const std::string k(trim(key));
  const std::string v(trim(value));
  if (k == "sim.frames") cfg.sim.frames = parse_number<int>(k, v);
  else if (k == "sim.amplitude") cfg.sim.deform_amplitude = parse_number<double>(k, v);
  else if (k == "sim.correlation_length") cfg.sim.correlation_length = parse_number<double>(k, v);
  else if (k == "sim.blur_sigma") cfg.sim.blur_sigma = parse_number<double>(k, v);
  else if (k == "sim.noise_sigma") cfg.sim.noise_sigma = parse_number<double>(k, v);
  else if (k == "seed") cfg.sim.seed = parse_number<std::uint64_t>(k, v);
  else if (k == "threads") cfg.stab.threads = parse_number<int>(k, v);
  else if (k == "stab.delta") cfg.stab.delta = parse_number<double>(k, v);
  else if (k == "stab.lambda") cfg.stab.lambda = parse_number<double>(k, v);
  else if (k == "stab.outer_iterations") cfg.stab.outer_iterations = parse_number<int>(k, v);
  else if (k == "stab.inner_iterations") cfg.stab.inner_iterations = parse_number<int>(k, v);
  else if (k == "stab.fidelity_tolerance") cfg.stab.fidelity_tolerance = parse_number<double>(k, v);
  else if (k == "flow.window_radius") cfg.stab.flow.window_radius = parse_number<int>(k, v);
  else if (k == "flow.pyramid_levels") cfg.stab.flow.pyramid_levels = parse_number<int>(k, v);
  else if (k == "flow.iterations_per_level") cfg.stab.flow.iterations_per_level = parse_number<int>(k, v);
  else if (k == "flow.min_eigen_threshold") cfg.stab.flow.min_eigen_threshold = parse_number<double>(k, v);
  else if (k == "regularizer") {
    cfg.curvelet_requested = false;
    if (v == "tv") cfg.stab.regularizer.kind = RegKind::tv;
    else if (v == "nltv") cfg.stab.regularizer.kind = RegKind::nltv;
    else if (v == "frame") cfg.stab.regularizer.kind = RegKind::frame;
    else if (v == "curvelet") cfg.curvelet_requested = true;
    else throw config_error("bad value for regularizer: '" + v + "' (tv|nltv|frame|curvelet)");
  }
  else if (k == "tv.inner_iterations") cfg.stab.regularizer.tv.inner_iterations = parse_number<int>(k, v);
  else if (k == "tv.rho") cfg.stab.regularizer.tv.bregman_penalty = parse_number<double>(k, v);
  else if (k == "nltv.patch_radius") cfg.stab.regularizer.nltv.patch_radius = parse_number<int>(k, v);
  else if (k == "nltv.search_radius") cfg.stab.regularizer.nltv.search_radius = parse_number<int>(k, v);
  else if (k == "nltv.similarity_scale") cfg.stab.regularizer.nltv.similarity_scale = parse_number<double>(k, v);
  else if (k == "nltv.neighbors") cfg.stab.regularizer.nltv.neighbors_kept = parse_number<int>(k, v);
  else if (k == "nltv.inner_iterations") cfg.stab.regularizer.nltv.inner_iterations = parse_number<int>(k, v);
  else if (k == "nltv.rho") cfg.stab.regularizer.nltv.bregman_penalty = parse_number<double>(k, v);
  else if (k == "frame.levels") cfg.stab.regularizer.frame.levels = parse_number<int>(k, v);
  else if (k == "frame.inner_iterations") cfg.stab.regularizer.frame.inner_iterations = parse_number<int>(k, v);
  else if (k == "frame.rho") cfg.stab.regularizer.frame.bregman_penalty = parse_number<double>(k, v);
  else throw config_error("unknown key '" + k + "'");
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw config_error("line " + std::to_string(line_no) + ": expected key=value");
    try {
      apply_config_key(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const config_error& e) {
      throw config_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

std::string render_manifest(const RunConfig& cfg) {
  std::ostringstream out;
  char num[40];
  auto fp = [&num](double v) {
    std::snprintf(num, sizeof(num), "%.17g", v);
    return std::string(num);
  };
  out << "# turbstab " << kVersion << "\n";
  out << "seed=" << cfg.sim.seed << "\n";
  out << "threads=" << cfg.stab.threads << "\n";
  out << "sim.frames=" << cfg.sim.frames << "\n";
  out << "sim.amplitude=" << fp(cfg.sim.deform_amplitude) << "\n";
  out << "sim.correlation_length=" << fp(cfg.sim.correlation_length) << "\n";
  out << "sim.blur_sigma=" << fp(cfg.sim.blur_sigma) << "\n";
  out << "sim.noise_sigma=" << fp(cfg.sim.noise_sigma) << "\n";
  out << "stab.delta=" << fp(cfg.stab.delta) << "\n";
  out << "stab.lambda=" << fp(cfg.stab.lambda) << "\n";
  out << "stab.outer_iterations=" << cfg.stab.outer_iterations << "\n";
  out << "stab.inner_iterations=" << cfg.stab.inner_iterations << "\n";
  out << "stab.fidelity_tolerance=" << fp(cfg.stab.fidelity_tolerance) << "\n";
  out << "flow.window_radius=" << cfg.stab.flow.window_radius << "\n";
  out << "flow.pyramid_levels=" << cfg.stab.flow.pyramid_levels << "\n";
  out << "flow.iterations_per_level=" << cfg.stab.flow.iterations_per_level << "\n";
  out << "flow.min_eigen_threshold=" << fp(cfg.stab.flow.min_eigen_threshold) << "\n";
  const char* reg = "tv";
  if (cfg.curvelet_requested) reg = "curvelet";
  else if (cfg.stab.regularizer.kind == RegKind::nltv) reg = "nltv";
  else if (cfg.stab.regularizer.kind == RegKind::frame) reg = "frame";
  out << "regularizer=" << reg << "\n";
  out << "tv.inner_iterations=" << cfg.stab.regularizer.tv.inner_iterations << "\n";
  out << "tv.rho=" << fp(cfg.stab.regularizer.tv.bregman_penalty) << "\n";
  out << "nltv.patch_radius=" << cfg.stab.regularizer.nltv.patch_radius << "\n";
  out << "nltv.search_radius=" << cfg.stab.regularizer.nltv.search_radius << "\n";
  out << "nltv.similarity_scale=" << fp(cfg.stab.regularizer.nltv.similarity_scale) << "\n";
  out << "nltv.neighbors=" << cfg.stab.regularizer.nltv.neighbors_kept << "\n";
  out << "nltv.inner_iterations=" << cfg.stab.regularizer.nltv.inner_iterations << "\n";
  out << "nltv.rho=" << fp(cfg.stab.regularizer.nltv.bregman_penalty) << "\n";
  out << "frame.levels=" << cfg.stab.regularizer.frame.levels << "\n";
  out << "frame.inner_iterations=" << cfg.stab.regularizer.frame.inner_iterations << "\n";
  out << "frame.rho=" << fp(cfg.stab.regularizer.frame.bregman_penalty) << "\n";
  return out.str();
}

}  // namespace turbstab
