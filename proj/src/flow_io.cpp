#include "turbstab/flow_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "turbstab/pgm.hpp"

namespace turbstab {

void save_flow_txt(const FlowField& flow, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error(io_errc::write_failure, "flow: cannot open for write " + path.string());
  out << "FLO-TXT " << flow.width << ' ' << flow.height << '\n';
  char line[80];
  for (std::size_t i = 0; i < flow.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g %.17g\n", flow.dx[i], flow.dy[i]);
    out << line;
  }
  out.flush();
  if (!out) throw io_error(io_errc::write_failure, "flow: write failed for " + path.string());
}

FlowField load_flow_txt(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error(io_errc::malformed_header, "flow: cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0;
  if (!(in >> magic >> w >> h) || magic != "FLO-TXT" || w <= 0 || h <= 0)
    throw io_error(io_errc::malformed_header, "flow: bad FLO-TXT header in " + path.string());
  FlowField flow(w, h);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (!(in >> flow.dx[i] >> flow.dy[i]))
      throw io_error(io_errc::truncated_payload, "flow: truncated FLO-TXT payload in " + path.string());
  }
  return flow;
}

}  // namespace turbstab
