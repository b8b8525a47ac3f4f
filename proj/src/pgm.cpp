#include "turbstab/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace turbstab {

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF) return false;
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  return true;
}

long parse_header_int(std::istream& in, const char* field) {
  std::string tok;
  if (!next_token(in, tok))
    throw io_error(io_errc::malformed_header, std::string("pgm: missing ") + field);
  try {
    std::size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw io_error(io_errc::malformed_header, std::string("pgm: bad ") + field + " '" + tok + "'");
  }
}

}  // namespace

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(io_errc::malformed_header, "pgm: cannot open " + path.string());

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5')
    throw io_error(io_errc::unsupported_magic, "pgm: not a binary PGM (P5): " + path.string());

  const long w = parse_header_int(in, "width");
  const long h = parse_header_int(in, "height");
  const long maxval = parse_header_int(in, "maxval");
  if (w <= 0 || h <= 0)
    throw io_error(io_errc::malformed_header, "pgm: non-positive dimensions");
  if (maxval != 255 && maxval != 65535)
    throw io_error(io_errc::malformed_header, "pgm: maxval must be 255 or 65535, got " + std::to_string(maxval));
  // Exactly one whitespace byte separates the header from the payload; the
  // token reader has already consumed it.

  Image img(static_cast<int>(w), static_cast<int>(h));
  const std::size_t n = img.size();
  const double scale = 1.0 / static_cast<double>(maxval);
  if (maxval == 255) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      throw io_error(io_errc::truncated_payload, "pgm: truncated payload in " + path.string());
    for (std::size_t i = 0; i < n; ++i) img.data[i] = buf[i] * scale;
  } else {
    std::vector<unsigned char> buf(2 * n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n));
    if (static_cast<std::size_t>(in.gcount()) != 2 * n)
      throw io_error(io_errc::truncated_payload, "pgm: truncated payload in " + path.string());
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = (static_cast<unsigned>(buf[2 * i]) << 8) | buf[2 * i + 1];
      img.data[i] = v * scale;
    }
  }
  return img;
}

void save_pgm(const Image& image, const std::filesystem::path& path, int maxval) {
  if (maxval != 255 && maxval != 65535)
    throw std::invalid_argument("save_pgm: maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(io_errc::write_failure, "pgm: cannot open for write " + path.string());

  out << "P5\n" << image.width << ' ' << image.height << '\n' << maxval << '\n';
  const std::size_t n = image.size();
  if (maxval == 255) {
    std::vector<unsigned char> buf(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::clamp(image.data[i], 0.0, 1.0);
      buf[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n));
  } else {
    std::vector<unsigned char> buf(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::clamp(image.data[i], 0.0, 1.0);
      const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      buf[2 * i] = static_cast<unsigned char>(q >> 8);
      buf[2 * i + 1] = static_cast<unsigned char>(q & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(2 * n));
  }
  out.flush();
  if (!out) throw io_error(io_errc::write_failure, "pgm: write failed for " + path.string());
}

}  // namespace turbstab
