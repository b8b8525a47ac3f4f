#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "turbstab/image.hpp"

namespace turbstab {

enum class io_errc {
  unsupported_magic,
  malformed_header,
  truncated_payload,
  write_failure,
};

class io_error : public std::runtime_error {
 public:
  io_error(io_errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  io_errc code() const { return code_; }

 private:
  io_errc code_;
};

/// Reads a binary PGM (P5, maxval 255 or 65535); intensities mapped to [0,1].
Image load_pgm(const std::filesystem::path& path);

/// Writes binary PGM: "P5\n<w> <h>\n<maxval>\n" then samples, big-endian for 65535.
/// Values clamped to [0,1] and quantized by round(v * maxval).
void save_pgm(const Image& image, const std::filesystem::path& path, int maxval = 255);

}  // namespace turbstab
