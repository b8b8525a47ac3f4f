#pragma once

#include <filesystem>

#include "turbstab/image.hpp"

namespace turbstab {

/// FLO-TXT: header "FLO-TXT <w> <h>", then w*h lines "dx dy" row-major.
/// Values printed with enough digits to round-trip doubles exactly.
void save_flow_txt(const FlowField& flow, const std::filesystem::path& path);
FlowField load_flow_txt(const std::filesystem::path& path);

}  // namespace turbstab
