#pragma once

#include <string>

#include "prefdiff/denoiser.hpp"

namespace prefdiff {

// Versioned text checkpoint. Field order: a magic/version line, the model
// dimensions, then per parameter tensor its shape followed by row-major
// values printed with %.17g (lossless for doubles).
void save_checkpoint(const DenoiserNet& net, const std::string& path);
DenoiserNet load_checkpoint(const std::string& path);

}  // namespace prefdiff
