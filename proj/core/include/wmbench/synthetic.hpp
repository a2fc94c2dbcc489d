#pragma once

// Deterministic synthetic grayscale test images: a smooth gradient plus a
// seeded mixture of 2D sinusoids (amplitude falling with frequency) and mild
// value noise, mapped into a safe intensity band. Textured enough to behave
// like natural content for the block-based schemes, and fully reproducible
// from (width, height, seed).

#include <cstdint>

#include "wmbench/types.hpp"

namespace wmbench {

Work synthesize_image(int width, int height, uint64_t seed);

}  // namespace wmbench
