#pragma once

#include "dnls/lattice.hpp"

namespace dnls::fft {

// In-place unnormalized d-dimensional DFT over the stored (row-major) array.
// Forward uses exp(-2 pi i k n / M); backward uses the + sign and does not divide by M^d.
void forward(const BoxSpec& box, cplx* data);
void backward(const BoxSpec& box, cplx* data);

// Forward transform, pointwise multiplication by `symbol` (native frequency order), backward
// transform and 1/M^d normalization, all on `data` in place.
void apply_symbol(const BoxSpec& box, cplx* data, const cplx* symbol);

}  // namespace dnls::fft
