#pragma once

#include <span>

#include "dmnls/grid.hpp"

namespace dmnls::fft {

// Unitary DFT pair (1/sqrt(N) on both directions), row-major for 2-D grids.
// Plans are cached process-wide; execution uses caller-owned buffers so
// concurrent transforms on distinct buffers are safe.

/// out = F[in]. `in` and `out` may alias.
void forward(const Grid& grid, std::span<const cplx> in, std::span<cplx> out);
/// out = F^{-1}[in]. `in` and `out` may alias.
void inverse(const Grid& grid, std::span<const cplx> in, std::span<cplx> out);

/// In-place convenience wrappers.
inline void forward(const Grid& grid, std::span<cplx> data) { forward(grid, data, data); }
inline void inverse(const Grid& grid, std::span<cplx> data) { inverse(grid, data, data); }

}  // namespace dmnls::fft
