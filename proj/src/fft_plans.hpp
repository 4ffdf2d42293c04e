#pragma once

// FFTW plan cache. Plans are built with FFTW_ESTIMATE so the chosen algorithm,
// and therefore every rounding, is identical from run to run. Planning is
// serialized; execution through the new-array interface is thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>

#include "vnslab/spectral.hpp"

namespace vnslab::detail {

/// Unnormalized r2c: out[k] = sum_x in[x] exp(-2 i pi k x / n) on the half spectrum.
void fft_r2c(const Grid& grid, const double* in, Complex* out, int howmany = 1);
/// Unnormalized c2r (destroys `in`).
void fft_c2r(const Grid& grid, Complex* in, double* out, int howmany = 1);

}  // namespace vnslab::detail
