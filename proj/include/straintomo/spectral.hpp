#pragma once

#include <span>
#include <vector>

#include "straintomo/grid.hpp"

namespace straintomo {

/// How a grid component is extended before the 2D FFT.
enum class FftPadding {
  periodic,   ///< transform the grid as-is; exact for periodic band-limited data
  zero_pad,   ///< embed in a 2x-per-axis zero canvas, then crop
};

enum class Axis { x1 = 1, x2 = 2 };

/// Spectral partial derivative of one scalar grid component.
///
/// The spectrum is multiplied by i*k, with k the angular wavenumber of the
/// (possibly padded) canvas and the Nyquist mode zeroed on even lengths.
std::vector<double> fourier_derivative(const Grid2& grid, std::span<const double> field,
                                       Axis axis,
                                       FftPadding padding = FftPadding::zero_pad);

}  // namespace straintomo
