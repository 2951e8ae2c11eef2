#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fmcw::fft {

enum class Direction { Forward, Inverse };

/// Unnormalized DFT of `in`, zero-padded (or truncated) to `n` points.
/// Forward uses exp(-j2*pi*k*m/n). Thread-safe.
std::vector<std::complex<double>> transform(std::span<const std::complex<double>> in,
                                            std::size_t n, Direction dir);

/// In-place unnormalized DFT; `data.size()` points.
void transform_inplace(std::span<std::complex<double>> data, Direction dir);

/// Unitary DFT (scaled by 1/sqrt(n)).
std::vector<std::complex<double>> unitary(std::span<const std::complex<double>> in,
                                          std::size_t n, Direction dir);

/// Smallest size >= n of the form 2^a 3^b 5^c.
std::size_t good_size(std::size_t n);

}  // namespace fmcw::fft
