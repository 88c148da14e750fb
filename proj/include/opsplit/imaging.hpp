/* Grayscale images, plain PGM (P2) input/output and periodic blurring.
 *
 * Pixel values live in [0,1]; PGM output scales to 0..255.  A raw
 * float CSV format is provided for exact round trips.
 */
#pragma once

#include <iosfwd>
#include <string>

#include "opsplit/operators.hpp"
#include "opsplit/vector.hpp"

namespace opsplit {

struct Image {
    int width = 0;
    int height = 0;
    Vector pixels; // row-major, values in [0,1]

    double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

Image make_image(int width, int height, double fill = 0.0);

/// Plain (ASCII) PGM with maxval 255; values clamped to [0,1] then scaled.
void write_pgm(std::ostream& os, const Image& img);
void write_pgm_file(const std::string& path, const Image& img);

/// Reads plain P2; throws std::invalid_argument on malformed input.
Image read_pgm(std::istream& is);
Image read_pgm_file(const std::string& path);

/// Exact round-trip CSV: one row per image row, 17 significant digits.
void write_image_csv(std::ostream& os, const Image& img);
Image read_image_csv(std::istream& is, int width, int height);

/// Normalized 2-D Gaussian kernel (size x size, entries sum to 1).
std::vector<double> gaussian_kernel(int size, double stddev);

/// Periodic (circular) 2-D convolution with the given kernel on
/// width x height images; the adjoint convolves with the flipped kernel.
/// With a normalized kernel the operator norm is exactly 1.
LinearOperator periodic_convolution(int width, int height, std::vector<double> kernel,
                                    int kernel_size);

} // namespace opsplit
