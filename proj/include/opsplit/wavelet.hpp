/* Orthonormal 2-D Haar wavelet transform.
 *
 * Multiresolution layout: each stage transforms the current low-pass
 * (top-left) block, so after s stages the top-left (w/2^s, h/2^s) block
 * holds approximation coefficients.  The transform is orthonormal, hence
 * its inverse is its adjoint and norms are preserved.
 */
#pragma once

#include "opsplit/operators.hpp"
#include "opsplit/vector.hpp"

namespace opsplit {

/// Forward transform of a row-major width x height image, `stages` levels.
/// Dimensions must be divisible by 2^stages.
Vector haar2d_forward(const Vector& image, int width, int height, int stages);

/// Inverse (synthesis) transform.
Vector haar2d_inverse(const Vector& coeffs, int width, int height, int stages);

/// Three-stage convenience wrappers used by the deblurring experiment.
Vector haar_3stage(const Vector& image, int width, int height);
Vector haar_3stage_inverse(const Vector& coeffs, int width, int height);

/// The synthesis map W (coefficients -> image) as a linear operator; its
/// adjoint is the forward transform.
LinearOperator haar_synthesis_operator(int width, int height, int stages);

} // namespace opsplit
