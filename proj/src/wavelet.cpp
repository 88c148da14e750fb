#include "opsplit/wavelet.hpp"

#include <algorithm>
#include <cmath>

namespace opsplit {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_dims(int width, int height, int stages, std::size_t n) {
    if (width <= 0 || height <= 0 || stages < 1)
        throw std::invalid_argument("haar2d: bad dimensions");
    const int div = 1 << stages;
    if (width % div != 0 || height % div != 0)
        throw std::invalid_argument("haar2d: dimensions must be divisible by 2^stages");
    if (n != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw std::invalid_argument("haar2d: data size does not match dimensions");
}

// One forward level on the leading `len` entries of a strided line.
void fwd_line(double* data, int len, int stride, std::vector<double>& tmp) {
    const int half = len / 2;
    for (int i = 0; i < half; ++i) {
        const double a = data[(2 * i) * stride];
        const double b = data[(2 * i + 1) * stride];
        tmp[static_cast<std::size_t>(i)] = (a + b) * kInvSqrt2;
        tmp[static_cast<std::size_t>(half + i)] = (a - b) * kInvSqrt2;
    }
    for (int i = 0; i < len; ++i) data[i * stride] = tmp[static_cast<std::size_t>(i)];
}

void inv_line(double* data, int len, int stride, std::vector<double>& tmp) {
    const int half = len / 2;
    for (int i = 0; i < half; ++i) {
        const double s = data[i * stride];
        const double d = data[(half + i) * stride];
        tmp[static_cast<std::size_t>(2 * i)] = (s + d) * kInvSqrt2;
        tmp[static_cast<std::size_t>(2 * i + 1)] = (s - d) * kInvSqrt2;
    }
    for (int i = 0; i < len; ++i) data[i * stride] = tmp[static_cast<std::size_t>(i)];
}

} // namespace

Vector haar2d_forward(const Vector& image, int width, int height, int stages) {
    check_dims(width, height, stages, image.size());
    Vector a = image;
    std::vector<double> tmp(static_cast<std::size_t>(std::max(width, height)));
    int w = width, h = height;
    for (int s = 0; s < stages; ++s) {
        for (int r = 0; r < h; ++r) fwd_line(&a[static_cast<std::size_t>(r) * width], w, 1, tmp);
        for (int c = 0; c < w; ++c) fwd_line(&a[static_cast<std::size_t>(c)], h, width, tmp);
        w /= 2;
        h /= 2;
    }
    return a;
}

Vector haar2d_inverse(const Vector& coeffs, int width, int height, int stages) {
    check_dims(width, height, stages, coeffs.size());
    Vector a = coeffs;
    std::vector<double> tmp(static_cast<std::size_t>(std::max(width, height)));
    for (int s = stages - 1; s >= 0; --s) {
        const int w = width >> s;
        const int h = height >> s;
        for (int c = 0; c < w; ++c) inv_line(&a[static_cast<std::size_t>(c)], h, width, tmp);
        for (int r = 0; r < h; ++r) inv_line(&a[static_cast<std::size_t>(r) * width], w, 1, tmp);
    }
    return a;
}

Vector haar_3stage(const Vector& image, int width, int height) {
    return haar2d_forward(image, width, height, 3);
}

Vector haar_3stage_inverse(const Vector& coeffs, int width, int height) {
    return haar2d_inverse(coeffs, width, height, 3);
}

LinearOperator haar_synthesis_operator(int width, int height, int stages) {
    check_dims(width, height, stages, static_cast<std::size_t>(width) * height);
    LinearOperator op;
    op.rows = op.cols = width * height;
    op.apply = [width, height, stages](const Vector& c) {
        return haar2d_inverse(c, width, height, stages);
    };
    op.apply_adjoint = [width, height, stages](const Vector& img) {
        return haar2d_forward(img, width, height, stages);
    };
    return op;
}

} // namespace opsplit
