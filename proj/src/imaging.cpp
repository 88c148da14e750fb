#include "opsplit/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "opsplit/csv.hpp"

namespace opsplit {

Image make_image(int width, int height, double fill) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("make_image: bad dimensions");
    Image img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<std::size_t>(width) * height, fill);
    return img;
}

void write_pgm(std::ostream& os, const Image& img) {
    os << "P2\n" << img.width << " " << img.height << "\n255\n";
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double v = std::min(std::max(img.at(r, c), 0.0), 1.0);
            const int g = static_cast<int>(std::lround(v * 255.0));
            os << g << (c + 1 == img.width ? '\n' : ' ');
        }
    }
}

void write_pgm_file(const std::string& path, const Image& img) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_pgm_file: cannot open " + path);
    write_pgm(os, img);
}

namespace {

// Next whitespace-separated token, skipping '#' comments.
bool next_token(std::istream& is, std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = is.get()) != EOF) {
        if (ch == '#') {
            while ((ch = is.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return true;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return !tok.empty();
}

int parse_int(const std::string& tok, const char* what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("read_pgm: malformed ") + what + " '" + tok + "'");
    }
}

} // namespace

Image read_pgm(std::istream& is) {
    std::string tok;
    if (!next_token(is, tok) || tok != "P2")
        throw std::invalid_argument("read_pgm: not a plain PGM (P2) file");
    if (!next_token(is, tok)) throw std::invalid_argument("read_pgm: missing width");
    const int width = parse_int(tok, "width");
    if (!next_token(is, tok)) throw std::invalid_argument("read_pgm: missing height");
    const int height = parse_int(tok, "height");
    if (!next_token(is, tok)) throw std::invalid_argument("read_pgm: missing maxval");
    const int maxval = parse_int(tok, "maxval");
    if (width <= 0 || height <= 0 || maxval <= 0)
        throw std::invalid_argument("read_pgm: bad header values");
    Image img = make_image(width, height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        if (!next_token(is, tok)) throw std::invalid_argument("read_pgm: truncated pixel data");
        const int g = parse_int(tok, "pixel");
        if (g < 0 || g > maxval) throw std::invalid_argument("read_pgm: pixel out of range");
        img.pixels[i] = static_cast<double>(g) / maxval;
    }
    return img;
}

Image read_pgm_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("read_pgm_file: cannot open " + path);
    return read_pgm(is);
}

void write_image_csv(std::ostream& os, const Image& img) {
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            os << format_double(img.at(r, c));
            os << (c + 1 == img.width ? '\n' : ',');
        }
    }
}

Image read_image_csv(std::istream& is, int width, int height) {
    Image img = make_image(width, height);
    std::string line;
    for (int r = 0; r < height; ++r) {
        if (!std::getline(is, line)) throw std::invalid_argument("read_image_csv: truncated");
        std::stringstream ss(line);
        std::string cell;
        for (int c = 0; c < width; ++c) {
            if (!std::getline(ss, cell, ','))
                throw std::invalid_argument("read_image_csv: short row");
            img.at(r, c) = std::stod(cell);
        }
    }
    return img;
}

std::vector<double> gaussian_kernel(int size, double stddev) {
    if (size <= 0 || size % 2 == 0)
        throw std::invalid_argument("gaussian_kernel: size must be odd and positive");
    if (!(stddev > 0.0)) throw std::invalid_argument("gaussian_kernel: stddev must be positive");
    std::vector<double> k(static_cast<std::size_t>(size) * size);
    const int half = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const double di = i - half, dj = j - half;
            const double v = std::exp(-(di * di + dj * dj) / (2.0 * stddev * stddev));
            k[static_cast<std::size_t>(i) * size + j] = v;
            sum += v;
        }
    }
    for (auto& v : k) v /= sum;
    return k;
}

LinearOperator periodic_convolution(int width, int height, std::vector<double> kernel,
                                    int kernel_size) {
    if (kernel_size <= 0 || kernel_size % 2 == 0)
        throw std::invalid_argument("periodic_convolution: kernel size must be odd");
    if (kernel.size() != static_cast<std::size_t>(kernel_size) * kernel_size)
        throw std::invalid_argument("periodic_convolution: kernel data size mismatch");
    const int half = kernel_size / 2;
    auto k = std::make_shared<std::vector<double>>(std::move(kernel));

    auto convolve = [width, height, half, kernel_size, k](const Vector& x, bool flipped) {
        if (x.size() != static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("periodic_convolution: input size mismatch");
        Vector y(x.size(), 0.0);
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                double s = 0.0;
                for (int di = -half; di <= half; ++di) {
                    const int rr = ((r + di) % height + height) % height;
                    for (int dj = -half; dj <= half; ++dj) {
                        const int cc = ((c + dj) % width + width) % width;
                        const double kv = flipped
                            ? (*k)[static_cast<std::size_t>(half - di) * kernel_size + (half - dj)]
                            : (*k)[static_cast<std::size_t>(half + di) * kernel_size + (half + dj)];
                        s += kv * x[static_cast<std::size_t>(rr) * width + cc];
                    }
                }
                y[static_cast<std::size_t>(r) * width + c] = s;
            }
        }
        return y;
    };

    LinearOperator op;
    op.rows = op.cols = width * height;
    op.apply = [convolve](const Vector& x) { return convolve(x, false); };
    op.apply_adjoint = [convolve](const Vector& x) { return convolve(x, true); };
    return op;
}

} // namespace opsplit
