#pragma once

#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "dualnav/world.hpp"

namespace dualnav {

// Row-major N x D real matrix (frames x feature dims).
class TokenMatrix {
 public:
  TokenMatrix() = default;
  TokenMatrix(int rows, int cols, double fill = 0.0);
  TokenMatrix(int rows, int cols, std::vector<double> values);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double& operator()(int r, int c) noexcept { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  double operator()(int r, int c) const noexcept { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  std::span<const double> row(int r) const noexcept {
    return {data_.data() + static_cast<std::ptrdiff_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<double> row(int r) noexcept {
    return {data_.data() + static_cast<std::ptrdiff_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }
  const std::vector<double>& values() const noexcept { return data_; }

  friend bool operator==(const TokenMatrix&, const TokenMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

TokenMatrix operator+(const TokenMatrix& a, const TokenMatrix& b);

// Text tensor format: "rows cols" on the first line, then one line per row.
void write_matrix(std::ostream& out, const TokenMatrix& m);
TokenMatrix read_matrix(std::istream& in);

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroNormRow : public Error {
 public:
  using Error::Error;
};

struct LossBreakdown {
  double total = 0.0;
  double action_term = 0.0;
  double alignment_term = 0.0;
  double alpha = 0.0;
};

// total = action + alpha * mean_t [1 - cos(V_t, S_t + P_t)], cosine taken
// per row over the feature dimension.
LossBreakdown se_loss(const TokenMatrix& v, const TokenMatrix& s, const TokenMatrix& p,
                      double alpha, double action_loss);

// Gradient of the alignment part of se_loss with respect to V.
TokenMatrix se_loss_grad(const TokenMatrix& v, const TokenMatrix& s, const TokenMatrix& p,
                         double alpha);

// P[t, 2i] = sin(t / 10000^(2i/D)), P[t, 2i+1] = cos(same). D must be even.
TokenMatrix sinusoidal_pos(int frames, int dims);

struct PixelRect {
  int x0 = 0;  // half-open: x0 <= x < x1
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
};

// Vertices in pixel coordinates; pixel (x, y) is inside when its center
// (x + 0.5, y + 0.5) is inside under the even-odd rule.
struct PixelPolygon {
  std::vector<Point> vertices;
};

using PassageRegion = std::variant<PixelRect, PixelPolygon>;

struct PassageMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> values;  // row-major, 0 or 1

  std::uint8_t at(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y * width + x)];
  }
  std::size_t population() const noexcept;
  friend bool operator==(const PassageMask&, const PassageMask&) = default;
};

PassageMask passage_mask_encode(std::span<const PassageRegion> regions, int height, int width);

// Row runs of the mask support, as rectangles; re-encoding them reproduces
// the mask.
std::vector<PassageRegion> mask_support_regions(const PassageMask& mask);

}  // namespace dualnav
