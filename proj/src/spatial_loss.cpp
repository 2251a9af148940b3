#include "dualnav/spatial_loss.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "dualnav/kernels.hpp"

namespace dualnav {

TokenMatrix::TokenMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
  if (rows < 0 || cols < 0) throw ShapeMismatch("matrix dimensions must be non-negative");
}

TokenMatrix::TokenMatrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows < 0 || cols < 0 ||
      data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ShapeMismatch(fmt::format("{} values do not fill a {}x{} matrix", data_.size(), rows, cols));
  }
}

TokenMatrix operator+(const TokenMatrix& a, const TokenMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch(fmt::format("cannot add {}x{} and {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
  }
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return TokenMatrix(a.rows(), a.cols(), std::move(out));
}

void write_matrix(std::ostream& out, const TokenMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << fmt::format("{:.17g}", m(r, c));
    }
    out << '\n';
  }
}

TokenMatrix read_matrix(std::istream& in) {
  int rows = 0;
  int cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) throw Error("matrix header must be 'rows cols'");
  std::vector<double> values(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(in >> values[i])) throw Error(fmt::format("matrix truncated after {} values", i));
  }
  return TokenMatrix(rows, cols, std::move(values));
}

namespace {

void check_shapes(const TokenMatrix& v, const TokenMatrix& s, const TokenMatrix& p) {
  if (v.rows() != s.rows() || v.cols() != s.cols() || v.rows() != p.rows() || v.cols() != p.cols()) {
    throw ShapeMismatch(fmt::format("V {}x{}, S {}x{}, P {}x{} must share a shape", v.rows(), v.cols(),
                                    s.rows(), s.cols(), p.rows(), p.cols()));
  }
  if (v.rows() < 1 || v.cols() < 1) throw ShapeMismatch("token matrices need N >= 1 and D >= 1");
}

struct RowTerms {
  double cosine;
  double norm_v;
  double norm_u;
};

RowTerms row_terms(std::span<const double> v, std::span<const double> u, int t) {
  const auto& k = kernels::active();
  const double nv2 = k.squared_norm(v.data(), v.size());
  const double nu2 = k.squared_norm(u.data(), u.size());
  if (nv2 == 0.0) throw ZeroNormRow(fmt::format("row {} of V has zero norm", t));
  if (nu2 == 0.0) throw ZeroNormRow(fmt::format("row {} of S + P has zero norm", t));
  // sqrt of the product keeps cos(x, x) exactly 1.
  const double cosine = k.dot(v.data(), u.data(), v.size()) / std::sqrt(nv2 * nu2);
  return {std::clamp(cosine, -1.0, 1.0), std::sqrt(nv2), std::sqrt(nu2)};
}

}  // namespace

LossBreakdown se_loss(const TokenMatrix& v, const TokenMatrix& s, const TokenMatrix& p,
                      double alpha, double action_loss) {
  check_shapes(v, s, p);
  const TokenMatrix u = s + p;
  double sum = 0.0;
  for (int t = 0; t < v.rows(); ++t) {
    const RowTerms rt = row_terms(v.row(t), u.row(t), t);
    sum += 1.0 - rt.cosine;
  }
  LossBreakdown out;
  out.alpha = alpha;
  out.action_term = action_loss;
  out.alignment_term = sum / v.rows();
  out.total = action_loss + alpha * out.alignment_term;
  return out;
}

TokenMatrix se_loss_grad(const TokenMatrix& v, const TokenMatrix& s, const TokenMatrix& p,
                         double alpha) {
  check_shapes(v, s, p);
  const TokenMatrix u = s + p;
  TokenMatrix grad(v.rows(), v.cols());
  const double scale = alpha / v.rows();
  for (int t = 0; t < v.rows(); ++t) {
    const RowTerms rt = row_terms(v.row(t), u.row(t), t);
    const double a = 1.0 / (rt.norm_v * rt.norm_u);
    const double b = rt.cosine / (rt.norm_v * rt.norm_v);
    auto vr = v.row(t);
    auto ur = u.row(t);
    auto gr = grad.row(t);
    for (int c = 0; c < v.cols(); ++c) {
      gr[static_cast<std::size_t>(c)] =
          -scale * (ur[static_cast<std::size_t>(c)] * a - b * vr[static_cast<std::size_t>(c)]);
    }
  }
  return grad;
}

TokenMatrix sinusoidal_pos(int frames, int dims) {
  if (frames < 1 || dims < 1) throw ShapeMismatch("positional encoding needs N >= 1 and D >= 1");
  if (dims % 2 != 0) throw ShapeMismatch(fmt::format("positional encoding needs even D, got {}", dims));
  TokenMatrix p(frames, dims);
  for (int i = 0; i < dims / 2; ++i) {
    const double freq = std::pow(10000.0, -2.0 * i / dims);
    for (int t = 0; t < frames; ++t) {
      p(t, 2 * i) = std::sin(t * freq);
      p(t, 2 * i + 1) = std::cos(t * freq);
    }
  }
  return p;
}

std::size_t PassageMask::population() const noexcept {
  std::size_t n = 0;
  for (auto v : values) n += v;
  return n;
}

namespace {

bool inside_even_odd(const std::vector<Point>& poly, double x, double y) noexcept {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > y) != (b.y > y)) {
      const double xc = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x < xc) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

PassageMask passage_mask_encode(std::span<const PassageRegion> regions, int height, int width) {
  if (height < 1 || width < 1) throw Error("mask dimensions must be positive");
  PassageMask mask{height, width, std::vector<std::uint8_t>(static_cast<std::size_t>(height * width), 0)};
  for (std::size_t k = 0; k < regions.size(); ++k) {
    if (const auto* rect = std::get_if<PixelRect>(&regions[k])) {
      if (rect->x0 < 0 || rect->y0 < 0 || rect->x1 > width || rect->y1 > height ||
          rect->x0 > rect->x1 || rect->y0 > rect->y1) {
        throw Error(fmt::format("region {} is outside the {}x{} image", k, width, height));
      }
      for (int y = rect->y0; y < rect->y1; ++y) {
        for (int x = rect->x0; x < rect->x1; ++x) mask.values[static_cast<std::size_t>(y * width + x)] = 1;
      }
    } else {
      const auto& poly = std::get<PixelPolygon>(regions[k]).vertices;
      if (poly.size() < 3) throw Error(fmt::format("region {} needs at least 3 vertices", k));
      for (const Point& pt : poly) {
        if (pt.x < 0 || pt.y < 0 || pt.x > width || pt.y > height) {
          throw Error(fmt::format("region {} is outside the {}x{} image", k, width, height));
        }
      }
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          if (inside_even_odd(poly, x + 0.5, y + 0.5)) mask.values[static_cast<std::size_t>(y * width + x)] = 1;
        }
      }
    }
  }
  return mask;
}

std::vector<PassageRegion> mask_support_regions(const PassageMask& mask) {
  std::vector<PassageRegion> out;
  for (int y = 0; y < mask.height; ++y) {
    int x = 0;
    while (x < mask.width) {
      if (!mask.at(x, y)) {
        ++x;
        continue;
      }
      const int start = x;
      while (x < mask.width && mask.at(x, y)) ++x;
      out.push_back(PixelRect{start, y, x, y + 1});
    }
  }
  return out;
}

}  // namespace dualnav
