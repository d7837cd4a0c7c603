#include "fracgs/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracgs/errors.hpp"

namespace fracgs {

Grid::Grid(double length, std::size_t points) : length_(length), points_(points) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    std::ostringstream os;
    os << "grid length must be positive and finite, got " << length;
    throw ConfigError(os.str());
  }
  if (points < 8 || !std::has_single_bit(points)) {
    std::ostringstream os;
    os << "grid size must be a power of two >= 8, got " << points;
    throw ConfigError(os.str());
  }
}

double Grid::node(std::size_t j) const noexcept {
  return -0.5 * length_ + static_cast<double>(j) * spacing();
}

double Grid::frequency(std::size_t k) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(points_);
  auto kk = static_cast<std::ptrdiff_t>(k);
  if (kk >= n / 2) kk -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(kk) / length_;
}

double Grid::abs_frequency(std::size_t k) const noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / length_;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(points_);
  for (std::size_t j = 0; j < points_; ++j) x[j] = node(j);
  return x;
}

std::vector<double> Grid::frequencies() const {
  std::vector<double> xi(points_);
  for (std::size_t k = 0; k < points_; ++k) xi[k] = frequency(k);
  return xi;
}

Grid make_grid(double length, std::size_t points) { return Grid(length, points); }

Grid default_grid(double s) {
  if (s < 0.4) return Grid(1024.0, std::size_t{1} << 15);
  return Grid(256.0, 8192);
}

std::string_view to_string(Parity p) noexcept {
  switch (p) {
    case Parity::even:
      return "even";
    case Parity::odd:
      return "odd";
    case Parity::none:
      break;
  }
  return "none";
}

Field::Field(Grid grid, std::vector<double> values, Parity parity)
    : grid_(grid), values_(std::move(values)), parity_(parity) {
  if (values_.size() != grid_.size()) {
    throw ConfigError("field size does not match its grid");
  }
}

Field::Field(Grid grid, Parity parity)
    : grid_(grid), values_(grid.size(), 0.0), parity_(parity) {}

Field Field::sample(const Grid& grid, const std::function<double(double)>& fn,
                    Parity parity) {
  Field f(grid, parity);
  for (std::size_t j = 0; j < grid.size(); ++j) f.values_[j] = fn(grid.node(j));
  // x_0 = -L/2 has no mirror partner inside the box; force the tag exactly.
  if (parity == Parity::odd) {
    f.values_[0] = 0.0;
    f.values_[grid.center()] = 0.0;
  }
  return f;
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::parity_defect(Parity p) const noexcept {
  if (p == Parity::none) return 0.0;
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  const double sign = p == Parity::even ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    worst = std::max(worst, std::abs(values_[j] - sign * values_[grid_.mirror(j)]));
  }
  return worst / scale;
}

void Field::symmetrize(Parity p) {
  if (p == Parity::none) return;
  const double sign = p == Parity::even ? 1.0 : -1.0;
  std::vector<double> out(values_.size());
  for (std::size_t j = 0; j < values_.size(); ++j) {
    out[j] = 0.5 * (values_[j] + sign * values_[grid_.mirror(j)]);
  }
  values_ = std::move(out);
  parity_ = p;
}

Field& Field::operator+=(const Field& o) {
  if (!(o.grid_ == grid_)) throw ConfigError("field grids differ");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
  if (parity_ != o.parity_) parity_ = Parity::none;
  return *this;
}

Field& Field::operator-=(const Field& o) {
  if (!(o.grid_ == grid_)) throw ConfigError("field grids differ");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
  if (parity_ != o.parity_) parity_ = Parity::none;
  return *this;
}

Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }

Field restrict_field(const Field& f, std::size_t points) {
  const Grid& g = f.grid();
  if (points > g.size() || g.size() % points != 0) {
    throw ConfigError("restriction target must divide the source grid size");
  }
  const std::size_t stride = g.size() / points;
  Grid coarse(g.length(), points);
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) v[i] = f[i * stride];
  return Field(coarse, std::move(v), f.parity());
}

}  // namespace fracgs
