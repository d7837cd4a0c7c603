#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace fracgs {

/// Periodic collocation grid on [-L/2, L/2).
///
/// Nodes are x_j = -L/2 + j h with h = L/N. Frequencies follow FFT order:
/// index k < N/2 maps to 2 pi k / L, the rest to 2 pi (k - N) / L, so the
/// frequency set is {-N/2, ..., N/2 - 1} * 2 pi / L. Node j mirrors to node
/// (N - j) mod N; nodes 0 and N/2 (x = 0) are their own mirrors.
class Grid {
 public:
  /// Throws ConfigError unless L > 0 and N is a power of two >= 8.
  Grid(double length, std::size_t points);

  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return points_; }
  double spacing() const noexcept { return length_ / static_cast<double>(points_); }

  double node(std::size_t j) const noexcept;
  double frequency(std::size_t k) const noexcept;
  /// |xi_k| for k = 0..N/2, the moduli that appear in a real transform.
  double abs_frequency(std::size_t k) const noexcept;
  std::size_t mirror(std::size_t j) const noexcept { return (points_ - j) % points_; }
  /// Index of the node x = 0.
  std::size_t center() const noexcept { return points_ / 2; }

  std::vector<double> nodes() const;
  std::vector<double> frequencies() const;

  bool operator==(const Grid& other) const noexcept = default;

 private:
  double length_;
  std::size_t points_;
};

Grid make_grid(double length, std::size_t points);

/// Default resolution for a fractional order: heavier tails for small s need
/// a longer box.
Grid default_grid(double s);

enum class Parity { none, even, odd };

std::string_view to_string(Parity p) noexcept;

/// Real samples on a Grid, optionally tagged with a parity about x = 0.
class Field {
 public:
  Field(Grid grid, std::vector<double> values, Parity parity = Parity::none);
  explicit Field(Grid grid, Parity parity = Parity::none);

  static Field sample(const Grid& grid, const std::function<double(double)>& fn,
                      Parity parity = Parity::none);

  const Grid& grid() const noexcept { return grid_; }
  Parity parity() const noexcept { return parity_; }
  void set_parity(Parity p) noexcept { parity_ = p; }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& operator[](std::size_t j) noexcept { return values_[j]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double max_abs() const noexcept;

  /// Largest |f(x_j) - f(-x_j)| (even) or |f(x_j) + f(-x_j)| (odd) over
  /// mirrored node pairs, relative to max|f|.
  double parity_defect(Parity p) const noexcept;
  /// Replace values by their even or odd part.
  void symmetrize(Parity p);

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);

 private:
  Grid grid_;
  std::vector<double> values_;
  Parity parity_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);

/// Subsample onto a coarser grid with the same length; N must divide evenly.
Field restrict_field(const Field& f, std::size_t points);

/// Tolerance used for Field parity tags.
inline constexpr double kParityTolerance = 1e-10;

}  // namespace fracgs
