#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace dmnls {

using cplx = std::complex<double>;

/// Periodic lattice on the centered box [-L/2, L/2)^d together with its dual
/// frequency lattice xi_k = 2*pi*k/L (standard FFT ordering).
///
/// Grids are immutable once built; fields hold them through a shared pointer
/// so that copies of a field are cheap and always agree on the discretization.
class Grid {
 public:
  int dimension() const { return dimension_; }
  int points_per_axis() const { return n_; }
  double box_length() const { return length_; }
  double spacing() const { return spacing_; }

  /// Total number of lattice points, n^d.
  std::size_t size() const { return size_; }
  /// Quadrature weight of one cell, spacing^d.
  double cell_volume() const { return cell_volume_; }
  /// Frequency-lattice cell, (2*pi/L)^d.
  double frequency_cell_volume() const;

  /// Per-axis coordinates, index 0 sits at -L/2.
  const std::vector<double>& coordinates() const { return coords_; }
  /// Per-axis angular frequencies in FFT order.
  const std::vector<double>& frequencies() const { return freqs_; }

  /// |xi|^2 at every point of the flattened (row-major) frequency lattice.
  const std::vector<double>& frequency_squared() const { return xi2_; }
  /// |x|^2 at every point of the flattened physical lattice.
  const std::vector<double>& radius_squared() const { return r2_; }

  /// Index along `axis` of flattened point `flat` (row-major, last axis fastest).
  int axis_index(std::size_t flat, int axis) const;

  bool operator==(const Grid& other) const {
    return dimension_ == other.dimension_ && n_ == other.n_ && length_ == other.length_;
  }

 private:
  friend std::shared_ptr<const Grid> make_grid(int, int, double);
  Grid(int dimension, int n, double length);

  int dimension_;
  int n_;
  double length_;
  double spacing_;
  std::size_t size_;
  double cell_volume_;
  std::vector<double> coords_;
  std::vector<double> freqs_;
  std::vector<double> xi2_;
  std::vector<double> r2_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a grid. Throws std::invalid_argument unless dimension is 1 or 2,
/// points_per_axis is a power of two >= 16, and box_length > 0.
GridPtr make_grid(int dimension, int points_per_axis, double box_length);

/// Raised when a field carries NaN or Inf entries.
class CorruptFieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One complex amplitude per grid point, row-major.
struct ComplexField {
  GridPtr grid;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(GridPtr g) : grid(std::move(g)), values(grid->size(), cplx{0.0, 0.0}) {}
  ComplexField(GridPtr g, std::vector<cplx> v);

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  bool is_finite() const;
  /// Throws CorruptFieldError naming `where` if any entry is non-finite.
  void require_finite(const char* where) const;

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(cplx s);
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);
ComplexField conj(ComplexField a);

/// Samples f(x) (1-D) or f(x, y) (2-D) on the lattice.
template <class F>
ComplexField sample(const GridPtr& grid, F&& f) {
  ComplexField out(grid);
  const auto& x = grid->coordinates();
  const int n = grid->points_per_axis();
  if constexpr (std::is_invocable_v<F&, double>) {
    if (grid->dimension() != 1) throw std::invalid_argument("sample: 1-D function on a 2-D grid");
    for (int i = 0; i < n; ++i) out[i] = f(x[i]);
  } else {
    if (grid->dimension() != 2) throw std::invalid_argument("sample: 2-D function on a 1-D grid");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = f(x[i], x[j]);
  }
  return out;
}

}  // namespace dmnls
