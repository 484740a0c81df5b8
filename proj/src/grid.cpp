#include "dmnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dmnls {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid::Grid(int dimension, int n, double length)
    : dimension_(dimension),
      n_(n),
      length_(length),
      spacing_(length / n),
      size_(dimension == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n),
      cell_volume_(std::pow(length / n, dimension)) {
  coords_.resize(n);
  freqs_.resize(n);
  const double dk = 2.0 * std::numbers::pi / length;
  for (int i = 0; i < n; ++i) {
    coords_[i] = -0.5 * length + i * spacing_;
    const int k = i < n / 2 ? i : i - n;
    freqs_[i] = dk * k;
  }
  xi2_.resize(size_);
  r2_.resize(size_);
  if (dimension == 1) {
    for (int i = 0; i < n; ++i) {
      xi2_[i] = freqs_[i] * freqs_[i];
      r2_[i] = coords_[i] * coords_[i];
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const std::size_t f = static_cast<std::size_t>(i) * n + j;
        xi2_[f] = freqs_[i] * freqs_[i] + freqs_[j] * freqs_[j];
        r2_[f] = coords_[i] * coords_[i] + coords_[j] * coords_[j];
      }
  }
}

double Grid::frequency_cell_volume() const {
  return std::pow(2.0 * std::numbers::pi / length_, dimension_);
}

int Grid::axis_index(std::size_t flat, int axis) const {
  if (dimension_ == 1) return static_cast<int>(flat);
  return axis == 0 ? static_cast<int>(flat / n_) : static_cast<int>(flat % n_);
}

GridPtr make_grid(int dimension, int points_per_axis, double box_length) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("make_grid: dimension must be 1 or 2, got " + std::to_string(dimension));
  if (!is_power_of_two(points_per_axis) || points_per_axis < 16)
    throw std::invalid_argument("make_grid: points_per_axis must be a power of two >= 16, got " +
                                std::to_string(points_per_axis));
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw std::invalid_argument("make_grid: box_length must be positive");
  return GridPtr(new Grid(dimension, points_per_axis, box_length));
}

ComplexField::ComplexField(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size())
    throw std::invalid_argument("ComplexField: value count does not match grid size");
}

bool ComplexField::is_finite() const {
  for (const auto& z : values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

void ComplexField::require_finite(const char* where) const {
  if (!is_finite()) throw CorruptFieldError(std::string(where) + ": field contains non-finite values");
}

namespace {
void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (a.grid != b.grid && !(a.grid && b.grid && *a.grid == *b.grid))
    throw std::invalid_argument("field arithmetic across different grids");
}
}  // namespace

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (auto& z : values) z *= s;
  return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }

ComplexField conj(ComplexField a) {
  for (auto& z : a.values) z = std::conj(z);
  return a;
}

}  // namespace dmnls
