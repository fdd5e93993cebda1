#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "slipconvect/config.hpp"

namespace slipconvect {

using Complex = std::complex<double>;

/// Discretization of the periodic channel [0, gamma) x [0, 1].
///
/// x1 is Fourier-collocated on n1 points; only the nonnegative modes
/// k = 0..n1/2 are stored, the negative ones being their conjugates.
/// x2 is a uniform grid of n2 + 1 points including both walls.
struct Grid {
  int n1 = 64;
  int n2 = 64;
  double gamma = 2.0;
  bool dealias = true;

  Grid() = default;
  Grid(int n1_, int n2_, double gamma_, bool dealias_ = true);
  Grid(const GridSpec& spec, double gamma_);

  int modes() const { return n1 / 2 + 1; }
  int points() const { return n2 + 1; }
  double h1() const { return gamma / n1; }
  double h2() const { return 1.0 / n2; }
  double x1(int i) const { return i * h1(); }
  double x2(int j) const { return j * h2(); }
  /// k' = 2 pi k / gamma.
  double wavenumber(int k) const;
  /// Highest retained mode under the 2/3 rule (n1/3, floored).
  int dealias_cutoff() const { return n1 / 3; }
  /// Trapezoid weight of point j in x2.
  double weight(int j) const { return (j == 0 || j == n2) ? 0.5 * h2() : h2(); }

  bool operator==(const Grid& o) const {
    return n1 == o.n1 && n2 == o.n2 && gamma == o.gamma && dealias == o.dealias;
  }
};

enum class Wall { bottom, top };

/// Mixed Fourier(x1) / grid(x2) scalar field; storage is mode-major so each
/// mode's x2 column is contiguous.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g);

  const Grid& grid() const { return grid_; }
  Complex& operator()(int k, int j) { return data_[k * grid_.points() + j]; }
  const Complex& operator()(int k, int j) const { return data_[k * grid_.points() + j]; }
  std::span<Complex> mode(int k) {
    return {data_.data() + k * grid_.points(), static_cast<std::size_t>(grid_.points())};
  }
  std::span<const Complex> mode(int k) const {
    return {data_.data() + k * grid_.points(), static_cast<std::size_t>(grid_.points())};
  }
  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& operator*=(Complex s);

 private:
  Grid grid_;
  std::vector<Complex> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Collocation values, index (i, j) with i along x1.
class PhysicalField {
 public:
  PhysicalField() = default;
  explicit PhysicalField(const Grid& g);

  const Grid& grid() const { return grid_; }
  double& operator()(int i, int j) { return data_[i * grid_.points() + j]; }
  double operator()(int i, int j) const { return data_[i * grid_.points() + j]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  Grid grid_;
  std::vector<double> data_;
};

/// Batched real FFTs along x1 for every x2 row. Owns FFTW plans and scratch
/// buffers, so one instance must not be used from two threads at once.
class Transform {
 public:
  explicit Transform(const Grid& g);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  const Grid& grid() const { return grid_; }
  PhysicalField to_physical(const ScalarField& f);
  ScalarField to_spectral(const PhysicalField& f);

 private:
  struct Plans;
  Grid grid_;
  std::unique_ptr<Plans> plans_;
};

/// Samples fn(x1, x2) on the collocation grid and transforms it.
ScalarField sample(Transform& tr, const std::function<double(double, double)>& fn);
/// Field depending on x2 only (mode 0).
ScalarField from_profile(const Grid& g, std::span<const double> profile);

ScalarField ddx1(const ScalarField& f);
/// Centered second-order differences inside, one-sided second-order at walls.
ScalarField ddx2(const ScalarField& f);
/// Second x2 derivative; one-sided second-order at walls.
ScalarField d2x2(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
/// Zeroes modes above n1/3 when the grid's dealias flag is set.
ScalarField dealias(ScalarField f);
void dealias_in_place(ScalarField& f);

/// x2 trapezoid sum of a profile.
double trapezoid(const Grid& g, std::span<const double> profile);
/// (1/gamma) * double integral: exact x1 mean, trapezoid in x2.
double integral(const ScalarField& f);
/// Domain average of f*g for real fields, via Parseval per row.
double inner(const ScalarField& f, const ScalarField& g);
/// Spectral (Parseval) form of the normalized squared L2 norm.
double l2_norm_sq(const ScalarField& f);
/// Physical-space quadrature of |f|^2 (transforms first).
double l2_norm_sq(Transform& tr, const ScalarField& f);
/// (1/gamma * integral |f|^p)^{1/p}; throws std::invalid_argument for p < 1.
double lp_norm(Transform& tr, const ScalarField& f, double p);
double lp_norm(const PhysicalField& f, double p);
double max_abs(const PhysicalField& f);
double max_value(const PhysicalField& f);

/// Mean over x1 of f*g at a single x2 row.
double row_inner(const ScalarField& f, const ScalarField& g, int j);
/// Mean over x1 of f*g per row (length n2+1).
std::vector<double> inner_profile(const ScalarField& f, const ScalarField& g);
/// Real part of mode 0 per row.
std::vector<double> mean_profile(const ScalarField& f);

using WallTrace = std::vector<Complex>;
WallTrace wall_trace(const ScalarField& f, Wall wall);
/// Mean over x1 of a*b on a wall, from two traces.
double trace_inner(const WallTrace& a, const WallTrace& b);

// Snapshot files: little-endian, magic "SLPC", version, n1, n2, gamma, time,
// block count, then named blocks of complex f64 coefficients.

struct SnapshotBlock {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<Complex> values;
};

struct Snapshot {
  std::uint32_t n1 = 0;
  std::uint32_t n2 = 0;
  double gamma = 0.0;
  double time = 0.0;
  std::vector<SnapshotBlock> blocks;

  const SnapshotBlock* find(const std::string& name) const;
  void add_field(const std::string& name, const ScalarField& f);
  void add_values(const std::string& name, std::vector<Complex> values);
  /// Reconstructs a field block on grid g; throws ParseError on shape mismatch.
  ScalarField field(const std::string& name, const Grid& g) const;
};

inline constexpr std::uint32_t snapshot_version = 1;

void write_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& path);
std::vector<unsigned char> encode_snapshot(const Snapshot& s);
Snapshot decode_snapshot(std::span<const unsigned char> bytes);

}  // namespace slipconvect
