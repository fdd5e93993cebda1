#include "slipconvect/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "slipconvect/errors.hpp"

namespace slipconvect {

Grid::Grid(int n1_, int n2_, double gamma_, bool dealias_)
    : n1(n1_), n2(n2_), gamma(gamma_), dealias(dealias_) {
  validate(GridSpec{n1, n2, dealias});
  if (!(gamma > 0.0)) throw ValidationError("invariant violated: gamma > 0");
}

Grid::Grid(const GridSpec& spec, double gamma_) : Grid(spec.n1, spec.n2, gamma_, spec.dealias) {}

double Grid::wavenumber(int k) const { return 2.0 * std::numbers::pi * k / gamma; }

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const Grid& g)
    : grid_(g), data_(static_cast<std::size_t>(g.modes()) * g.points()) {}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

PhysicalField::PhysicalField(const Grid& g)
    : grid_(g), data_(static_cast<std::size_t>(g.n1) * g.points()) {}

// ---------------------------------------------------------------------------

namespace {
// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Transform::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(const Grid& g) {
    const int ny = g.points();
    const int n = g.n1;
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n) * ny);
    spec = fftw_alloc_complex(static_cast<std::size_t>(g.modes()) * ny);
    // Deterministic plans: FFTW_ESTIMATE never times candidate algorithms, so
    // repeated runs take identical arithmetic paths.
    forward = fftw_plan_many_dft_r2c(1, &n, ny, real, nullptr, ny, 1, spec, nullptr, ny, 1,
                                     FFTW_ESTIMATE);
    backward = fftw_plan_many_dft_c2r(1, &n, ny, spec, nullptr, ny, 1, real, nullptr, ny, 1,
                                      FFTW_ESTIMATE);
    if (!forward || !backward) throw SolverError("FFTW plan creation failed");
  }

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }
};

Transform::Transform(const Grid& g) : grid_(g), plans_(std::make_unique<Plans>(g)) {}
Transform::~Transform() = default;

PhysicalField Transform::to_physical(const ScalarField& f) {
  if (!(f.grid() == grid_)) throw std::invalid_argument("Transform: grid mismatch");
  const std::size_t nspec = f.data().size();
  std::memcpy(plans_->spec, f.data().data(), nspec * sizeof(Complex));
  fftw_execute(plans_->backward);
  PhysicalField out(grid_);
  std::memcpy(out.data().data(), plans_->real, out.data().size() * sizeof(double));
  return out;
}

ScalarField Transform::to_spectral(const PhysicalField& f) {
  if (!(f.grid() == grid_)) throw std::invalid_argument("Transform: grid mismatch");
  std::memcpy(plans_->real, f.data().data(), f.data().size() * sizeof(double));
  fftw_execute(plans_->forward);
  ScalarField out(grid_);
  const double scale = 1.0 / grid_.n1;
  const auto* src = reinterpret_cast<const Complex*>(plans_->spec);
  auto& dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] * scale;
  // Mode 0 and the Nyquist mode of a real signal are real.
  const int ny = grid_.points();
  const int nyq = grid_.n1 / 2;
  for (int j = 0; j < ny; ++j) {
    out(0, j).imag(0.0);
    out(nyq, j).imag(0.0);
  }
  return out;
}

ScalarField sample(Transform& tr, const std::function<double(double, double)>& fn) {
  const Grid& g = tr.grid();
  PhysicalField p(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.points(); ++j) p(i, j) = fn(g.x1(i), g.x2(j));
  return tr.to_spectral(p);
}

ScalarField from_profile(const Grid& g, std::span<const double> profile) {
  if (profile.size() != static_cast<std::size_t>(g.points()))
    throw std::invalid_argument("from_profile: length mismatch");
  ScalarField f(g);
  for (int j = 0; j < g.points(); ++j) f(0, j) = profile[j];
  return f;
}

// ---------------------------------------------------------------------------

ScalarField ddx1(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const int nyq = g.n1 / 2;
  for (int k = 1; k < nyq; ++k) {
    const Complex ik(0.0, g.wavenumber(k));
    auto src = f.mode(k);
    auto dst = out.mode(k);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = ik * src[j];
  }
  return out;
}

ScalarField ddx2(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const int n = g.n2;
  const double c = 0.5 / g.h2();
  for (int k = 0; k < g.modes(); ++k) {
    auto s = f.mode(k);
    auto d = out.mode(k);
    d[0] = c * (-3.0 * s[0] + 4.0 * s[1] - s[2]);
    for (int j = 1; j < n; ++j) d[j] = c * (s[j + 1] - s[j - 1]);
    d[n] = c * (3.0 * s[n] - 4.0 * s[n - 1] + s[n - 2]);
  }
  return out;
}

ScalarField d2x2(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const int n = g.n2;
  const double c = 1.0 / (g.h2() * g.h2());
  for (int k = 0; k < g.modes(); ++k) {
    auto s = f.mode(k);
    auto d = out.mode(k);
    d[0] = c * (2.0 * s[0] - 5.0 * s[1] + 4.0 * s[2] - s[3]);
    for (int j = 1; j < n; ++j) d[j] = c * (s[j + 1] - 2.0 * s[j] + s[j - 1]);
    d[n] = c * (2.0 * s[n] - 5.0 * s[n - 1] + 4.0 * s[n - 2] - s[n - 3]);
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out = d2x2(f);
  const Grid& g = f.grid();
  for (int k = 1; k < g.modes(); ++k) {
    const double kk = g.wavenumber(k) * g.wavenumber(k);
    auto s = f.mode(k);
    auto d = out.mode(k);
    for (std::size_t j = 0; j < s.size(); ++j) d[j] -= kk * s[j];
  }
  return out;
}

void dealias_in_place(ScalarField& f) {
  const Grid& g = f.grid();
  if (!g.dealias) return;
  for (int k = g.dealias_cutoff() + 1; k < g.modes(); ++k)
    for (auto& v : f.mode(k)) v = 0.0;
}

ScalarField dealias(ScalarField f) {
  dealias_in_place(f);
  return f;
}

// ---------------------------------------------------------------------------

double trapezoid(const Grid& g, std::span<const double> profile) {
  double s = 0.0;
  for (int j = 0; j < g.points(); ++j) s += g.weight(j) * profile[j];
  return s;
}

double integral(const ScalarField& f) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (int j = 0; j < g.points(); ++j) s += g.weight(j) * f(0, j).real();
  return s;
}

double row_inner(const ScalarField& f, const ScalarField& g, int j) {
  const Grid& gr = f.grid();
  const int nyq = gr.n1 / 2;
  double s = f(0, j).real() * g(0, j).real();
  for (int k = 1; k < nyq; ++k) s += 2.0 * (f(k, j) * std::conj(g(k, j))).real();
  s += f(nyq, j).real() * g(nyq, j).real();
  return s;
}

std::vector<double> inner_profile(const ScalarField& f, const ScalarField& g) {
  std::vector<double> out(f.grid().points());
  for (int j = 0; j < f.grid().points(); ++j) out[j] = row_inner(f, g, j);
  return out;
}

double inner(const ScalarField& f, const ScalarField& g) {
  const Grid& gr = f.grid();
  double s = 0.0;
  for (int j = 0; j < gr.points(); ++j) s += gr.weight(j) * row_inner(f, g, j);
  return s;
}

double l2_norm_sq(const ScalarField& f) { return inner(f, f); }

double l2_norm_sq(Transform& tr, const ScalarField& f) {
  const PhysicalField p = tr.to_physical(f);
  const Grid& g = f.grid();
  double s = 0.0;
  for (int j = 0; j < g.points(); ++j) {
    double row = 0.0;
    for (int i = 0; i < g.n1; ++i) row += p(i, j) * p(i, j);
    s += g.weight(j) * row / g.n1;
  }
  return s;
}

double lp_norm(const PhysicalField& p, double power) {
  if (!(power >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const Grid& g = p.grid();
  double s = 0.0;
  for (int j = 0; j < g.points(); ++j) {
    double row = 0.0;
    for (int i = 0; i < g.n1; ++i) row += std::pow(std::abs(p(i, j)), power);
    s += g.weight(j) * row / g.n1;
  }
  return std::pow(s, 1.0 / power);
}

double lp_norm(Transform& tr, const ScalarField& f, double power) {
  if (!(power >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  return lp_norm(tr.to_physical(f), power);
}

double max_abs(const PhysicalField& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_value(const PhysicalField& f) {
  return *std::max_element(f.data().begin(), f.data().end());
}

std::vector<double> mean_profile(const ScalarField& f) {
  std::vector<double> out(f.grid().points());
  for (int j = 0; j < f.grid().points(); ++j) out[j] = f(0, j).real();
  return out;
}

WallTrace wall_trace(const ScalarField& f, Wall wall) {
  const Grid& g = f.grid();
  const int j = wall == Wall::bottom ? 0 : g.n2;
  WallTrace t(g.modes());
  for (int k = 0; k < g.modes(); ++k) t[k] = f(k, j);
  return t;
}

double trace_inner(const WallTrace& a, const WallTrace& b) {
  const int nyq = static_cast<int>(a.size()) - 1;
  double s = a[0].real() * b[0].real();
  for (int k = 1; k < nyq; ++k) s += 2.0 * (a[k] * std::conj(b[k])).real();
  s += a[nyq].real() * b[nyq].real();
  return s;
}

// ---------------------------------------------------------------------------
// Snapshot encoding

const SnapshotBlock* Snapshot::find(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return &b;
  return nullptr;
}

void Snapshot::add_field(const std::string& name, const ScalarField& f) {
  const Grid& g = f.grid();
  blocks.push_back({name, static_cast<std::uint32_t>(g.modes()),
                    static_cast<std::uint32_t>(g.points()), f.data()});
}

void Snapshot::add_values(const std::string& name, std::vector<Complex> values) {
  const auto n = static_cast<std::uint32_t>(values.size());
  blocks.push_back({name, 1, n, std::move(values)});
}

ScalarField Snapshot::field(const std::string& name, const Grid& g) const {
  const SnapshotBlock* b = find(name);
  if (!b) throw ParseError("snapshot: missing block '" + name + "'");
  if (b->rows != static_cast<std::uint32_t>(g.modes()) ||
      b->cols != static_cast<std::uint32_t>(g.points()))
    throw ParseError("snapshot: block '" + name + "' does not match the grid");
  ScalarField f(g);
  f.data() = b->values;
  return f;
}

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const std::string& s) { bytes.insert(bytes.end(), s.begin(), s.end()); }
  std::vector<unsigned char> bytes;
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> b) : bytes_(b) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string raw(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw ParseError("snapshot: truncated file");
  }
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  Writer w;
  w.raw("SLPC");
  w.u32(snapshot_version);
  w.u32(s.n1);
  w.u32(s.n2);
  w.f64(s.gamma);
  w.f64(s.time);
  w.u32(static_cast<std::uint32_t>(s.blocks.size()));
  for (const auto& b : s.blocks) {
    if (b.values.size() != static_cast<std::size_t>(b.rows) * b.cols)
      throw std::invalid_argument("snapshot block '" + b.name + "' has inconsistent shape");
    w.u32(static_cast<std::uint32_t>(b.name.size()));
    w.raw(b.name);
    w.u32(b.rows);
    w.u32(b.cols);
    for (const auto& v : b.values) {
      w.f64(v.real());
      w.f64(v.imag());
    }
  }
  return std::move(w.bytes);
}

Snapshot decode_snapshot(std::span<const unsigned char> bytes) {
  Reader r(bytes);
  if (r.raw(4) != "SLPC") throw ParseError("snapshot: bad magic");
  const std::uint32_t version = r.u32();
  if (version != snapshot_version)
    throw ParseError("snapshot: unsupported version " + std::to_string(version));
  Snapshot s;
  s.n1 = r.u32();
  s.n2 = r.u32();
  s.gamma = r.f64();
  s.time = r.f64();
  const std::uint32_t nblocks = r.u32();
  for (std::uint32_t b = 0; b < nblocks; ++b) {
    SnapshotBlock blk;
    blk.name = r.raw(r.u32());
    blk.rows = r.u32();
    blk.cols = r.u32();
    const std::size_t n = static_cast<std::size_t>(blk.rows) * blk.cols;
    blk.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double re = r.f64();
      const double im = r.f64();
      blk.values[i] = Complex(re, im);
    }
    s.blocks.push_back(std::move(blk));
  }
  if (!r.done()) throw ParseError("snapshot: trailing bytes");
  return s;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  const auto bytes = encode_snapshot(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open snapshot '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace slipconvect
