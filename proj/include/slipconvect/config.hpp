#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace slipconvect {

/// A positive real that may also be +infinity. Infinity is a branch condition
/// (free-slip walls, quasi-static momentum), never a large number.
class ExtendedReal {
 public:
  static ExtendedReal infinite() { return ExtendedReal(0.0, true); }
  static ExtendedReal finite(double v) { return ExtendedReal(v, false); }

  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error when infinite.
  double value() const;
  /// 1/value, and 0 for infinity.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }
  /// value, and +inf for infinity; for arithmetic that accepts IEEE infinity.
  double as_double() const;

  bool operator==(const ExtendedReal& o) const {
    return infinite_ == o.infinite_ && (infinite_ || value_ == o.value_);
  }

 private:
  ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

struct PhysicalParams {
  double ra = 1.0;
  ExtendedReal pr = ExtendedReal::finite(1.0);
  ExtendedReal ls = ExtendedReal::infinite();
  double gamma = 2.0;
};

struct GridSpec {
  int n1 = 64;
  int n2 = 64;
  bool dealias = true;
};

struct TimeSpec {
  double dt_max = 1e-3;
  double cfl = 0.5;
  double t_end = 1.0;
  double t_transient = 0.0;
  std::uint64_t seed = 1;
};

enum class InitMode { conduction, perturbed, snapshot };

struct OutputOptions {
  std::string out_dir = "run";
  long snapshot_every = 0;  // steps; 0 disables periodic snapshots
  long diag_every = 10;     // steps
};

struct InitOptions {
  InitMode mode = InitMode::perturbed;
  double amplitude = 1e-2;
  std::string snapshot_path;  // used when mode == snapshot
};

struct RunConfig {
  PhysicalParams physical;
  GridSpec grid;
  TimeSpec time;
  OutputOptions output;
  InitOptions init;
};

void validate(const PhysicalParams& p);
void validate(const GridSpec& g);
void validate(const TimeSpec& t);
void validate(const RunConfig& c);

/// Parses `key = value` lines. Throws ParseError on malformed text and
/// ValidationError when an invariant fails.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

std::string format_config(const RunConfig& c);
void save_config(const RunConfig& c, const std::filesystem::path& path);

/// Shortest decimal form that round-trips; "inf" for infinity.
std::string format_real(double v);
std::string format_real(const ExtendedReal& v);

struct RegimeReport {
  bool universal_half = true;       // Nu <~ Ra^{1/2}: always applies
  bool five_twelfths = false;       // Ls^2 Pr^2 >= Ra^{3/2}
  double lhs = 0.0;                 // Ls^2 Pr^2 (may be +inf)
  double rhs = 0.0;                 // Ra^{3/2}
  double c_s = 1.0;
  double alpha = 0.0;               // log(Ls/c_s)/log(Ra); +inf for Ls = inf
  std::optional<double> exponent;   // p(alpha); empty when alpha < 0 or Ra <= 1
};

RegimeReport regime_check(const PhysicalParams& p, double c_s = 1.0);

/// Throws ValidationError when Ls^2 Pr^2 < Ra^{3/2}.
void require_five_twelfths_regime(const PhysicalParams& p);

}  // namespace slipconvect
