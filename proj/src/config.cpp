#include "slipconvect/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "slipconvect/boundcert.hpp"
#include "slipconvect/errors.hpp"

namespace slipconvect {

double ExtendedReal::value() const {
  if (infinite_) throw std::logic_error("ExtendedReal::value() on infinity");
  return value_;
}

double ExtendedReal::as_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

namespace {

void require(bool ok, const char* invariant) {
  if (!ok) throw ValidationError(std::string("invariant violated: ") + invariant);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out))
    throw ParseError("key '" + key + "': not a finite real: '" + v + "'");
  return out;
}

ExtendedReal parse_extended(const std::string& key, const std::string& v) {
  if (v == "inf") return ExtendedReal::infinite();
  return ExtendedReal::finite(parse_double(key, v));
}

long parse_long(const std::string& key, const std::string& v) {
  long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError("key '" + key + "': not an integer: '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError("key '" + key + "': not a nonnegative integer: '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ParseError("key '" + key + "': not a flag: '" + v + "'");
}

InitMode parse_init(const std::string& v) {
  if (v == "conduction") return InitMode::conduction;
  if (v == "perturbed") return InitMode::perturbed;
  if (v == "snapshot") return InitMode::snapshot;
  throw ParseError("key 'init': expected conduction|perturbed|snapshot, got '" + v + "'");
}

const char* init_name(InitMode m) {
  switch (m) {
    case InitMode::conduction: return "conduction";
    case InitMode::perturbed: return "perturbed";
    case InitMode::snapshot: return "snapshot";
  }
  return "perturbed";
}

}  // namespace

void validate(const PhysicalParams& p) {
  require(p.ra > 0.0, "ra > 0");
  require(p.gamma > 0.0, "gamma > 0");
  require(p.pr.is_infinite() || p.pr.value() > 0.0, "pr > 0 or inf");
  require(p.ls.is_infinite() || p.ls.value() > 0.0, "ls > 0 or inf");
}

void validate(const GridSpec& g) {
  require(g.n1 >= 8, "n1 >= 8");
  require(g.n1 % 2 == 0, "n1 even");
  require(g.n2 >= 8, "n2 >= 8");
}

void validate(const TimeSpec& t) {
  require(t.dt_max > 0.0, "dt_max > 0");
  require(t.cfl > 0.0 && t.cfl <= 1.0, "cfl in (0,1]");
  require(t.t_end > 0.0, "t_end > 0");
  require(t.t_transient >= 0.0, "t_transient >= 0");
  require(t.t_transient < t.t_end, "t_transient < t_end");
}

void validate(const RunConfig& c) {
  validate(c.physical);
  validate(c.grid);
  validate(c.time);
  require(c.output.diag_every >= 1, "diag_every >= 1");
  require(c.output.snapshot_every >= 0, "snapshot_every >= 0");
  require(c.init.amplitude >= 0.0, "amplitude >= 0");
  require(c.init.mode != InitMode::snapshot || !c.init.snapshot_path.empty(),
          "init = snapshot requires snapshot path");
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key or value");
    if (!seen.emplace(key, val).second)
      throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");

    if (key == "ra") c.physical.ra = parse_double(key, val);
    else if (key == "pr") c.physical.pr = parse_extended(key, val);
    else if (key == "ls") c.physical.ls = parse_extended(key, val);
    else if (key == "gamma") c.physical.gamma = parse_double(key, val);
    else if (key == "n1") c.grid.n1 = static_cast<int>(parse_long(key, val));
    else if (key == "n2") c.grid.n2 = static_cast<int>(parse_long(key, val));
    else if (key == "dealias") c.grid.dealias = parse_bool(key, val);
    else if (key == "dt_max") c.time.dt_max = parse_double(key, val);
    else if (key == "cfl") c.time.cfl = parse_double(key, val);
    else if (key == "t_end") c.time.t_end = parse_double(key, val);
    else if (key == "t_transient") c.time.t_transient = parse_double(key, val);
    else if (key == "seed") c.time.seed = parse_u64(key, val);
    else if (key == "out_dir") c.output.out_dir = val;
    else if (key == "snapshot_every") c.output.snapshot_every = parse_long(key, val);
    else if (key == "diag_every") c.output.diag_every = parse_long(key, val);
    else if (key == "init") c.init.mode = parse_init(val);
    else if (key == "amplitude") c.init.amplitude = parse_double(key, val);
    else if (key == "snapshot") c.init.snapshot_path = val;
    else throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  for (const char* k : {"ra", "pr", "ls", "gamma"})
    if (!seen.count(k)) throw ParseError(std::string("missing required key '") + k + "'");
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buf.data(), ptr);
}

std::string format_real(const ExtendedReal& v) {
  return v.is_infinite() ? std::string("inf") : format_real(v.value());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o << "ra = " << format_real(c.physical.ra) << '\n'
    << "pr = " << format_real(c.physical.pr) << '\n'
    << "ls = " << format_real(c.physical.ls) << '\n'
    << "gamma = " << format_real(c.physical.gamma) << '\n'
    << "n1 = " << c.grid.n1 << '\n'
    << "n2 = " << c.grid.n2 << '\n'
    << "dealias = " << (c.grid.dealias ? "true" : "false") << '\n'
    << "dt_max = " << format_real(c.time.dt_max) << '\n'
    << "cfl = " << format_real(c.time.cfl) << '\n'
    << "t_end = " << format_real(c.time.t_end) << '\n'
    << "t_transient = " << format_real(c.time.t_transient) << '\n'
    << "seed = " << c.time.seed << '\n'
    << "out_dir = " << c.output.out_dir << '\n'
    << "snapshot_every = " << c.output.snapshot_every << '\n'
    << "diag_every = " << c.output.diag_every << '\n'
    << "init = " << init_name(c.init.mode) << '\n'
    << "amplitude = " << format_real(c.init.amplitude) << '\n';
  if (!c.init.snapshot_path.empty()) o << "snapshot = " << c.init.snapshot_path << '\n';
  return o.str();
}

void save_config(const RunConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config '" + path.string() + "'");
  out << format_config(c);
}

RegimeReport regime_check(const PhysicalParams& p, double c_s) {
  RegimeReport r;
  r.c_s = c_s;
  r.rhs = std::pow(p.ra, 1.5);
  const double inf = std::numeric_limits<double>::infinity();
  if (p.ls.is_infinite() || p.pr.is_infinite()) {
    r.lhs = inf;
  } else {
    const double lp = p.ls.value() * p.pr.value();
    r.lhs = lp * lp;
  }
  r.five_twelfths = r.lhs >= r.rhs;

  if (p.ls.is_infinite()) {
    r.alpha = inf;
  } else if (p.ra != 1.0) {
    r.alpha = std::log(p.ls.value() / c_s) / std::log(p.ra);
  } else {
    r.alpha = std::numeric_limits<double>::quiet_NaN();
  }
  if (p.ra > 1.0 && r.alpha >= 0.0) r.exponent = exponent(r.alpha);
  return r;
}

void require_five_twelfths_regime(const PhysicalParams& p) {
  if (!regime_check(p).five_twelfths)
    throw ValidationError("invariant violated: ls^2 * pr^2 >= ra^(3/2)");
}

}  // namespace slipconvect
