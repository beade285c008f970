#include "symito/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace symito {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v +
                      "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" +
                      v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key +
                      "' expects an unsigned integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v +
                    "'");
}

std::vector<double> to_double_list(const std::string& key,
                                   const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty())
    throw ConfigError("config: key '" + key + "' expects a list of numbers");
  return out;
}

std::vector<double> split_params(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(trim(item)));
  return out;
}

}  // namespace

ProcessKind parse_process_kind(const std::string& s) {
  if (s == "brownian") return ProcessKind::BrownianMotion;
  if (s == "stable") return ProcessKind::TruncatedAlphaStable;
  if (s == "cpoisson") return ProcessKind::CompoundPoissonSymmetric;
  if (s == "brownian_jumps") return ProcessKind::BrownianPlusJumps;
  if (s == "diffusion2d") return ProcessKind::Diffusion2D;
  throw ConfigError("config: unknown process kind '" + s + "'");
}

FunctionDescriptor parse_function(const std::string& s) {
  const auto colon = s.find(':');
  const std::string head = colon == std::string::npos ? s : s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (head == "identity") return FunctionDescriptor::identity();
  if (head == "tanh") return FunctionDescriptor::tanh_fn();
  if (head == "square") return FunctionDescriptor::square();
  if (head == "atan") return FunctionDescriptor::atan_fn();
  if (head == "abs") return FunctionDescriptor::abs_shift(std::stod(arg));
  if (head == "negpart") return FunctionDescriptor::neg_part(std::stod(arg));
  if (head == "const") return FunctionDescriptor::constant(std::stod(arg));
  throw ConfigError("config: unknown function '" + s + "'");
}

Function2 parse_function2(const std::string& s) {
  if (s == "xy") return Function2::product();
  if (s == "x+y") return Function2::sum();
  throw ConfigError("config: unknown 2-d function '" + s + "'");
}

namespace {

JumpDist parse_jump_dist(const std::string& s) {
  const auto colon = s.find(':');
  const std::string head = colon == std::string::npos ? s : s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  JumpDist d;
  const std::vector<double> p = arg.empty() ? std::vector<double>{} : split_params(arg);
  if (head == "two_point" && p.size() == 1) {
    d.kind = JumpDistKind::TwoPoint;
    d.a = p[0];
    return d;
  }
  if (head == "uniform" && p.size() == 2) {
    d.kind = JumpDistKind::UniformSymmetric;
    d.a = p[0];
    d.b = p[1];
    return d;
  }
  if (head == "gauss" && p.size() == 1) {
    d.kind = JumpDistKind::GaussianSymmetric;
    d.a = p[0];
    return d;
  }
  throw ConfigError("config: unknown jump_dist '" + s + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, std::string> kv;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value', got '" + line + "'");
    const std::string key = section + "." + trim(line.substr(0, eq));
    kv[key] = trim(line.substr(eq + 1));
  }

  ExperimentConfig& e = cfg.exp;
  for (const auto& [key, value] : kv) {
    if (key == "run.out_dir") cfg.out_dir = value;
    else if (key == "run.seed") e.seed_base = to_u64(key, value);
    else if (key == "run.n_paths") e.n_paths = static_cast<int>(to_int(key, value));
    else if (key == "run.threads") e.threads = static_cast<int>(to_int(key, value));
    else if (key == "run.quiet") cfg.quiet = to_bool(key, value);
    else if (key == "process.kind") e.spec.kind = parse_process_kind(value);
    else if (key == "process.sigma2") e.spec.sigma2 = to_double(key, value);
    else if (key == "process.alpha") e.spec.alpha = to_double(key, value);
    else if (key == "process.scale") e.spec.scale = to_double(key, value);
    else if (key == "process.delta") e.spec.delta = to_double(key, value);
    else if (key == "process.rate") e.spec.rate = to_double(key, value);
    else if (key == "process.jump_dist") e.spec.jump_dist = parse_jump_dist(value);
    else if (key == "process.a11") e.spec.a11 = to_double(key, value);
    else if (key == "process.a12") e.spec.a12 = to_double(key, value);
    else if (key == "process.a22") e.spec.a22 = to_double(key, value);
    else if (key == "process.x0") e.spec.x0 = to_double(key, value);
    else if (key == "process.y0") e.spec.y0 = to_double(key, value);
    else if (key == "grid.horizon") e.horizon = to_double(key, value);
    else if (key == "grid.dt") e.dts = to_double_list(key, value);
    else if (key == "grid.level_cells") e.level_cells = static_cast<int>(to_int(key, value));
    else if (key == "grid.checkpoints") e.checkpoint_fracs = to_double_list(key, value);
    else if (key == "functions.u") e.u = parse_function(value);
    else if (key == "functions.F") e.F = parse_function(value);
    else if (key == "functions.F2") e.F2 = parse_function2(value);
    else if (key == "functions.level") e.level = to_double(key, value);
    else if (key == "functions.bandwidth") e.bandwidth = to_double(key, value);
    else if (key == "functions.occ_lo") e.occ_lo = to_double(key, value);
    else if (key == "functions.occ_hi") e.occ_hi = to_double(key, value);
    else if (key == "harness.start") {
      if (value == "fixed") e.start = StartProtocol::FixedPoint;
      else if (value == "window") e.start = StartProtocol::StationaryWindow;
      else throw ConfigError("config: harness.start must be fixed|window");
    }
    else if (key == "harness.burn_in_factor") e.burn_in_factor = to_double(key, value);
    else if (key == "harness.truncation_levels") e.truncation_levels = static_cast<int>(to_int(key, value));
    else if (key == "harness.tol_residual") e.tol_residual = to_double(key, value);
    else if (key == "harness.tol_relative") e.tol_relative = to_double(key, value);
    else if (key == "harness.tol_localtime") e.tol_localtime = to_double(key, value);
    else if (key == "harness.tol_exact") e.tol_exact = to_double(key, value);
    else if (key == "harness.tol_z") e.tol_z = to_double(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }

  // Environment override for the seed base only.
  if (const char* env = std::getenv("SYMITO_SEED")) {
    cfg.exp.seed_base = to_u64("SYMITO_SEED", env);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string RunConfig::canonical_text() const {
  char buf[256];
  std::string out;
  const auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.17g\n", key, v);
    out += buf;
  };
  out += "out_dir=" + out_dir + "\n";
  std::snprintf(buf, sizeof buf, "seed=%llu\n",
                static_cast<unsigned long long>(exp.seed_base));
  out += buf;
  put("n_paths", exp.n_paths);
  put("kind", static_cast<double>(exp.spec.kind));
  put("sigma2", exp.spec.sigma2);
  put("alpha", exp.spec.alpha);
  put("scale", exp.spec.scale);
  put("delta", exp.spec.delta);
  put("rate", exp.spec.rate);
  put("jump_kind", static_cast<double>(exp.spec.jump_dist.kind));
  put("jump_a", exp.spec.jump_dist.a);
  put("jump_b", exp.spec.jump_dist.b);
  put("a11", exp.spec.a11);
  put("a12", exp.spec.a12);
  put("a22", exp.spec.a22);
  put("x0", exp.spec.x0);
  put("y0", exp.spec.y0);
  put("horizon", exp.horizon);
  for (double dt : exp.dts) put("dt", dt);
  put("level_cells", exp.level_cells);
  for (double f : exp.checkpoint_fracs) put("checkpoint", f);
  out += "u=" + exp.u.name() + "\n";
  out += "F=" + exp.F.name() + "\n";
  put("F2", static_cast<double>(exp.F2.form()));
  put("level", exp.level);
  put("bandwidth", exp.bandwidth);
  put("occ_lo", exp.occ_lo);
  put("occ_hi", exp.occ_hi);
  put("start", exp.start == StartProtocol::FixedPoint ? 0 : 1);
  put("burn_in_factor", exp.burn_in_factor);
  put("truncation_levels", exp.truncation_levels);
  put("tol_residual", exp.tol_residual);
  put("tol_relative", exp.tol_relative);
  put("tol_localtime", exp.tol_localtime);
  put("tol_exact", exp.tol_exact);
  put("tol_z", exp.tol_z);
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical_text()); }

}  // namespace symito
