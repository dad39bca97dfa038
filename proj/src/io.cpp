#include "nlk/io.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <json.hpp>
#include <set>
#include <sstream>

#include "nlk/errors.hpp"

#ifndef NLK_VERSION
#define NLK_VERSION "0.0.0"
#endif

namespace nlk {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_double(const std::string& text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<double> parse_double_list(const std::string& text, bool& ok) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  ok = true;
  while (in >> tok) {
    for (char& c : tok) {
      if (c == ',') c = ' ';
    }
    std::istringstream sub(tok);
    std::string piece;
    while (sub >> piece) {
      double v = 0.0;
      if (!parse_double(piece, v)) ok = false;
      out.push_back(v);
    }
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"dimension", "nodes", "extents"}},
      {"physics", {"model", "s", "kappa", "delta", "epsilon", "nu", "nu_file", "nu_values"}},
      {"initial", {"kind", "diameter", "offset", "value", "seed"}},
      {"integrator", {"scheme", "dt", "safety", "horizon"}},
      {"output", {"directory", "stride", "formats", "kernel_cache"}},
      {"diagnostics", {"relaxation"}},
  };
  return s;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& errors)
      : tree_(tree), errors_(errors) {}

  std::optional<std::string> raw(const std::string& path) const {
    if (auto v = tree_.get_optional<std::string>(path)) return trim(*v);
    return std::nullopt;
  }

  void number(const std::string& path, double& target) const {
    if (auto v = raw(path)) {
      if (!parse_double(*v, target)) errors_.push_back(path + ": not a number: '" + *v + "'");
    }
  }

  void integer(const std::string& path, int& target) const {
    if (auto v = raw(path)) {
      const auto res = std::from_chars(v->data(), v->data() + v->size(), target);
      if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
        errors_.push_back(path + ": not an integer: '" + *v + "'");
      }
    }
  }

  void boolean(const std::string& path, bool& target) const {
    if (auto v = raw(path)) {
      const std::string s = lower(*v);
      if (s == "true" || s == "yes" || s == "on" || s == "1") {
        target = true;
      } else if (s == "false" || s == "no" || s == "off" || s == "0") {
        target = false;
      } else {
        errors_.push_back(path + ": not a boolean: '" + *v + "'");
      }
    }
  }

  template <class E>
  void choice(const std::string& path, E& target,
              const std::vector<std::pair<std::string, E>>& options) const {
    if (auto v = raw(path)) {
      const std::string s = lower(*v);
      for (const auto& [name, value] : options) {
        if (s == name) {
          target = value;
          return;
        }
      }
      std::string allowed;
      for (const auto& o : options) allowed += (allowed.empty() ? "" : "|") + o.first;
      errors_.push_back(path + ": must be one of " + allowed + ", got '" + *v + "'");
    }
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string>& errors_;
};

SimConfig from_tree(const pt::ptree& tree, const fs::path& base_dir,
                    std::vector<std::string>& errors) {
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (body.empty()) {
      errors.push_back(section + ": key outside any section");
      continue;
    }
    if (it == schema().end()) {
      errors.push_back(section + ": unknown section");
      continue;
    }
    for (const auto& [key, value] : body) {
      (void)value;
      if (!it->second.count(key)) errors.push_back(section + "." + key + ": unknown key");
    }
  }

  SimConfig c;
  const Reader r(tree, errors);

  r.integer("grid.dimension", c.grid.dimension);
  r.integer("grid.nodes", c.grid.nodes);
  if (auto v = r.raw("grid.extents")) {
    bool ok = true;
    const auto vals = parse_double_list(*v, ok);
    if (!ok || vals.empty() || vals.size() % 2 != 0) {
      errors.push_back("grid.extents: expected 'lo hi' pairs, got '" + *v + "'");
    } else {
      c.grid.extents.clear();
      for (std::size_t k = 0; k < vals.size(); k += 2) c.grid.extents.push_back({vals[k], vals[k + 1]});
    }
  }
  // A single extent pair in 2D means a square.
  if (c.grid.dimension == 2 && c.grid.extents.size() == 1) {
    c.grid.extents.push_back(c.grid.extents.front());
  }

  r.choice<ModelKind>("physics.model", c.physics.model,
                      {{"lattice", ModelKind::Lattice},
                       {"regularized", ModelKind::Regularized},
                       {"singular", ModelKind::Singular}});
  r.number("physics.s", c.physics.s);
  r.number("physics.kappa", c.physics.kappa);
  r.number("physics.delta", c.physics.delta);
  if (r.raw("physics.epsilon")) {
    r.number("physics.epsilon", c.physics.epsilon);
  } else if (c.physics.model != ModelKind::Regularized) {
    c.physics.epsilon = 0.0;
  }
  r.number("physics.nu", c.physics.nu);
  if (auto v = r.raw("physics.nu_values")) {
    bool ok = true;
    c.physics.nu_values = parse_double_list(*v, ok);
    if (!ok) errors.push_back("physics.nu_values: malformed number list");
  }
  if (auto v = r.raw("physics.nu_file")) {
    if (r.raw("physics.nu_values")) {
      errors.push_back("physics.nu_file: give either nu_file or nu_values, not both");
    }
    fs::path p = *v;
    if (p.is_relative()) p = base_dir / p;
    c.physics.nu_file = p.string();
    try {
      c.physics.nu_values = read_values_file(p);
    } catch (const IoError& e) {
      errors.push_back(std::string("physics.nu_file: ") + e.what());
    }
  }

  r.choice<InitialKind>("initial.kind", c.initial.kind,
                        {{"constant", InitialKind::Constant},
                         {"smooth", InitialKind::Smooth},
                         {"random", InitialKind::Random},
                         {"two_cluster", InitialKind::TwoCluster}});
  r.number("initial.diameter", c.initial.diameter);
  r.number("initial.offset", c.initial.offset);
  if (r.raw("initial.value")) {
    if (r.raw("initial.offset")) errors.push_back("initial.value: alias of offset, give only one");
    r.number("initial.value", c.initial.offset);
  }
  if (auto v = r.raw("initial.seed")) {
    std::uint64_t seed = 0;
    const auto res = std::from_chars(v->data(), v->data() + v->size(), seed);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
      errors.push_back("initial.seed: not an unsigned integer: '" + *v + "'");
    } else {
      c.initial.seed = seed;
    }
  }

  r.choice<Scheme>("integrator.scheme", c.integrator.scheme,
                   {{"rk4", Scheme::RK4}, {"euler", Scheme::Euler}});
  if (auto v = r.raw("integrator.dt")) {
    if (lower(*v) == "auto") {
      c.integrator.dt.reset();
    } else {
      double dt = 0.0;
      r.number("integrator.dt", dt);
      c.integrator.dt = dt;
    }
  }
  r.number("integrator.safety", c.integrator.safety);
  r.number("integrator.horizon", c.integrator.horizon);

  if (auto v = r.raw("output.directory")) c.output.directory = *v;
  r.integer("output.stride", c.integrator.stride);
  if (auto v = r.raw("output.formats")) {
    c.output.csv = c.output.snapshots = c.output.manifest = false;
    std::string list = *v;
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream in(list);
    std::string f;
    while (in >> f) {
      f = lower(f);
      if (f == "csv") {
        c.output.csv = true;
      } else if (f == "snapshots") {
        c.output.snapshots = true;
      } else if (f == "manifest") {
        c.output.manifest = true;
      } else if (f != "none") {
        errors.push_back("output.formats: unknown format '" + f + "'");
      }
    }
  }
  if (auto v = r.raw("output.kernel_cache")) c.output.kernel_cache = *v;

  r.boolean("diagnostics.relaxation", c.relaxation);
  return c;
}

void apply_overrides(pt::ptree& tree, const std::vector<std::string>& overrides,
                     std::vector<std::string>& errors) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const std::string path = eq == std::string::npos ? "" : trim(o.substr(0, eq));
    if (eq == std::string::npos || path.find('.') == std::string::npos ||
        path.find('.') != path.rfind('.')) {
      errors.push_back("override '" + o + "': expected section.key=value");
      continue;
    }
    tree.put(path, trim(o.substr(eq + 1)));
  }
}

SimConfig finish(pt::ptree& tree, const std::vector<std::string>& overrides,
                 const fs::path& base_dir) {
  std::vector<std::string> errors;
  apply_overrides(tree, overrides, errors);
  SimConfig c = from_tree(tree, base_dir, errors);
  if (errors.empty()) {
    auto v = validate(c);
    errors.insert(errors.end(), v.begin(), v.end());
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

std::string platform_string() {
  std::string s;
#if defined(__linux__)
  s = "linux";
#elif defined(__APPLE__)
  s = "macos";
#elif defined(_WIN32)
  s = "windows";
#else
  s = "unknown-os";
#endif
#if defined(__x86_64__) || defined(_M_X64)
  s += "-x86_64";
#elif defined(__aarch64__)
  s += "-aarch64";
#endif
#if defined(__clang__)
  s += " clang " __clang_version__;
#elif defined(__GNUC__)
  s += " gcc " __VERSION__;
#endif
  return s;
}

json number_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json record_json(const DiagnosticsRecord& r) {
  return {{"t", number_json(r.t)},
          {"mean", number_json(r.mean)},
          {"diameter", number_json(r.diameter)},
          {"E_P", number_json(r.e_potential)},
          {"E_K", number_json(r.e_kinetic)},
          {"seminorm_sq", number_json(r.seminorm_sq)},
          {"dist_sq", number_json(r.dist_sq)},
          {"dissipation_cum", number_json(r.dissipation)},
          {"dual_bound", number_json(r.dual_bound)}};
}

json bounds_json(const BoundReport& b) {
  json rows = json::array();
  for (const auto& r : b.rows) {
    json row = {{"name", r.name}, {"applicable", r.applicable}};
    if (r.applicable) {
      row["lhs"] = number_json(r.lhs);
      row["rhs"] = number_json(r.rhs);
      row["worst_t"] = number_json(r.worst_t);
      row["satisfied"] = r.satisfied;
    } else {
      row["reason"] = r.reason;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

SimConfig parse_config(const fs::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides, path.parent_path());
}

SimConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides,
                            const fs::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
  }
  return finish(tree, overrides, base_dir.empty() ? fs::path(".") : base_dir);
}

std::string canonical_config_text(const SimConfig& c) {
  std::ostringstream o;
  const auto num = [](double v) { return format_number(v); };
  o << "[grid]\n";
  o << "dimension = " << c.grid.dimension << '\n';
  o << "nodes = " << c.grid.nodes << '\n';
  o << "extents =";
  for (const auto& e : c.grid.extents) o << ' ' << num(e.lo) << ' ' << num(e.hi);
  o << "\n\n[physics]\n";
  o << "model = " << to_string(c.physics.model) << '\n';
  o << "s = " << num(c.physics.s) << '\n';
  o << "kappa = " << num(c.physics.kappa) << '\n';
  o << "delta = " << num(c.physics.delta) << '\n';
  o << "epsilon = " << num(c.physics.epsilon) << '\n';
  o << "nu = " << num(c.physics.nu) << '\n';
  if (!c.physics.nu_values.empty()) {
    o << "nu_values =";
    for (double v : c.physics.nu_values) o << ' ' << num(v);
    o << '\n';
  }
  o << "\n[initial]\n";
  o << "kind = " << to_string(c.initial.kind) << '\n';
  o << "diameter = " << num(c.initial.diameter) << '\n';
  o << "offset = " << num(c.initial.offset) << '\n';
  if (c.initial.seed) o << "seed = " << *c.initial.seed << '\n';
  o << "\n[integrator]\n";
  o << "scheme = " << to_string(c.integrator.scheme) << '\n';
  o << "dt = " << (c.integrator.dt ? num(*c.integrator.dt) : std::string("auto")) << '\n';
  o << "safety = " << num(c.integrator.safety) << '\n';
  o << "horizon = " << num(c.integrator.horizon) << '\n';
  o << "\n[output]\n";
  o << "directory = " << c.output.directory.string() << '\n';
  o << "stride = " << c.integrator.stride << '\n';
  std::string formats;
  if (c.output.csv) formats += "csv";
  if (c.output.snapshots) formats += std::string(formats.empty() ? "" : ",") + "snapshots";
  if (c.output.manifest) formats += std::string(formats.empty() ? "" : ",") + "manifest";
  o << "formats = " << (formats.empty() ? "none" : formats) << '\n';
  if (!c.output.kernel_cache.empty()) o << "kernel_cache = " << c.output.kernel_cache.string() << '\n';
  o << "\n[diagnostics]\n";
  o << "relaxation = " << (c.relaxation ? "true" : "false") << '\n';
  return o.str();
}

std::uint64_t config_hash(const SimConfig& config) {
  const std::string text = canonical_config_text(config);
  return fnv1a({reinterpret_cast<const unsigned char*>(text.data()), text.size()});
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

std::vector<double> read_values_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    if (!parse_double(tok, v)) throw IoError(path.string() + ": not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

void write_diagnostics_csv(const fs::path& path, const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << format_number(r.t) << ',' << format_number(r.mean) << ',' << format_number(r.diameter)
        << ',' << format_number(r.e_potential) << ',' << format_number(r.e_kinetic) << ','
        << format_number(r.seminorm_sq) << ',' << format_number(r.dist_sq) << ','
        << format_number(r.dissipation) << ',' << format_number(r.dual_bound) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw IoError(path.string() + ": unexpected CSV header");
  }
  std::vector<DiagnosticsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> v;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      double x = 0.0;
      if (!parse_double(cell, x)) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      v.push_back(x);
    }
    if (v.size() != 9) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 9 columns");
    }
    DiagnosticsRecord r;
    r.t = v[0];
    r.mean = v[1];
    r.diameter = v[2];
    r.e_potential = v[3];
    r.e_kinetic = v[4];
    r.seminorm_sq = v[5];
    r.dist_sq = v[6];
    r.dissipation = v[7];
    r.dual_bound = v[8];
    out.push_back(r);
  }
  return out;
}

void write_snapshot(const fs::path& path, int dimension, int nodes_per_axis,
                    const PhaseField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const double header[3] = {static_cast<double>(dimension), static_cast<double>(nodes_per_axis),
                            field.t};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path.string());
}

Snapshot read_snapshot(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  double header[3];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in) throw IoError(path.string() + ": truncated header");
  Snapshot s;
  s.dimension = static_cast<int>(header[0]);
  s.nodes_per_axis = static_cast<int>(header[1]);
  s.field.t = header[2];
  if ((s.dimension != 1 && s.dimension != 2) || s.nodes_per_axis < 1) {
    throw IoError(path.string() + ": bad header");
  }
  std::size_t n = static_cast<std::size_t>(s.nodes_per_axis);
  if (s.dimension == 2) n *= n;
  s.field.values.resize(n);
  in.read(reinterpret_cast<char*>(s.field.values.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError(path.string() + ": truncated data");
  return s;
}

std::vector<fs::path> write_outputs(const Trajectory& traj, const fs::path& dir) {
  const auto& out_cfg = traj.config.output;
  std::vector<fs::path> written;
  std::string note;
  ensure_dir(dir);
  try {
    if (out_cfg.csv) {
      write_diagnostics_csv(dir / "diagnostics.csv", traj.records);
      written.push_back(dir / "diagnostics.csv");
    }
    if (out_cfg.snapshots) {
      ensure_dir(dir / "snapshots");
      for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        char name[40];
        std::snprintf(name, sizeof name, "snapshot_%06zu.bin", k);
        write_snapshot(dir / "snapshots" / name, traj.config.grid.dimension,
                       traj.config.grid.nodes, traj.physical(k));
        written.push_back(dir / "snapshots" / name);
      }
    }
  } catch (const IoError& e) {
    note = std::string("partial output: ") + e.what();
  }

  if (out_cfg.manifest || !note.empty()) {
    json m;
    m["config"] = canonical_config_text(traj.config);
    m["config_hash"] = hash_hex(config_hash(traj.config));
    m["version"] = NLK_VERSION;
    m["platform"] = platform_string();
    m["wall_seconds"] = traj.wall_seconds;
    m["dt"] = traj.dt;
    m["steps_planned"] = traj.steps_planned;
    m["steps_taken"] = traj.steps_taken;
    m["status"] = to_string(traj.status);
    if (!traj.message.empty()) m["message"] = traj.message;
    m["gauge"] = {{"reduced", traj.gauge_reduced},
                  {"mean_offset", traj.mean_offset},
                  {"nu", traj.nu}};
    m["snapshot_frame"] = "physical";
    json files = json::array();
    for (const auto& p : written) files.push_back(fs::relative(p, dir).generic_string());
    m["outputs"] = files;
    if (!note.empty()) m["note"] = note;
    try {
      write_json(dir / "manifest.json", m);
      written.push_back(dir / "manifest.json");
    } catch (const IoError&) {
      if (note.empty()) throw;
    }
  }
  if (!note.empty()) throw IoError(note);
  return written;
}

void write_sweep_outputs(const SweepResult& sweep, const fs::path& dir) {
  ensure_dir(dir);
  json rungs = json::array();
  for (std::size_t j = 0; j < sweep.rungs.size(); ++j) {
    const auto& r = sweep.rungs[j];
    char name[16];
    std::snprintf(name, sizeof name, "rung_%02zu", j);
    write_outputs(r.trajectory, dir / name);
    json rj = {{"index", j},
               {"directory", name},
               {sweep.parameter, r.value},
               {"config_hash", hash_hex(r.config_hash)},
               {"status", to_string(r.trajectory.status)},
               {"bound_ok", r.bound_ok},
               {"bounds", bounds_json(r.bounds)}};
    if (!r.trajectory.records.empty()) rj["final"] = record_json(r.trajectory.records.back());
    rungs.push_back(rj);
  }
  json report = {{"parameter", sweep.parameter},
                 {"ladder", sweep.ladder},
                 {"dt", sweep.dt},
                 {"stride", sweep.stride},
                 {"deltas", sweep.deltas},
                 {"deltas_decreasing", sweep.deltas_decreasing()},
                 {"bounds_ok", sweep.bounds_ok()},
                 {"rungs", rungs}};
  write_json(dir / "sweep_report.json", report);
}

void write_relaxation_outputs(const RelaxationReport& rep, const fs::path& dir) {
  write_outputs(rep.trajectory, dir);
  json j = {{"M", rep.m},
            {"c_M", rep.c_m},
            {"lambda_star", rep.lambda_star},
            {"C_P_domain", rep.c_p_domain},
            {"certified_rate", rep.certified_rate},
            {"fitted_rate", rep.fit.rate},
            {"fit_residual", rep.fit.residual},
            {"fit_points", rep.fit.points},
            {"worst_ratio", number_json(rep.worst_ratio)},
            {"bound_satisfied", rep.bound_satisfied},
            {"rate_satisfied", rep.rate_satisfied}};
  write_json(dir / "relaxation_report.json", j);
}

}  // namespace nlk
