#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swarm/experiments.hpp"

namespace swarm {

namespace {

// Minimal TOML-subset value: scalar token, quoted string, [..] array or
// one level of nested arrays.
struct TomlValue {
  enum class Kind { scalar, string, array, array2 } kind = Kind::scalar;
  std::string token;  // scalar: raw token; string: unquoted content
  std::vector<double> array;
  std::vector<std::vector<double>> array2;
};

class Cursor {
 public:
  explicit Cursor(const std::string& s) : s_(s) {}
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char take() { return s_[pos_++]; }
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("config parse error: " + why + " in '" + s_ + "'");
  }

  std::string take_until(const std::string& stops) {
    std::string out;
    while (!done() && stops.find(s_[pos_]) == std::string::npos) out += s_[pos_++];
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
    return out;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

double parse_number(const std::string& token, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: expected a number for '" + where + "', got '" + token + "'");
  }
}

std::vector<double> parse_number_list(Cursor& c) {
  std::vector<double> out;
  c.skip_ws();
  if (c.done() || c.peek() != '[') c.fail("expected '['");
  c.take();
  while (true) {
    c.skip_ws();
    if (c.done()) c.fail("unterminated array");
    if (c.peek() == ']') {
      c.take();
      break;
    }
    const std::string tok = c.take_until(",]");
    out.push_back(parse_number(tok, "array element"));
    c.skip_ws();
    if (!c.done() && c.peek() == ',') c.take();
  }
  return out;
}

TomlValue parse_value(Cursor& c) {
  TomlValue v;
  c.skip_ws();
  if (c.done()) c.fail("missing value");
  if (c.peek() == '"') {
    c.take();
    v.kind = TomlValue::Kind::string;
    while (!c.done() && c.peek() != '"') v.token += c.take();
    if (c.done()) c.fail("unterminated string");
    c.take();
    return v;
  }
  if (c.peek() == '[') {
    // peek one further to distinguish [[..],[..]] from [..]
    c.take();
    c.skip_ws();
    if (!c.done() && c.peek() == '[') {
      v.kind = TomlValue::Kind::array2;
      while (true) {
        c.skip_ws();
        if (c.done()) c.fail("unterminated array");
        if (c.peek() == ']') {
          c.take();
          break;
        }
        v.array2.push_back(parse_number_list(c));
        c.skip_ws();
        if (!c.done() && c.peek() == ',') c.take();
      }
      return v;
    }
    v.kind = TomlValue::Kind::array;
    while (true) {
      c.skip_ws();
      if (c.done()) c.fail("unterminated array");
      if (c.peek() == ']') {
        c.take();
        break;
      }
      const std::string tok = c.take_until(",]");
      v.array.push_back(parse_number(tok, "array element"));
      c.skip_ws();
      if (!c.done() && c.peek() == ',') c.take();
    }
    return v;
  }
  v.kind = TomlValue::Kind::scalar;
  v.token = c.take_until(",}");
  if (v.token.empty()) c.fail("missing value");
  return v;
}

using KeyValues = std::map<std::string, TomlValue>;

// `key = value`, `a.b = value`, or `key = { a = v, b = v }` flattened to
// dotted keys. '#' starts a comment.
void parse_line(const std::string& raw, KeyValues& out) {
  std::string line = raw;
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) {
      line.resize(i);
      break;
    }
  }
  Cursor c(line);
  c.skip_ws();
  if (c.done()) return;
  const std::string key = c.take_until("=");
  if (c.done()) c.fail("expected '='");
  c.take();
  c.skip_ws();
  if (key.empty()) c.fail("missing key");
  if (!c.done() && c.peek() == '{') {
    c.take();
    while (true) {
      c.skip_ws();
      if (c.done()) c.fail("unterminated inline table");
      if (c.peek() == '}') {
        c.take();
        break;
      }
      const std::string sub = c.take_until("=");
      if (c.done()) c.fail("expected '=' in inline table");
      c.take();
      out[key + "." + sub] = parse_value(c);
      c.skip_ws();
      if (!c.done() && c.peek() == ',') c.take();
    }
    return;
  }
  out[key] = parse_value(c);
}

class ConfigReader {
 public:
  explicit ConfigReader(KeyValues kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    auto it = take(key);
    if (!it) return fallback;
    if (it->kind != TomlValue::Kind::string && it->kind != TomlValue::Kind::scalar)
      throw ConfigError("config: '" + key + "' must be a string");
    return it->token;
  }
  double get_number(const std::string& key, double fallback) {
    auto it = take(key);
    if (!it) return fallback;
    return parse_number(it->token, key);
  }
  long get_integer(const std::string& key, long fallback) {
    auto it = take(key);
    if (!it) return fallback;
    const double v = parse_number(it->token, key);
    const long n = std::lround(v);
    if (v != static_cast<double>(n)) throw ConfigError("config: '" + key + "' must be an integer");
    return n;
  }
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
    auto it = take(key);
    if (!it) return fallback;
    try {
      return std::stoull(it->token);
    } catch (const std::exception&) {
      throw ConfigError("config: '" + key + "' must be a nonnegative integer");
    }
  }
  std::vector<std::vector<double>> get_array2(const std::string& key) {
    auto it = take(key);
    if (!it) return {};
    if (it->kind == TomlValue::Kind::array2) return it->array2;
    if (it->kind == TomlValue::Kind::array) return {it->array};
    throw ConfigError("config: '" + key + "' must be an array");
  }

  void finish() const {
    if (!kv_.empty())
      throw ConfigError("config: unknown key '" + kv_.begin()->first + "'");
  }

 private:
  std::optional<TomlValue> take(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    TomlValue v = it->second;
    kv_.erase(it);
    return v;
  }
  KeyValues kv_;
};

CoolingSchedule schedule_from(ConfigReader& r, const CoolingSchedule& fallback) {
  if (!r.has("schedule.kind")) return fallback;
  const std::string kind = r.get_string("schedule.kind", "");
  const double beta0 = r.get_number("schedule.beta0", 1.0);
  const double rate = r.get_number("schedule.rate", 0.0);
  if (kind == "constant") return CoolingSchedule::constant(beta0);
  if (kind == "linear") return CoolingSchedule::linear(beta0, rate);
  if (kind == "quadratic") return CoolingSchedule::quadratic(beta0, rate);
  if (kind == "custom-polynomial" || kind == "custom_polynomial")
    return CoolingSchedule::polynomial(beta0, rate, static_cast<int>(r.get_integer(
                                                        "schedule.exponent", 1)));
  throw ConfigError("config: unknown schedule kind '" + kind + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) parse_line(line, kv);

  ConfigReader r(std::move(kv));
  RunConfig cfg;
  cfg.method = r.get_string("method", cfg.method);
  cfg.potential = r.get_string("potential", cfg.potential);
  cfg.schedule = schedule_from(r, cfg.schedule);
  if (r.has("schedule.exponent")) r.get_integer("schedule.exponent", 0);  // consumed for non-poly
  cfg.m = r.get_number("m", cfg.m);
  cfg.kappa = static_cast<int>(r.get_integer("kappa", cfg.kappa));
  cfg.n_particles = r.get_integer("n_particles", cfg.n_particles);
  cfg.n_runs = r.get_integer("n_runs", cfg.n_runs);
  cfg.dt = r.get_number("dt", cfg.dt);
  cfg.k = static_cast<int>(r.get_integer("k", cfg.k));
  cfg.T = r.get_number("T", cfg.T);
  cfg.noise_factor = r.get_number("noise_factor", cfg.noise_factor);
  cfg.seed = r.get_u64("seed", cfg.seed);
  cfg.out_dir = r.get_string("out", cfg.out_dir);
  cfg.record_every = static_cast<int>(r.get_integer("record_every", cfg.record_every));
  cfg.c_tol = r.get_number("c_tol", cfg.c_tol);
  cfg.c_bracket_expansions =
      static_cast<int>(r.get_integer("c_bracket_expansions", cfg.c_bracket_expansions));
  cfg.ot_tolerance = r.get_number("ot_tolerance", cfg.ot_tolerance);
  cfg.workers = static_cast<int>(r.get_integer("workers", cfg.workers));

  cfg.init.kind = r.get_string("init.kind", cfg.init.kind);
  cfg.init.burn_in_steps = r.get_integer("init.burn_in_steps", cfg.init.burn_in_steps);
  cfg.init.burn_in_dt = r.get_number("init.burn_in_dt", cfg.init.burn_in_dt);
  cfg.init.beta0 = r.get_number("init.beta0", cfg.init.beta0);
  cfg.init.cov_scale = r.get_number("init.cov_scale", cfg.init.cov_scale);
  cfg.init.file = r.get_string("init.file", cfg.init.file);
  cfg.init.subset_size = r.get_integer("init.subset_size", cfg.init.subset_size);
  cfg.init.reference_n = r.get_integer("init.reference_n", cfg.init.reference_n);
  cfg.init.reference_seed = r.get_u64("init.reference_seed", cfg.init.reference_seed);
  for (const auto& row : r.get_array2("init.centers")) {
    Eigen::VectorXd c(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) c[static_cast<Eigen::Index>(i)] = row[i];
    cfg.init.centers.push_back(std::move(c));
  }
  r.finish();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// --- CSV ------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void write_trajectory_csv(const std::string& path, long run_index, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  const Eigen::Index d = traj.snapshots.empty() ? 0 : traj.snapshots.front().positions.cols();
  out << "run,t,particle";
  for (Eigen::Index j = 0; j < d; ++j) out << ",x" << (j + 1);
  out << ",C\n";
  for (const Snapshot& s : traj.snapshots)
    for (Eigen::Index i = 0; i < s.positions.rows(); ++i) {
      out << run_index << ',' << s.t << ',' << i;
      for (Eigen::Index j = 0; j < d; ++j) out << ',' << s.positions(i, j);
      out << ',' << s.C << '\n';
    }
}

Trajectory read_trajectory_csv(const std::string& path, const Potential& pot) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file: " + path);
  const auto header = split_csv(line);
  const int d = static_cast<int>(header.size()) - 4;
  if (d < 1) throw std::runtime_error("malformed trajectory header in " + path);

  Trajectory traj;
  std::vector<Eigen::RowVectorXd> rows;
  double cur_t = 0.0, cur_c = 0.0;
  bool any = false;
  auto flush = [&]() {
    if (rows.empty()) return;
    Snapshot s;
    s.t = cur_t;
    s.C = cur_c;
    s.positions.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) s.positions.row(static_cast<Eigen::Index>(i)) = rows[i];
    traj.snapshots.push_back(std::move(s));
    rows.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (static_cast<int>(f.size()) != d + 4)
      throw std::runtime_error("malformed trajectory row in " + path);
    const double t = std::stod(f[1]);
    if (any && t != cur_t) flush();
    any = true;
    cur_t = t;
    cur_c = std::stod(f.back());
    Eigen::RowVectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = std::stod(f[3 + j]);
    rows.push_back(std::move(x));
  }
  flush();
  // rebuild the running-min summary from the recorded snapshots
  Eigen::VectorXd min_u;
  for (Snapshot& s : traj.snapshots) {
    const Eigen::VectorXd u = eval_rows(pot, s.positions);
    min_u = (min_u.size() == 0) ? u : min_u.cwiseMin(u).eval();
    s.min_u_so_far = min_u;
  }
  return traj;
}

void write_heatmap_csv(const std::string& path, const Heatmap& hm) {
  std::ofstream out = open_out(path);
  out << "t";
  for (Eigen::Index b = 0; b + 1 < hm.x_edges.size(); ++b)
    out << ",x" << hm.x_edges[b] << ':' << hm.x_edges[b + 1];
  out << '\n';
  for (Eigen::Index r = 0; r < hm.counts.rows(); ++r) {
    out << hm.t_values[r];
    for (Eigen::Index c = 0; c < hm.counts.cols(); ++c) out << ',' << hm.counts(r, c);
    out << '\n';
  }
}

void write_curve_csv(const std::string& path, const Curve& curve) {
  std::ofstream out = open_out(path);
  out << "t,median_min_u\n";
  for (Eigen::Index i = 0; i < curve.t.size(); ++i)
    out << curve.t[i] << ',' << curve.value[i] << '\n';
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<Trajectory>& trajectories) {
  std::ofstream out = open_out(path);
  out << "run,t,C,c_residual,plan_cost,ess\n";
  for (std::size_t r = 0; r < trajectories.size(); ++r)
    for (const Snapshot& s : trajectories[r].snapshots)
      out << r << ',' << s.t << ',' << s.C << ',' << s.c_residual << ',' << s.plan_cost << ','
          << s.ess << '\n';
}

void write_positions_csv(const std::string& path, const Eigen::MatrixXd& positions) {
  std::ofstream out = open_out(path);
  out << "particle";
  for (Eigen::Index j = 0; j < positions.cols(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < positions.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < positions.cols(); ++j) out << ',' << positions(i, j);
    out << '\n';
  }
}

Eigen::MatrixXd read_positions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty sample file: " + path);
  const int d = static_cast<int>(split_csv(line).size()) - 1;
  if (d < 1) throw std::runtime_error("malformed sample header in " + path);
  std::vector<Eigen::RowVectorXd> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (static_cast<int>(f.size()) != d + 1)
      throw std::runtime_error("malformed sample row in " + path);
    Eigen::RowVectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = std::stod(f[1 + j]);
    rows.push_back(std::move(x));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i];
  return out;
}

}  // namespace swarm
