#include "expcli/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace membrane::expcli {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

std::string join_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string ExperimentConfig::to_string() const {
  std::ostringstream os;
  os << "alpha = " << fmt_double(alpha) << "\n";
  os << "cache_dir = " << cache_dir << "\n";
  os << "cg_tol = " << fmt_double(cg_tol) << "\n";
  os << "d = " << d << "\n";
  os << "delta = " << fmt_double(delta) << "\n";
  os << "direct_threshold = " << direct_threshold << "\n";
  os << "epsilon = " << fmt_double(epsilon) << "\n";
  os << "eta = " << fmt_double(eta) << "\n";
  os << "experiment = " << experiment << "\n";
  os << "format = " << format << "\n";
  os << "fundamental_kmax = " << fundamental_kmax << "\n";
  os << "k_levels = " << k_levels << "\n";
  os << "max_diag_scan = " << max_diag_scan << "\n";
  os << "method = " << method << "\n";
  os << "n_list = " << join_int_list(n_list) << "\n";
  os << "obstacle_halfwidth = " << obstacle_halfwidth << "\n";
  os << "out_dir = " << out_dir << "\n";
  os << "replicas = " << replicas << "\n";
  os << "sample_cg_tol = " << fmt_double(sample_cg_tol) << "\n";
  os << "seed = " << seed << "\n";
  os << "threads = " << threads << "\n";
  os << "tilt_a = " << fmt_double(tilt_a) << "\n";
  return os.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected `key = value`");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));

    if (key == "experiment") cfg.experiment = value;
    else if (key == "d") cfg.d = std::stoi(value);
    else if (key == "n_list") cfg.n_list = parse_int_list(value);
    else if (key == "delta") cfg.delta = std::stod(value);
    else if (key == "alpha") cfg.alpha = std::stod(value);
    else if (key == "k_levels") cfg.k_levels = std::stoi(value);
    else if (key == "epsilon") cfg.epsilon = std::stod(value);
    else if (key == "eta") cfg.eta = std::stod(value);
    else if (key == "tilt_a") cfg.tilt_a = std::stod(value);
    else if (key == "replicas") cfg.replicas = std::stoll(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "obstacle_halfwidth") cfg.obstacle_halfwidth = std::stoi(value);
    else if (key == "method") cfg.method = value;
    else if (key == "direct_threshold") cfg.direct_threshold = std::stoll(value);
    else if (key == "cg_tol") cfg.cg_tol = std::stod(value);
    else if (key == "sample_cg_tol") cfg.sample_cg_tol = std::stod(value);
    else if (key == "max_diag_scan") cfg.max_diag_scan = std::stoi(value);
    else if (key == "fundamental_kmax") cfg.fundamental_kmax = std::stoi(value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "cache_dir") cfg.cache_dir = value;
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "format") cfg.format = value;
    else
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key `" + key + "`");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (d < 1 || d > 8) fail("d must lie in [1, 8]");
  if (n_list.empty()) fail("n_list must not be empty");
  for (int n : n_list)
    if (n < 0) fail("n_list entries must be >= 0");
  if (!(delta > 0.0 && delta < 0.5)) fail("delta must lie in (0, 1/2)");
  if (!(alpha > 0.5 && alpha < 1.0)) fail("alpha must lie in (1/2, 1)");
  if (k_levels < 1) fail("k_levels must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) fail("epsilon must lie in (0, 1/2)");
  if (!(eta > 0.0 && eta < 1.0)) fail("eta must lie in (0, 1)");
  if (replicas < 1) fail("replicas must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
  if (method != "auto" && method != "exact" && method != "normal")
    fail("method must be auto, exact or normal");
  if (format != "csv" && format != "json") fail("format must be csv or json");
  if (fundamental_kmax < 1) fail("fundamental_kmax must be >= 1");
}

}  // namespace membrane::expcli
