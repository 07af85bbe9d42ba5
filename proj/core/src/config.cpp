#include "rissim/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace rissim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct ParsedFile {
  // section -> key -> value, insertion order not preserved (serialization
  // writes a canonical order of its own).
  std::map<std::string, std::map<std::string, std::string>> sections;
};

ParsedFile tokenize(const std::string& text) {
  ParsedFile file;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": empty section name");
      }
      file.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    if (section.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": key outside any [section]");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    file.sections[section][key] = value;
  }
  return file;
}

// Typed access that records which keys were consumed so leftovers can be
// reported as unknown.
class SectionReader {
 public:
  SectionReader(const std::string& name, const std::map<std::string, std::string>& kv)
      : name_(name), kv_(kv) {}

  template <typename Fn>
  void with(const std::string& key, Fn&& fn) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return;
    consumed_.push_back(key);
    try {
      fn(it->second);
    } catch (const std::exception& e) {
      throw std::invalid_argument("config [" + name_ + "] " + key + ": " + e.what());
    }
  }

  void finish() const {
    for (const auto& [key, value] : kv_) {
      bool seen = false;
      for (const auto& c : consumed_) {
        if (c == key) { seen = true; break; }
      }
      if (!seen) {
        throw std::invalid_argument("config [" + name_ + "]: unknown key '" + key + "'");
      }
    }
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>& kv_;
  std::vector<std::string> consumed_;
};

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in number '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in integer '" + s + "'");
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in integer '" + s + "'");
  return static_cast<std::uint64_t>(v);
}

Vec3 to_vec3(const std::string& s) {
  std::istringstream in(s);
  Vec3 v;
  if (!(in >> v.x() >> v.y() >> v.z())) throw std::invalid_argument("expected three numbers");
  std::string rest;
  if (in >> rest) throw std::invalid_argument("expected exactly three numbers");
  return v;
}

std::vector<int> to_int_list(const std::string& s) {
  std::istringstream in(s);
  std::vector<int> out;
  int v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw std::invalid_argument("expected a list of integers");
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec3(const Vec3& v) {
  return fmt_double(v.x()) + " " + fmt_double(v.y()) + " " + fmt_double(v.z());
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig default_paper_config() {
  ExperimentConfig cfg;  // struct defaults carry the published parameters
  cfg.agent.rl.episodes = 1000;
  return cfg;
}

ExperimentConfig desk_scale_config() {
  ExperimentConfig cfg;
  cfg.scenario.m = 4;
  cfg.scenario.n = 16;
  cfg.scenario.k = 4;
  cfg.agent.rl.episodes = 300;
  cfg.agent.net.actor_hidden = {64, 64};
  cfg.agent.net.critic_hidden = {64, 64};
  cfg.run.n_mc = 500;
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  const auto& sc = cfg.scenario;
  if (sc.m < 1 || sc.n < 1 || sc.k < 1 || sc.i_paths < 1) {
    throw std::invalid_argument("config: antenna/element/user/path counts must be >= 1");
  }
  if (sc.p_t <= 0.0) throw std::invalid_argument("config: p_t must be > 0");
  if (sc.t_ccti < 1) throw std::invalid_argument("config: t_ccti must be >= 1");
  if (sc.tau_c < 1) throw std::invalid_argument("config: tau_c must be >= 1");
  if (sc.user_disk_radius <= 0.0) throw std::invalid_argument("config: disk radius must be > 0");
  if (sc.rician.delta < 0.0 || sc.rician.epsilon < 0.0 || sc.rician.eta < 0.0) {
    throw std::invalid_argument("config: Rician factors must be >= 0");
  }
  if (cfg.pathloss.d0 <= 0.0) throw std::invalid_argument("config: d0 must be > 0");
  if (cfg.pathloss.bandwidth_hz <= 0.0) throw std::invalid_argument("config: bandwidth must be > 0");
  if (cfg.pathloss.alpha_bs_ris < 1.0 || cfg.pathloss.alpha_ris_user < 1.0 ||
      cfg.pathloss.alpha_bs_user < 1.0) {
    throw std::invalid_argument("config: path-loss exponents must be >= 1");
  }
  const auto& rl = cfg.agent.rl;
  if (rl.gamma < 0.0 || rl.gamma > 1.0) throw std::invalid_argument("config: gamma out of [0,1]");
  if (rl.batch_size < 1 || static_cast<std::size_t>(rl.batch_size) > rl.replay_capacity) {
    throw std::invalid_argument("config: batch_size out of [1, replay_capacity]");
  }
  if (rl.eta <= 0.0 || rl.eta > 1.0) throw std::invalid_argument("config: eta out of (0,1]");
  if (rl.noise_decay <= 0.0 || rl.noise_decay > 1.0) {
    throw std::invalid_argument("config: noise_decay out of (0,1]");
  }
  if (rl.episodes < 1) throw std::invalid_argument("config: episodes must be >= 1");
  if (cfg.agent.smooth_weight < 0.0 || cfg.agent.smooth_weight >= 1.0) {
    throw std::invalid_argument("config: smooth_weight out of [0,1)");
  }
  for (int d : cfg.agent.net.actor_hidden) {
    if (d < 1) throw std::invalid_argument("config: actor hidden dims must be >= 1");
  }
  for (int d : cfg.agent.net.critic_hidden) {
    if (d < 1) throw std::invalid_argument("config: critic hidden dims must be >= 1");
  }
  if (cfg.agent.net.actor_lr <= 0.0 || cfg.agent.net.critic_lr <= 0.0) {
    throw std::invalid_argument("config: learning rates must be > 0");
  }
  if (cfg.baseline.iterations < 0 || cfg.baseline.candidates_per_iter < 1) {
    throw std::invalid_argument("config: baseline counts invalid");
  }
  if (cfg.run.n_mc < 1) throw std::invalid_argument("config: n_mc must be >= 1");
}

ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base) {
  const ParsedFile file = tokenize(text);
  ExperimentConfig cfg = base;

  for (const auto& [section, kv] : file.sections) {
    SectionReader reader(section, kv);
    if (section == "scenario") {
      auto& sc = cfg.scenario;
      reader.with("bs_position", [&](const std::string& v) { sc.bs_position = to_vec3(v); });
      reader.with("ris_position", [&](const std::string& v) { sc.ris_position = to_vec3(v); });
      reader.with("user_disk_center", [&](const std::string& v) { sc.user_disk_center = to_vec3(v); });
      reader.with("user_disk_radius", [&](const std::string& v) { sc.user_disk_radius = to_double(v); });
      reader.with("m", [&](const std::string& v) { sc.m = to_int(v); });
      reader.with("n", [&](const std::string& v) { sc.n = to_int(v); });
      reader.with("k", [&](const std::string& v) { sc.k = to_int(v); });
      reader.with("i_paths", [&](const std::string& v) { sc.i_paths = to_int(v); });
      reader.with("p_t", [&](const std::string& v) { sc.p_t = to_double(v); });
      reader.with("delta", [&](const std::string& v) { sc.rician.delta = to_double(v); });
      reader.with("epsilon", [&](const std::string& v) { sc.rician.epsilon = to_double(v); });
      reader.with("eta", [&](const std::string& v) { sc.rician.eta = to_double(v); });
      reader.with("t_ccti", [&](const std::string& v) { sc.t_ccti = to_int(v); });
      reader.with("tau_c", [&](const std::string& v) { sc.tau_c = to_int(v); });
    } else if (section == "pathloss") {
      auto& pl = cfg.pathloss;
      reader.with("pl0_db", [&](const std::string& v) { pl.pl0_db = to_double(v); });
      reader.with("d0", [&](const std::string& v) { pl.d0 = to_double(v); });
      reader.with("alpha_bs_ris", [&](const std::string& v) { pl.alpha_bs_ris = to_double(v); });
      reader.with("alpha_ris_user", [&](const std::string& v) { pl.alpha_ris_user = to_double(v); });
      reader.with("alpha_bs_user", [&](const std::string& v) { pl.alpha_bs_user = to_double(v); });
      reader.with("noise_density_dbm_hz",
                  [&](const std::string& v) { pl.noise_density_dbm_hz = to_double(v); });
      reader.with("bandwidth_hz", [&](const std::string& v) { pl.bandwidth_hz = to_double(v); });
    } else if (section == "agent") {
      auto& ag = cfg.agent;
      reader.with("gamma", [&](const std::string& v) { ag.rl.gamma = to_double(v); });
      reader.with("replay_capacity",
                  [&](const std::string& v) { ag.rl.replay_capacity = to_u64(v); });
      reader.with("batch_size", [&](const std::string& v) { ag.rl.batch_size = to_int(v); });
      reader.with("eta", [&](const std::string& v) { ag.rl.eta = to_double(v); });
      reader.with("noise_scale", [&](const std::string& v) { ag.rl.noise_scale = to_double(v); });
      reader.with("noise_decay", [&](const std::string& v) { ag.rl.noise_decay = to_double(v); });
      reader.with("steps_per_episode",
                  [&](const std::string& v) { ag.rl.steps_per_episode = to_int(v); });
      reader.with("learning_start",
                  [&](const std::string& v) { ag.rl.learning_start = to_int(v); });
      reader.with("episodes", [&](const std::string& v) { ag.rl.episodes = to_int(v); });
      reader.with("actor_hidden", [&](const std::string& v) { ag.net.actor_hidden = to_int_list(v); });
      reader.with("critic_hidden",
                  [&](const std::string& v) { ag.net.critic_hidden = to_int_list(v); });
      reader.with("actor_lr", [&](const std::string& v) { ag.net.actor_lr = to_double(v); });
      reader.with("critic_lr", [&](const std::string& v) { ag.net.critic_lr = to_double(v); });
      reader.with("smooth_weight", [&](const std::string& v) { ag.smooth_weight = to_double(v); });
    } else if (section == "baseline") {
      auto& bl = cfg.baseline;
      reader.with("iterations", [&](const std::string& v) { bl.iterations = to_int(v); });
      reader.with("candidates_per_iter",
                  [&](const std::string& v) { bl.candidates_per_iter = to_int(v); });
      reader.with("phase_step", [&](const std::string& v) { bl.phase_step = to_double(v); });
      reader.with("precoder_rule", [&](const std::string& v) {
        if (v == "matched-filter") {
          bl.precoder_rule = PrecoderRule::kMatchedFilter;
        } else if (v == "random-refine") {
          bl.precoder_rule = PrecoderRule::kRandomRefine;
        } else {
          throw std::invalid_argument("expected matched-filter or random-refine");
        }
      });
    } else if (section == "run") {
      auto& run = cfg.run;
      reader.with("master_seed", [&](const std::string& v) { run.master_seed = to_u64(v); });
      reader.with("out_dir", [&](const std::string& v) { run.out_dir = v; });
      reader.with("n_mc", [&](const std::string& v) { run.n_mc = to_int(v); });
    } else {
      throw std::invalid_argument("config: unknown section [" + section + "]");
    }
    reader.finish();
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  const ExperimentConfig& base) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_config(buffer.str(), base);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto& sc = cfg.scenario;
  out << "[scenario]\n";
  out << "bs_position = " << fmt_vec3(sc.bs_position) << "\n";
  out << "ris_position = " << fmt_vec3(sc.ris_position) << "\n";
  out << "user_disk_center = " << fmt_vec3(sc.user_disk_center) << "\n";
  out << "user_disk_radius = " << fmt_double(sc.user_disk_radius) << "\n";
  out << "m = " << sc.m << "\n";
  out << "n = " << sc.n << "\n";
  out << "k = " << sc.k << "\n";
  out << "i_paths = " << sc.i_paths << "\n";
  out << "p_t = " << fmt_double(sc.p_t) << "\n";
  out << "delta = " << fmt_double(sc.rician.delta) << "\n";
  out << "epsilon = " << fmt_double(sc.rician.epsilon) << "\n";
  out << "eta = " << fmt_double(sc.rician.eta) << "\n";
  out << "t_ccti = " << sc.t_ccti << "\n";
  out << "tau_c = " << sc.tau_c << "\n";

  const auto& pl = cfg.pathloss;
  out << "\n[pathloss]\n";
  out << "pl0_db = " << fmt_double(pl.pl0_db) << "\n";
  out << "d0 = " << fmt_double(pl.d0) << "\n";
  out << "alpha_bs_ris = " << fmt_double(pl.alpha_bs_ris) << "\n";
  out << "alpha_ris_user = " << fmt_double(pl.alpha_ris_user) << "\n";
  out << "alpha_bs_user = " << fmt_double(pl.alpha_bs_user) << "\n";
  out << "noise_density_dbm_hz = " << fmt_double(pl.noise_density_dbm_hz) << "\n";
  out << "bandwidth_hz = " << fmt_double(pl.bandwidth_hz) << "\n";

  const auto& ag = cfg.agent;
  out << "\n[agent]\n";
  out << "gamma = " << fmt_double(ag.rl.gamma) << "\n";
  out << "replay_capacity = " << ag.rl.replay_capacity << "\n";
  out << "batch_size = " << ag.rl.batch_size << "\n";
  out << "eta = " << fmt_double(ag.rl.eta) << "\n";
  out << "noise_scale = " << fmt_double(ag.rl.noise_scale) << "\n";
  out << "noise_decay = " << fmt_double(ag.rl.noise_decay) << "\n";
  out << "steps_per_episode = " << ag.rl.steps_per_episode << "\n";
  out << "learning_start = " << ag.rl.learning_start << "\n";
  out << "episodes = " << ag.rl.episodes << "\n";
  out << "actor_hidden = " << fmt_int_list(ag.net.actor_hidden) << "\n";
  out << "critic_hidden = " << fmt_int_list(ag.net.critic_hidden) << "\n";
  out << "actor_lr = " << fmt_double(ag.net.actor_lr) << "\n";
  out << "critic_lr = " << fmt_double(ag.net.critic_lr) << "\n";
  out << "smooth_weight = " << fmt_double(ag.smooth_weight) << "\n";

  const auto& bl = cfg.baseline;
  out << "\n[baseline]\n";
  out << "iterations = " << bl.iterations << "\n";
  out << "candidates_per_iter = " << bl.candidates_per_iter << "\n";
  out << "phase_step = " << fmt_double(bl.phase_step) << "\n";
  out << "precoder_rule = "
      << (bl.precoder_rule == PrecoderRule::kMatchedFilter ? "matched-filter" : "random-refine")
      << "\n";

  const auto& run = cfg.run;
  out << "\n[run]\n";
  out << "master_seed = " << run.master_seed << "\n";
  out << "out_dir = " << run.out_dir << "\n";
  out << "n_mc = " << run.n_mc << "\n";
  return out.str();
}

}  // namespace rissim
