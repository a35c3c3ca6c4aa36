#include "magnls/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace magnls {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw std::invalid_argument("config key '" + key + "' = '" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, v, "not a number");
  return out;
}

long to_int(const std::string& key, const std::string& v) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, v, "not an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "expected true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) bad(key, v, "empty list");
  return out;
}

struct Pending {
  std::string potential = "harmonic";
  double kappa = 1.0;
  double potential_amplitude = 1.0;
  std::vector<double> table;
};

using Setter = std::function<void(LabConfig&, Pending&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model",
       [](LabConfig& c, Pending&, const std::string& k, const std::string& v) {
         if (v == "eps_nls") c.sim.model = ModelKind::eps_nls;
         else if (v == "limit_nls") c.sim.model = ModelKind::limit_nls;
         else bad(k, v, "expected eps_nls or limit_nls");
       }},
      {"epsilon", [](LabConfig& c, Pending&, auto& k, auto& v) { c.sim.epsilon = to_double(k, v); }},
      {"sigma",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         const long s = to_int(k, v);
         if (s < 1 || s > 4) bad(k, v, "supported set is {1, 2, 3, 4}");
         c.sim.sigma = static_cast<int>(s);
       }},
      {"lambda",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         const double l = to_double(k, v);
         if (l != 1.0 && l != -1.0) bad(k, v, "expected +1 or -1");
         c.sim.lambda = l;
       }},
      {"dt",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         c.sim.dt = to_double(k, v);
         c.dt_given = true;
       }},
      {"T", [](LabConfig& c, Pending&, auto& k, auto& v) { c.sim.t_final = to_double(k, v); }},
      {"cutoff",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         c.sim.cutoff_degree = static_cast<int>(to_int(k, v));
       }},
      {"nodes",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         c.sim.node_count = static_cast<int>(to_int(k, v));
       }},
      {"N_z",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         c.sim.axial_points = static_cast<int>(to_int(k, v));
       }},
      {"L_z", [](LabConfig& c, Pending&, auto& k, auto& v) { c.sim.axial_length = to_double(k, v); }},
      {"N_theta",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         c.sim.n_theta = static_cast<int>(to_int(k, v));
       }},
      {"potential",
       [](LabConfig&, Pending& p, auto& k, auto& v) {
         if (v != "zero" && v != "harmonic" && v != "cosine" && v != "tabulated") {
           bad(k, v, "expected zero, harmonic, cosine or tabulated");
         }
         p.potential = v;
       }},
      {"kappa", [](LabConfig&, Pending& p, auto& k, auto& v) { p.kappa = to_double(k, v); }},
      {"potential_amplitude",
       [](LabConfig&, Pending& p, auto& k, auto& v) { p.potential_amplitude = to_double(k, v); }},
      {"potential_table",
       [](LabConfig&, Pending& p, auto& k, auto& v) { p.table = to_list(k, v); }},
      {"data",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         if (v == "g1") c.sim.initial.kind = InitialDataSpec::Kind::g1;
         else if (v == "g2") c.sim.initial.kind = InitialDataSpec::Kind::g2;
         else if (v == "g3") c.sim.initial.kind = InitialDataSpec::Kind::g3;
         else bad(k, v, "expected g1, g2 or g3");
       }},
      {"data_amplitude",
       [](LabConfig& c, Pending&, auto& k, auto& v) { c.sim.initial.amplitude = to_double(k, v); }},
      {"z_width",
       [](LabConfig& c, Pending&, auto& k, auto& v) { c.sim.initial.z_width = to_double(k, v); }},
      {"seed",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         const long s = to_int(k, v);
         if (s < 0) bad(k, v, "must be >= 0");
         c.sim.initial.seed = static_cast<std::uint64_t>(s);
       }},
      {"stride",
       [](LabConfig& c, Pending&, auto& k, auto& v) {
         c.sim.sample_stride = static_cast<int>(to_int(k, v));
       }},
      {"epsilons", [](LabConfig& c, Pending&, auto& k, auto& v) { c.epsilons = to_list(k, v); }},
      {"reference_dt",
       [](LabConfig& c, Pending&, auto& k, auto& v) { c.reference_dt = to_double(k, v); }},
      {"sample_interval",
       [](LabConfig& c, Pending&, auto& k, auto& v) { c.sample_interval = to_double(k, v); }},
      {"mu", [](LabConfig& c, Pending&, auto& k, auto& v) { c.mus = to_list(k, v); }},
      {"commutation_time",
       [](LabConfig& c, Pending&, auto& k, auto& v) { c.commutation_time = to_double(k, v); }},
      {"allow_interpolation",
       [](LabConfig& c, Pending&, auto& k, auto& v) { c.allow_interpolation = to_bool(k, v); }},
      {"scatter_delta",
       [](LabConfig& c, Pending&, auto& k, auto& v) { c.scatter_delta = to_double(k, v); }},
      {"scatter_time",
       [](LabConfig& c, Pending&, auto& k, auto& v) { c.scatter_time = to_double(k, v); }},
  };
  return table;
}

}  // namespace

LabConfig parse_config(const std::string& text) {
  LabConfig cfg;
  Pending pending;
  bool epsilon_given = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": malformed section header");
      }
      continue;
    }
    // "k = v" is accepted: squeeze the blanks around '=' before splitting.
    line = std::regex_replace(line, std::regex("\\s*=\\s*"), "=");
    line = std::regex_replace(line, std::regex("\\s*,\\s*"), ",");
    std::istringstream tokens(line);
    std::string pair;
    while (tokens >> pair) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": expected key=value, got '" + pair + "'");
      }
      const std::string key = pair.substr(0, eq);
      const std::string value = pair.substr(eq + 1);
      const auto it = setters().find(key);
      if (it == setters().end()) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" +
                                    key + "'");
      }
      it->second(cfg, pending, key, value);
      if (key == "epsilon") epsilon_given = true;
    }
  }

  if (pending.potential == "zero") cfg.sim.potential = PotentialSpec::zero();
  else if (pending.potential == "harmonic") cfg.sim.potential = PotentialSpec::harmonic(pending.kappa);
  else if (pending.potential == "cosine")
    cfg.sim.potential = PotentialSpec::cosine(pending.potential_amplitude, pending.kappa);
  else cfg.sim.potential = PotentialSpec::tabulated(pending.table);
  if (pending.potential == "tabulated" &&
      static_cast<int>(pending.table.size()) != cfg.sim.axial_points) {
    throw std::invalid_argument("config key 'potential_table': " +
                                std::to_string(pending.table.size()) + " samples, N_z is " +
                                std::to_string(cfg.sim.axial_points));
  }

  if (cfg.sim.model == ModelKind::eps_nls && !epsilon_given) {
    throw std::invalid_argument("config key 'epsilon' is required for model=eps_nls");
  }
  if (!cfg.dt_given) {
    cfg.sim.dt = cfg.sim.model == ModelKind::eps_nls ? cfg.sim.epsilon * cfg.sim.epsilon / 20.0
                                                     : 1e-3;
  }
  const int n = cfg.sim.axial_points;
  if (n < 8 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("config key 'N_z': must be a power of two >= 8");
  }
  if (!(cfg.sim.axial_length > 0)) throw std::invalid_argument("config key 'L_z': must be > 0");
  for (double e : cfg.epsilons) {
    if (!(e > 0)) throw std::invalid_argument("config key 'epsilons': values must be > 0");
  }
  for (double m : cfg.mus) {
    if (!(m > 0)) throw std::invalid_argument("config key 'mu': values must be > 0");
  }
  if (!(cfg.reference_dt > 0)) throw std::invalid_argument("config key 'reference_dt': must be > 0");
  if (!(cfg.sample_interval > 0)) {
    throw std::invalid_argument("config key 'sample_interval': must be > 0");
  }
  if (!(cfg.scatter_delta > 0)) throw std::invalid_argument("config key 'scatter_delta': must be > 0");
  if (!(cfg.scatter_time > 0)) throw std::invalid_argument("config key 'scatter_time': must be > 0");
  cfg.sim.validate();
  return cfg;
}

LabConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const LabConfig& c) {
  std::ostringstream os;
  os.precision(17);
  const SimConfig& s = c.sim;
  os << "model=" << (s.model == ModelKind::eps_nls ? "eps_nls" : "limit_nls") << '\n'
     << "epsilon=" << s.epsilon << '\n'
     << "sigma=" << s.sigma << '\n'
     << "lambda=" << s.lambda << '\n'
     << "dt=" << s.dt << '\n'
     << "T=" << s.t_final << '\n'
     << "cutoff=" << s.cutoff_degree << '\n'
     << "nodes=" << s.node_count << '\n'
     << "N_z=" << s.axial_points << '\n'
     << "L_z=" << s.axial_length << '\n'
     << "N_theta=" << s.n_theta << '\n'
     << "potential=" << s.potential.describe() << '\n';
  for (double v : s.potential.table) os << "potential_sample=" << v << '\n';
  os << "data=g" << (static_cast<int>(s.initial.kind) + 1) << '\n'
     << "data_amplitude=" << s.initial.amplitude << '\n'
     << "z_width=" << s.initial.z_width << '\n'
     << "seed=" << s.initial.seed << '\n'
     << "stride=" << s.sample_stride << '\n';
  os << "epsilons=";
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) os << (i ? "," : "") << c.epsilons[i];
  os << "\nreference_dt=" << c.reference_dt << "\nsample_interval=" << c.sample_interval
     << "\nmu=";
  for (std::size_t i = 0; i < c.mus.size(); ++i) os << (i ? "," : "") << c.mus[i];
  os << "\ncommutation_time=" << c.commutation_time
     << "\nallow_interpolation=" << c.allow_interpolation
     << "\nscatter_delta=" << c.scatter_delta << "\nscatter_time=" << c.scatter_time << '\n';
  return os.str();
}

}  // namespace magnls
