#include "hesc/config.hpp"

#include "hesc/error.hpp"
#include "hesc/text.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hesc {
namespace {

using text::format_number;
using Setter = std::function<void(std::string_view)>;

double to_double(std::string_view key, std::string_view value) {
  const auto v = text::parse_double(value);
  if (!v) throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) + "' is not a number");
  return *v;
}

long long to_int(std::string_view key, std::string_view value) {
  const auto v = text::parse_int(value);
  if (!v) throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) + "' is not an integer");
  return *v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + std::string(key) + "': expected true or false");
}

std::string list_text(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + format_number(values[i]);
  return out;
}

std::map<std::string, std::map<std::string, Setter>> setters(ExperimentConfig& c, std::vector<PotentialTerm>& terms) {
  auto num = [](double& dst) {
    return [&dst](std::string_view v) {
      const auto x = text::parse_double(v);
      if (!x) throw ConfigError("'" + std::string(v) + "' is not a number");
      dst = *x;
    };
  };
  std::map<std::string, std::map<std::string, Setter>> s;
  s[""]["seed"] = [&](std::string_view v) {
    const auto x = text::parse_uint(v);
    if (!x) throw ConfigError("key 'seed': '" + std::string(v) + "' is not a nonnegative 64-bit integer");
    c.seed = *x;
  };
  s["grid"]["n"] = [&](std::string_view v) { c.grid.n = static_cast<int>(to_int("n", v)); };
  s["grid"]["L"] = num(c.grid.length);
  s["dispersion"]["kind"] = [&](std::string_view v) {
    try {
      c.dispersion.kind = parse_dispersion_kind(v);
    } catch (const Error&) {
      throw ConfigError("key 'kind': unknown dispersion '" + std::string(v) + "'");
    }
  };
  s["dispersion"]["mass"] = num(c.dispersion.mass);
  s["packet"]["envelope"] = [&](std::string_view v) {
    if (v == "gaussian")
      c.packet.envelope = Envelope::gaussian;
    else if (v == "bump")
      c.packet.envelope = Envelope::bump;
    else
      throw ConfigError("key 'envelope': expected gaussian or bump");
  };
  s["packet"]["width"] = num(c.packet.width);
  s["packet"]["center_x"] = num(c.packet.center.x);
  s["packet"]["center_y"] = num(c.packet.center.y);
  s["potential"]["term"] = [&](std::string_view v) {
    try {
      terms.push_back(parse_term(v));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("key 'term': ") + e.what());
    }
  };
  auto& sc = c.scattering;
  s["scattering"]["pbar"] = num(sc.pbar);
  s["scattering"]["angle"] = num(sc.angle);
  s["scattering"]["pbar_list"] = [&](std::string_view v) {
    sc.pbar_list.clear();
    for (auto item : text::split(v, ',')) sc.pbar_list.push_back(to_double("pbar_list", item));
  };
  s["scattering"]["r_initial"] = num(sc.r_initial);
  s["scattering"]["r_max"] = num(sc.r_max);
  s["scattering"]["epsilon"] = num(sc.epsilon);
  s["scattering"]["dr_max"] = num(sc.dr_max);
  s["scattering"]["dt"] = num(sc.dt);
  s["scattering"]["t_total"] = num(sc.t_total);
  s["scattering"]["safety"] = num(sc.safety);
  s["scattering"]["mask_threshold"] = num(sc.mask_threshold);
  s["scattering"]["dollard"] = [&](std::string_view v) { sc.dollard = to_bool("dollard", v); };
  auto& rc = c.reconstruction;
  s["reconstruction"]["angles"] = [&](std::string_view v) { rc.angles = static_cast<int>(to_int("angles", v)); };
  s["reconstruction"]["offsets"] = [&](std::string_view v) { rc.offsets = static_cast<int>(to_int("offsets", v)); };
  s["reconstruction"]["s_max"] = num(rc.s_max);
  s["reconstruction"]["roi_radius"] = num(rc.roi_radius);
  s["reconstruction"]["raster"] = [&](std::string_view v) { rc.raster = static_cast<int>(to_int("raster", v)); };
  s["reconstruction"]["eps_reg"] = num(rc.eps_reg);
  s["reconstruction"]["source"] = [&](std::string_view v) {
    if (v == "oracle")
      rc.source = Provenance::oracle;
    else if (v == "physics")
      rc.source = Provenance::physics;
    else
      throw ConfigError("key 'source': expected oracle or physics");
  };
  s["reconstruction"]["jitter"] = num(rc.jitter);
  return s;
}

void require(bool ok, std::string_view key, std::string_view what) {
  if (!ok) throw ConfigError("key '" + std::string(key) + "': " + std::string(what));
}

}  // namespace

ExperimentConfig parse_config(std::string_view input) {
  ExperimentConfig cfg;
  std::vector<PotentialTerm> terms;
  auto table = setters(cfg, terms);
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= input.size()) {
    const auto end = std::min(input.find('\n', start), input.size());
    std::string_view line = input.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      if (!table.count(section) || section.empty())
        throw ConfigError("unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    auto& keys = table[section];
    auto it = keys.find(key);
    if (it == keys.end())
      throw ConfigError("unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
    if (key != "term" && !seen.insert(section + "." + key).second)
      throw ConfigError("duplicate key '" + key + "'");
    try {
      it->second(value);
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.find("key '" + key + "'") != std::string::npos) throw;
      throw ConfigError("key '" + key + "': " + msg);
    }
  }
  cfg.potential = ScalarPotential(std::move(terms));
  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& c) {
  const int n = c.grid.n;
  require(n >= 2 && (n & (n - 1)) == 0, "n", "grid size must be a power of two");
  require(c.grid.length > 0.0, "L", "box length must be positive");
  require(c.dispersion.mass > 0.0, "mass", "mass must be positive");
  require(c.packet.width > 0.0, "width", "packet width must be positive");
  const auto& s = c.scattering;
  require(s.pbar > 0.0, "pbar", "boost magnitude must be positive");
  require(!s.pbar_list.empty(), "pbar_list", "list must not be empty");
  for (double p : s.pbar_list) require(p > 0.0, "pbar_list", "entries must be positive");
  require(s.r_initial >= 0.0, "r_initial", "must be nonnegative");
  require(s.r_max > 0.0, "r_max", "must be positive");
  require(s.epsilon > 0.0, "epsilon", "must be positive");
  require(s.dr_max > 0.0, "dr_max", "must be positive");
  require(s.dt >= 0.0, "dt", "must be nonnegative");
  require(s.safety >= 0.0 && s.safety < 0.5, "safety", "must lie in [0, 0.5)");
  require(s.mask_threshold > 0.0 && s.mask_threshold < 1.0, "mask_threshold", "must lie in (0, 1)");
  const auto& r = c.reconstruction;
  require(r.angles >= 2, "angles", "need at least two angles");
  require(r.offsets >= 2, "offsets", "need at least two offsets");
  require(r.s_max > 0.0, "s_max", "must be positive");
  require(r.roi_radius > 0.0 && r.roi_radius <= r.s_max, "roi_radius", "must be positive and at most s_max");
  require(r.raster >= 2, "raster", "must be at least 2");
  require(r.eps_reg > 0.0, "eps_reg", "must be positive");
  require(r.jitter >= 0.0, "jitter", "must be nonnegative");
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "seed = " << c.seed << "\n\n";
  os << "[grid]\nn = " << c.grid.n << "\nL = " << format_number(c.grid.length) << "\n\n";
  os << "[dispersion]\nkind = " << to_string(c.dispersion.kind) << "\nmass = " << format_number(c.dispersion.mass)
     << "\n\n";
  os << "[packet]\nenvelope = " << (c.packet.envelope == Envelope::gaussian ? "gaussian" : "bump")
     << "\nwidth = " << format_number(c.packet.width) << "\ncenter_x = " << format_number(c.packet.center.x)
     << "\ncenter_y = " << format_number(c.packet.center.y) << "\n\n";
  os << "[potential]\n";
  for (const auto& t : c.potential.terms()) os << "term = " << describe(t) << "\n";
  const auto& s = c.scattering;
  os << "\n[scattering]\npbar = " << format_number(s.pbar) << "\nangle = " << format_number(s.angle)
     << "\npbar_list = " << list_text(s.pbar_list) << "\nr_initial = " << format_number(s.r_initial)
     << "\nr_max = " << format_number(s.r_max) << "\nepsilon = " << format_number(s.epsilon)
     << "\ndr_max = " << format_number(s.dr_max) << "\ndt = " << format_number(s.dt)
     << "\nt_total = " << format_number(s.t_total) << "\nsafety = " << format_number(s.safety)
     << "\nmask_threshold = " << format_number(s.mask_threshold) << "\ndollard = " << (s.dollard ? "true" : "false")
     << "\n\n";
  const auto& r = c.reconstruction;
  os << "[reconstruction]\nangles = " << r.angles << "\noffsets = " << r.offsets
     << "\ns_max = " << format_number(r.s_max) << "\nroi_radius = " << format_number(r.roi_radius)
     << "\nraster = " << r.raster << "\neps_reg = " << format_number(r.eps_reg)
     << "\nsource = " << to_string(r.source) << "\njitter = " << format_number(r.jitter) << "\n";
  return os.str();
}

}  // namespace hesc
