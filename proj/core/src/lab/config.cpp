#include "thinfilm/lab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace thinfilm::lab {
namespace {

namespace pt = boost::property_tree;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) invalid("not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) invalid("not a non-negative integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  invalid("not a boolean: '" + s + "'");
}

/// Section view that remembers which keys were consumed.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return trim(it->second.data());
  }
  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) invalid("[" + name_ + "] is missing '" + key + "'");
    return *v;
  }
  template <class T, class Parse>
  void read(const std::string& key, T& target, Parse parse) {
    if (auto v = get(key)) {
      try {
        target = static_cast<T>(parse(*v));
      } catch (const Error& e) {
        invalid("[" + name_ + "] " + key + ": " + e.what());
      }
    }
  }
  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!child.empty()) invalid("nested key '" + key + "' in [" + name_ + "]");
      if (!used_.count(key)) invalid("unknown key '" + key + "' in [" + name_ + "]");
    }
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> used_;
};

CosineCombo parse_terms(const std::string& s) {
  CosineCombo c;
  for (const auto& item : split(s, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) invalid("cosine term must be k:amplitude, got '" + item + "'");
    const auto k = parse_unsigned(trim(item.substr(0, colon)));
    c.terms.emplace_back(static_cast<std::size_t>(k), parse_real(trim(item.substr(colon + 1))));
  }
  if (c.terms.empty()) invalid("cosine_combo terms are empty");
  return c;
}

BaseDatum parse_base(Section& s, const std::string& family) {
  if (family == "cosine_combo") return parse_terms(s.require("terms"));
  if (family == "random_bandlimited") {
    RandomBandlimited r;
    r.max_k = static_cast<std::size_t>(parse_unsigned(s.require("max_k")));
    r.amplitude = parse_real(s.require("amplitude"));
    s.read("seed", r.seed, parse_unsigned);
    return r;
  }
  invalid("unknown datum family '" + family + "'");
}

DatumDescriptor parse_datum(Section& s) {
  const std::string family = s.require("family");
  if (family == "nehari_scaled") {
    NehariScaled n;
    n.base = parse_base(s, s.require("base"));
    n.multiplier = parse_real(s.require("multiplier"));
    return n;
  }
  return std::visit([](auto&& b) -> DatumDescriptor { return b; }, parse_base(s, family));
}

const std::set<std::string> kSections = {"domain", "datum", "stepper", "outputs", "crosscheck",
                                         "classify", "run",   "sweep"};

}  // namespace

double parse_real(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s.empty()) invalid("empty number");
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return parse_number(s);
  double factor = 1.0;
  std::string head = s.substr(0, pos);
  std::string tail = s.substr(pos + 2);
  if (head == "-") {
    factor = -1.0;
  } else if (!head.empty()) {
    if (head.back() == '*') head.pop_back();
    factor = parse_number(head);
  }
  double value = factor * kPi;
  if (!tail.empty()) {
    if (tail.front() != '/') invalid("malformed expression: '" + raw + "'");
    const double div = parse_number(tail.substr(1));
    if (div == 0.0) invalid("division by zero in '" + raw + "'");
    value /= div;
  }
  return value;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    invalid(std::string("malformed config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  {
    // The INI reader drops sections without keys; headers are checked here.
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      line = trim(line);
      if (line.size() > 2 && line.front() == '[' && line.back() == ']' &&
          !kSections.count(trim(line.substr(1, line.size() - 2))))
        invalid("unknown section " + line);
    }
  }
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) invalid("key '" + name + "' outside any section");
    if (!kSections.count(name)) invalid("unknown section [" + name + "]");
  }
  auto section = [&](const std::string& name) {
    auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second);
  };

  ExperimentConfig cfg;
  {
    Section s = section("domain");
    double a = cfg.spec.a(), p = cfg.spec.p();
    std::size_t n = cfg.spec.n_modes();
    s.read("a", a, parse_real);
    s.read("p", p, parse_real);
    s.read("n_modes", n, parse_unsigned);
    s.reject_unknown();
    try {
      cfg.spec = DomainSpec(a, p, n);
    } catch (const Error& e) {
      invalid(std::string("[domain] ") + e.what());
    }
  }
  {
    Section s = section("datum");
    if (s.get("family")) {
      try {
        cfg.datum = parse_datum(s);
      } catch (const Error& e) {
        invalid(std::string("[datum] ") + e.what());
      }
    }
    s.reject_unknown();
    try {
      build_datum(cfg.datum, cfg.spec);
    } catch (const Error& e) {
      invalid(std::string("[datum] ") + e.what());
    }
  }
  {
    Section s = section("stepper");
    auto& st = cfg.stepper;
    s.read("dt_init", st.dt_init, parse_real);
    s.read("dt_min", st.dt_min, parse_real);
    s.read("dt_max", st.dt_max, parse_real);
    s.read("rel_tol", st.rel_tol, parse_real);
    s.read("t_horizon", st.t_horizon, parse_real);
    s.read("u_max", st.u_max, parse_real);
    s.read("sample_stride", st.sample_stride, parse_unsigned);
    s.read("checkpoint_stride", st.checkpoint_stride, parse_unsigned);
    s.read("adaptive", st.adaptive, parse_bool);
    s.read("max_steps", st.max_steps, parse_unsigned);
    s.reject_unknown();
    st.validate();
  }
  {
    Section s = section("outputs");
    if (auto dir = s.get("dir")) {
      if (dir->empty()) invalid("[outputs] dir is empty");
      cfg.outputs.dir = *dir;
    }
    s.read("csv", cfg.outputs.csv, parse_bool);
    s.read("json", cfg.outputs.json, parse_bool);
    s.read("plot", cfg.outputs.plot, parse_bool);
    s.reject_unknown();
  }
  {
    Section s = section("crosscheck");
    s.read("enabled", cfg.crosscheck.enabled, parse_bool);
    s.read("points", cfg.crosscheck.points, parse_unsigned);
    s.read("dt", cfg.crosscheck.dt, parse_real);
    s.reject_unknown();
    if (cfg.crosscheck.points < 64) invalid("[crosscheck] points must be at least 64");
    if (!(cfg.crosscheck.dt > 0.0)) invalid("[crosscheck] dt must be positive");
  }
  {
    Section s = section("classify");
    s.read("well_depth", cfg.classify.well_depth, parse_bool);
    s.read("modes", cfg.classify.modes, parse_unsigned);
    if (auto v = s.get("lambda_alpha")) cfg.classify.lambda_alpha = parse_real(*v);
    s.reject_unknown();
    if (cfg.classify.modes < 8) invalid("[classify] modes must be at least 8");
    if (cfg.classify.lambda_alpha && !cfg.classify.well_depth)
      invalid("[classify] lambda_alpha requires well_depth = true");
  }
  {
    Section s = section("run");
    if (auto v = s.get("suite")) cfg.suite = *v;
    s.reject_unknown();
  }
  {
    Section s = section("sweep");
    if (auto v = s.get("multipliers"))
      for (const auto& m : split(*v, ',')) {
        const double x = parse_real(m);
        if (!(x > 0.0)) invalid("[sweep] multipliers must be positive");
        cfg.sweep.multipliers.push_back(x);
      }
    s.read("workers", cfg.sweep.workers, parse_unsigned);
    s.reject_unknown();
    if (cfg.sweep.workers == 0) invalid("[sweep] workers must be at least 1");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str());
  if (cfg.outputs.dir.is_relative()) cfg.outputs.dir = path.parent_path() / cfg.outputs.dir;
  return cfg;
}

}  // namespace thinfilm::lab
