#include "scatterlab/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "scatterlab/errors.hpp"

namespace scatterlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {
    for (const auto& [key, entry] : entries_) lines_[key] = entry.line;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<double> real(const std::string& key) {
    auto it = take(key);
    if (!it) return std::nullopt;
    double value = 0.0;
    const auto& text = it->value;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      fail(*it, key, "expected a real number, got '" + text + "'");
    }
    return value;
  }

  std::optional<long long> integer(const std::string& key) {
    auto it = take(key);
    if (!it) return std::nullopt;
    long long value = 0;
    const auto& text = it->value;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      fail(*it, key, "expected an integer, got '" + text + "'");
    }
    return value;
  }

  std::optional<std::string> text(const std::string& key) {
    auto it = take(key);
    if (!it) return std::nullopt;
    return it->value;
  }

  std::optional<std::vector<double>> reals(const std::string& key) {
    auto it = take(key);
    if (!it) return std::nullopt;
    try {
      return parse_real_list(it->value);
    } catch (const Error& e) {
      fail(*it, key, e.what());
    }
  }

  int line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }

  // Anything left over was never consumed.
  void reject_leftovers() const {
    if (!entries_.empty()) {
      const auto& [key, entry] = *entries_.begin();
      throw Error(ErrorCode::Config,
                  "line " + std::to_string(entry.line) + ": key '" + key + "' is not valid here");
    }
  }

  [[noreturn]] static void fail(const Entry& e, const std::string& key, const std::string& why) {
    throw Error(ErrorCode::Config, "line " + std::to_string(e.line) + ": " + key + ": " + why);
  }

 private:
  std::optional<Entry> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    Entry e = it->second;
    entries_.erase(it);
    return e;
  }

  std::map<std::string, Entry> entries_;
  std::map<std::string, int> lines_;
};

ManifoldSpec build_manifold(Reader& r, const std::string& kind, int kind_line) {
  const double budget = r.real("trapped_budget").value_or(0.0);
  const auto wrap = [&](auto&& make) {
    try {
      return make();
    } catch (const Error& e) {
      // Validation messages start with the offending key.
      const std::string what = e.what();
      const int line = r.line_of(what.substr(0, what.find_first_of(" :")));
      throw Error(ErrorCode::Config, "line " + std::to_string(line ? line : kind_line) + ": " + what);
    }
  };
  if (kind == "flat" || kind == "perturbed") {
    FlatProduct base;
    base.n = static_cast<int>(r.integer("n").value_or(2));
    base.disc_radius = r.real("disc_radius").value_or(1.0);
    base.circle_length = r.real("circle_length").value_or(kTwoPi);
    if (kind == "flat") {
      return wrap([&] { return ManifoldSpec(base, budget); });
    }
    ConformalBump bump;
    bump.amplitude = r.real("perturbation.amplitude").value_or(0.2);
    bump.radius = r.real("perturbation.radius").value_or(0.5);
    const auto center = r.reals("perturbation.center").value_or(std::vector<double>(base.n, 0.0));
    bump.center = Eigen::Map<const Eigen::VectorXd>(center.data(), static_cast<Eigen::Index>(center.size()));
    return wrap([&] { return ManifoldSpec(PerturbedProduct{base, bump}, budget); });
  }
  if (kind == "revolution") {
    BumpProfile profile;
    profile.amplitude = r.real("bump.amplitude").value_or(0.05);
    profile.epsilon = r.real("bump.epsilon").value_or(0.2);
    profile.shift = r.real("bump.shift").value_or(0.0);
    return wrap([&] { return ManifoldSpec(SurfaceOfRevolution{profile}, budget); });
  }
  throw Error(ErrorCode::Config, "line " + std::to_string(kind_line) + ": kind must be flat, revolution or perturbed, got '" + kind + "'");
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> values;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    double value = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw Error(ErrorCode::Config, "malformed number list '" + std::string(text) + "'");
    }
    values.push_back(value);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return values;
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": empty key or value");
    }
    if (!entries.emplace(key, Entry{value, line_no}).second) {
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  Reader r(std::move(entries));
  ExperimentConfig cfg;
  if (r.has("kind")) {
    const int line = r.line_of("kind");
    const std::string kind = *r.text("kind");
    cfg.manifold = build_manifold(r, kind, line);
  }
  if (auto seed = r.integer("seed")) {
    if (*seed < 0) throw Error(ErrorCode::Config, "line " + std::to_string(r.line_of("seed")) + ": seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }
  if (r.has("samples")) {
    const int line = r.line_of("samples");
    cfg.samples = r.integer("samples");
    if (*cfg.samples < 1) throw Error(ErrorCode::Config, "line " + std::to_string(line) + ": samples must be >= 1");
  }
  if (r.has("budget")) {
    const int line = r.line_of("budget");
    cfg.budget = r.real("budget");
    if (!(*cfg.budget > 0.0)) throw Error(ErrorCode::Config, "line " + std::to_string(line) + ": budget must be > 0");
  }
  if (r.has("workers")) {
    const int line = r.line_of("workers");
    cfg.workers = static_cast<int>(*r.integer("workers"));
    if (*cfg.workers < 1) throw Error(ErrorCode::Config, "line " + std::to_string(line) + ": workers must be >= 1");
  }
  if (r.has("grid")) {
    const int line = r.line_of("grid");
    const auto dims = *r.reals("grid");
    if (dims.size() != 3) throw Error(ErrorCode::Config, "line " + std::to_string(line) + ": grid needs three counts u,theta,directions");
    std::array<int, 3> g{};
    for (int i = 0; i < 3; ++i) {
      g[i] = static_cast<int>(dims[i]);
      if (g[i] < 1 || g[i] != dims[i]) throw Error(ErrorCode::Config, "line " + std::to_string(line) + ": grid counts must be positive integers");
    }
    cfg.grid = g;
  }
  cfg.out = r.text("out");
  r.reject_leftovers();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ManifoldSpec manifold_preset(std::string_view name) {
  if (name == "flat-d2s1") return ManifoldSpec::flat_product(2);
  if (name == "flat-d3s1") return ManifoldSpec::flat_product(3);
  if (name == "flat-cylinder") return ManifoldSpec::surface_of_revolution(BumpProfile{0.0, 0.2, 0.0});
  if (name == "bump") return ManifoldSpec::surface_of_revolution(BumpProfile{0.0, 0.2, 0.05});
  if (name == "perturbed-d2s1") {
    ConformalBump bump;
    bump.amplitude = 0.2;
    bump.radius = 0.6;
    bump.center = Vec::Zero(2);
    return ManifoldSpec::perturbed_product(FlatProduct{}, bump);
  }
  throw Error(ErrorCode::Config, "unknown manifold preset '" + std::string(name) + "'");
}

std::vector<std::string> manifold_preset_names() {
  return {"flat-d2s1", "flat-d3s1", "flat-cylinder", "bump", "perturbed-d2s1"};
}

}  // namespace scatterlab
