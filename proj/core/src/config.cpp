#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "semdrift/common.hpp"
#include "semdrift/csv.hpp"
#include "semdrift/report.hpp"

namespace semdrift {

namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

std::string trim_copy(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece =
        trim_copy(s.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const auto t = trim_copy(value);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || p != t.data() + t.size()) {
    throw ConfigError("'" + key + "': expected a number, got '" + value + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  const auto v = csv::parse_double(value);
  if (!v) throw ConfigError("'" + key + "': expected a number, got '" + value + "'");
  return *v;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(trim_copy(value));
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

// Drops full-line comments and trailing " ;..." / " #..." comments.
std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim_copy(line);
    if (!t.empty() && (t.front() == '#' || t.front() == ';')) {
      out << '\n';
      continue;
    }
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    }
    out << line << '\n';
  }
  return out.str();
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
  if (value == "false" || value == "no" || value == "off" || value == "0") return false;
  throw ConfigError("'" + key + "': expected true or false, got '" + value + "'");
}

}  // namespace

ProviderKind parse_provider(std::string_view name) {
  if (name == "file") return ProviderKind::kFile;
  if (name == "http") return ProviderKind::kHttp;
  if (name == "stub") return ProviderKind::kStub;
  throw ConfigError("unknown provider '" + std::string(name) +
                    "' (expected file, http or stub)");
}

std::string_view provider_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kFile: return "file";
    case ProviderKind::kHttp: return "http";
    case ProviderKind::kStub: return "stub";
  }
  return "stub";
}

YearRange parse_year_range(std::string_view text) {
  const auto t = trim_copy(text);
  // skip a leading sign on the first year
  const auto dash = t.find('-', 1);
  if (dash == std::string::npos) {
    const int y = parse_number<int>("year range", t);
    return {y, y};
  }
  YearRange r{parse_number<int>("year range", t.substr(0, dash)),
              parse_number<int>("year range", t.substr(dash + 1))};
  if (r.first > r.last) throw ConfigError("year range " + t + " runs backwards");
  return r;
}

std::vector<std::string> AnalysisConfig::all_targets() const {
  std::vector<std::string> out = targets;
  for (const auto& c : control_targets) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

void AnalysisConfig::validate() const {
  if (corpora.empty()) throw ConfigError("no [corpus:<name>] section");
  if (all_targets().empty()) throw ConfigError("no targets configured");
  if (indices.empty()) throw ConfigError("no indices selected");
  if (study_window.empty()) throw ConfigError("study_window is empty");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (breadth_samples < 2) throw ConfigError("breadth samples (S) must be >= 2");
  if (breadth_repeats < 1) throw ConfigError("breadth repeats (R) must be >= 1");
  if (breadth_interval < 1) throw ConfigError("breadth interval must be >= 1");
  if (breadth_window.empty()) throw ConfigError("breadth window is empty");
  if (top_k < 1 || top_period < 1) throw ConfigError("top_k and top_period must be >= 1");
  if (dw_permutations < 1) throw ConfigError("dw_permutations must be >= 1");
  if (!(gls_threshold >= 0 && gls_threshold <= 1)) {
    throw ConfigError("gls_threshold must lie in [0,1]");
  }

  auto must_exist = [](const fs::path& p, const std::string& what) {
    if (p.empty()) throw ConfigError(what + ": path not set");
    if (!fs::exists(p)) throw ConfigError(what + ": " + p.string() + " does not exist");
  };
  must_exist(norms, "lexicon.norms");
  if (!stopwords.empty()) must_exist(stopwords, "lexicon.stopwords");
  if (!intensifiers.empty()) must_exist(intensifiers, "lexicon.intensifiers");
  for (const auto& [name, p] : themes) {
    if (!p.empty()) must_exist(p, "lexicon.theme:" + name);
  }
  std::set<std::string> names;
  for (const auto& c : corpora) {
    if (!names.insert(c.name).second) throw ConfigError("duplicate corpus " + c.name);
    must_exist(c.raw, "corpus:" + c.name + ".raw");
    must_exist(c.lemma, "corpus:" + c.name + ".lemma");
    must_exist(c.conllu, "corpus:" + c.name + ".conllu");
  }

  bool breadth = false;
  for (const auto& i : indices) {
    const auto id = IndexId::parse(i);
    if (id.kind == IndexKind::kBreadth) breadth = true;
    if (id.kind == IndexKind::kTheme && id.theme != "pathologization" &&
        !themes.contains(id.theme)) {
      throw ConfigError("index " + i + " has no lexicon.theme:" + id.theme + " entry");
    }
  }
  for (const auto& q : quadratic_indices) IndexId::parse(q);
  if (breadth && provider == ProviderKind::kFile) must_exist(embeddings, "breadth.embeddings");
  if (breadth && provider == ProviderKind::kHttp && endpoint.empty()) {
    throw ConfigError("breadth.endpoint required for the http provider");
  }
  if (stub_dim < 1) throw ConfigError("stub_dim must be >= 1");
}

std::string AnalysisConfig::to_canonical_json() const {
  nlohmann::ordered_json j;
  auto range = [](const YearRange& r) { return nlohmann::ordered_json::array({r.first, r.last}); };
  j["corpora"] = nlohmann::ordered_json::array();
  for (const auto& c : corpora) {
    j["corpora"].push_back({{"name", c.name},
                            {"raw", c.raw.generic_string()},
                            {"lemma", c.lemma.generic_string()},
                            {"conllu", c.conllu.generic_string()}});
  }
  j["targets"] = targets;
  j["control_targets"] = control_targets;
  j["indices"] = indices;
  j["window"] = window;
  j["window_space"] = window_space == WindowSpace::kLemma ? "lemma" : "surface";
  j["study_window"] = range(study_window);
  j["min_matched"] = min_matched;
  j["amod"] = amod_relation;
  j["breadth"] = {{"interval", breadth_interval},
                  {"samples", breadth_samples},
                  {"repeats", breadth_repeats},
                  {"window", range(breadth_window)}};
  j["seed"] = seed;
  j["provider"] = std::string(provider_name(provider));
  j["embeddings"] = embeddings.generic_string();
  j["endpoint"] = endpoint;
  j["stub_dim"] = stub_dim;
  j["norms"] = norms.generic_string();
  j["stopwords"] = stopwords.generic_string();
  j["intensifiers"] = intensifiers.generic_string();
  j["themes"] = nlohmann::ordered_json::object();
  for (const auto& [n, p] : themes) j["themes"][n] = p.generic_string();
  j["year_mask"] = nlohmann::ordered_json::array();
  for (const auto& m : year_mask) {
    j["year_mask"].push_back({{"corpus", m.corpus}, {"index", m.index},
                              {"range", range(m.range)}});
  }
  j["quadratic"] = quadratic_indices;
  j["top_k"] = top_k;
  j["top_period"] = top_period;
  j["dw_permutations"] = dw_permutations;
  j["gls_threshold"] = gls_threshold;
  j["overlay"] = overlay;
  return j.dump();
}

AnalysisConfig parse_config(const std::string& text, const fs::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(strip_comments(text));
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  AnalysisConfig c;
  const std::set<std::string> known_sections{"run", "lexicon", "breadth", "stats", "mask"};
  for (const auto& [section, body] : tree) {
    if (section.starts_with("corpus:")) {
      CorpusPaths cp;
      cp.name = section.substr(7);
      if (cp.name.empty()) throw ConfigError("corpus section needs a name");
      for (const auto& [key, v] : body) {
        const auto value = v.get_value<std::string>();
        if (key == "raw") cp.raw = resolve(base_dir, value);
        else if (key == "lemma") cp.lemma = resolve(base_dir, value);
        else if (key == "conllu") cp.conllu = resolve(base_dir, value);
        else throw ConfigError("unknown key " + section + "." + key);
      }
      c.corpora.push_back(std::move(cp));
      continue;
    }
    if (!known_sections.contains(section)) {
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, v] : body) {
      const auto value = trim_copy(v.get_value<std::string>());
      const std::string where = section + "." + key;
      if (section == "run") {
        if (key == "seed") c.seed = parse_number<std::uint64_t>(where, value);
        else if (key == "out") c.out_dir = resolve(base_dir, value);
        else if (key == "targets") c.targets = split_list(value);
        else if (key == "control_targets") c.control_targets = split_list(value);
        else if (key == "indices") c.indices = split_list(value);
        else if (key == "window") c.window = parse_number<int>(where, value);
        else if (key == "window_space") {
          if (value == "lemma") c.window_space = WindowSpace::kLemma;
          else if (value == "surface") c.window_space = WindowSpace::kSurface;
          else throw ConfigError(where + ": expected lemma or surface");
        } else if (key == "study_window") c.study_window = parse_year_range(value);
        else if (key == "min_matched") c.min_matched = parse_number<std::int64_t>(where, value);
        else if (key == "amod") c.amod_relation = value;
        else if (key == "quadratic") c.quadratic_indices = split_list(value);
        else if (key == "top_k") c.top_k = parse_number<int>(where, value);
        else if (key == "top_period") c.top_period = parse_number<int>(where, value);
        else if (key == "threads") c.threads = parse_number<unsigned>(where, value);
        else if (key == "overlay") c.overlay = parse_bool(where, value);
        else throw ConfigError("unknown key " + where);
      } else if (section == "lexicon") {
        if (key == "norms") c.norms = resolve(base_dir, value);
        else if (key == "stopwords") c.stopwords = resolve(base_dir, value);
        else if (key == "intensifiers") c.intensifiers = resolve(base_dir, value);
        else if (key.starts_with("theme:")) c.themes[key.substr(6)] = resolve(base_dir, value);
        else throw ConfigError("unknown key " + where);
      } else if (section == "breadth") {
        if (key == "interval") c.breadth_interval = parse_number<int>(where, value);
        else if (key == "samples") c.breadth_samples = parse_number<int>(where, value);
        else if (key == "repeats") c.breadth_repeats = parse_number<int>(where, value);
        else if (key == "window") c.breadth_window = parse_year_range(value);
        else if (key == "provider") c.provider = parse_provider(value);
        else if (key == "embeddings") c.embeddings = resolve(base_dir, value);
        else if (key == "endpoint") c.endpoint = value;
        else if (key == "stub_dim") c.stub_dim = parse_number<int>(where, value);
        else if (key == "cache_dir") c.cache_dir = resolve(base_dir, value);
        else if (key == "retries") c.embed_retries = parse_number<int>(where, value);
        else if (key == "in_flight") c.embed_in_flight = parse_number<std::size_t>(where, value);
        else throw ConfigError("unknown key " + where);
      } else if (section == "stats") {
        if (key == "dw_permutations") c.dw_permutations = parse_number<int>(where, value);
        else if (key == "gls_threshold") c.gls_threshold = parse_real(where, value);
        else throw ConfigError("unknown key " + where);
      } else if (section == "mask") {
        const auto colon = key.find(':');
        if (colon == std::string::npos) {
          throw ConfigError(where + ": mask keys are <corpus>:<index>");
        }
        for (const auto& r : split_list(value)) {
          c.year_mask.push_back({key.substr(0, colon), key.substr(colon + 1),
                                 parse_year_range(r)});
        }
      }
    }
  }
  return c;
}

AnalysisConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace semdrift
