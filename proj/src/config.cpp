#include "partimax/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string_view>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace partimax {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("not a valid number: '" + text + "'");
  return value;
}

template <typename T>
std::string format_number(T value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    items.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  std::erase_if(items, [](const std::string& s) { return s.empty(); });
  return items;
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(item));
  return out;
}

template <typename T>
std::string format_list(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_number(values[i]);
  }
  return out;
}

struct Key {
  std::string section;
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
Key number_key(std::string section, std::string name, T RunConfig::*field) {
  return {std::move(section), std::move(name),
          [field](const RunConfig& c) { return format_number(c.*field); },
          [field](RunConfig& c, const std::string& v) { c.*field = parse_number<T>(v); }};
}

template <typename Sub, typename T>
Key nested_key(std::string section, std::string name, Sub RunConfig::*sub, T Sub::*field) {
  return {std::move(section), std::move(name),
          [sub, field](const RunConfig& c) { return format_number(c.*sub.*field); },
          [sub, field](RunConfig& c, const std::string& v) {
            c.*sub.*field = parse_number<T>(v);
          }};
}

template <typename T>
Key list_key(std::string section, std::string name, std::vector<T> RunConfig::*field) {
  return {std::move(section), std::move(name),
          [field](const RunConfig& c) { return format_list(c.*field); },
          [field](RunConfig& c, const std::string& v) { c.*field = parse_list<T>(v); }};
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back({"run", "mode", [](const RunConfig& c) { return c.mode; },
                 [](RunConfig& c, const std::string& v) { c.mode = v; }});
    k.push_back(number_key("run", "seed", &RunConfig::seed));
    k.push_back({"run", "out", [](const RunConfig& c) { return c.out; },
                 [](RunConfig& c, const std::string& v) { c.out = v; }});

    k.push_back(nested_key("geometry", "image_width", &RunConfig::geometry, &TileCodingConfig::image_width));
    k.push_back(nested_key("geometry", "image_height", &RunConfig::geometry, &TileCodingConfig::image_height));
    k.push_back(nested_key("geometry", "box_width", &RunConfig::geometry, &TileCodingConfig::box_width));
    k.push_back(nested_key("geometry", "box_height", &RunConfig::geometry, &TileCodingConfig::box_height));
    k.push_back(nested_key("geometry", "offset_x", &RunConfig::geometry, &TileCodingConfig::offset_x));
    k.push_back(nested_key("geometry", "offset_y", &RunConfig::geometry, &TileCodingConfig::offset_y));

    k.push_back(nested_key("motion", "sigma_x", &RunConfig::motion, &MotionModel::sigma_x));
    k.push_back(nested_key("motion", "sigma_y", &RunConfig::motion, &MotionModel::sigma_y));

    k.push_back(nested_key("detector", "p_detect", &RunConfig::detector, &DetectorModel::p_detect));
    k.push_back(nested_key("detector", "p_false", &RunConfig::detector, &DetectorModel::p_false));
    k.push_back(nested_key("detector", "loc_noise", &RunConfig::detector, &DetectorModel::loc_noise));

    k.push_back(nested_key("filter", "particles", &RunConfig::filter, &FilterParams::particles));
    k.push_back(nested_key("filter", "inject_fraction", &RunConfig::filter, &FilterParams::inject_fraction));
    k.push_back(nested_key("filter", "v_max", &RunConfig::filter, &FilterParams::v_max));

    k.push_back(number_key("selector", "max_rejects", &RunConfig::max_rejects));
    k.push_back(number_key("selector", "time_budget_us", &RunConfig::time_budget_us));

    k.push_back({"sweep", "algorithms",
                 [](const RunConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.algorithms.size(); ++i) {
                     if (i) out += ", ";
                     out += to_string(c.algorithms[i]);
                   }
                   return out;
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.algorithms.clear();
                   for (const auto& name : split_list(v)) {
                     try {
                       c.algorithms.push_back(parse_algorithm(name));
                     } catch (const std::invalid_argument& e) {
                       throw ConfigError(e.what());
                     }
                   }
                 }});
    k.push_back(list_key("sweep", "k", &RunConfig::k_values));
    k.push_back(list_key("sweep", "r", &RunConfig::r_values));
    k.push_back(list_key("sweep", "people", &RunConfig::people));
    k.push_back(list_key("sweep", "seeds", &RunConfig::seeds));
    k.push_back(number_key("sweep", "trajectories", &RunConfig::trajectories));
    k.push_back(number_key("sweep", "timesteps", &RunConfig::timesteps));

    k.push_back({"bench", "record_timing",
                 [](const RunConfig& c) { return std::string(c.record_timing ? "true" : "false"); },
                 [](RunConfig& c, const std::string& v) { c.record_timing = parse_bool(v); }});
    k.push_back(number_key("bench", "jobs", &RunConfig::jobs));

    k.push_back({"select", "algorithm",
                 [](const RunConfig& c) { return std::string(to_string(c.select_algorithm)); },
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.select_algorithm = parse_algorithm(v);
                   } catch (const std::invalid_argument& e) {
                     throw ConfigError(e.what());
                   }
                 }});
    k.push_back(number_key("select", "k", &RunConfig::select_k));
    k.push_back(number_key("select", "r", &RunConfig::select_r));
    return k;
  }();
  return keys;
}

}  // namespace

void validate(const RunConfig& c) {
  try {
    validate(c.geometry);
    validate(c.motion);
    validate(c.detector);
    validate(c.filter);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.mode != "bench" && c.mode != "verify" && c.mode != "select")
    throw ConfigError("mode must be one of bench, verify, select");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.timesteps < 1) throw ConfigError("timesteps must be >= 1");
  if (c.trajectories < 1) throw ConfigError("trajectories must be >= 1");
  if (!(c.time_budget_us >= 0)) throw ConfigError("time_budget_us must be >= 0");
  for (std::size_t r : c.r_values)
    if (r < 1) throw ConfigError("every r must be >= 1");
  for (std::size_t p : c.people)
    if (p < 1) throw ConfigError("every people count must be >= 1");
  const std::size_t n = TileCoding(c.geometry).box_count();
  for (std::size_t k : c.k_values)
    if (k > n) throw ConfigError("k = " + std::to_string(k) + " exceeds the box count " + std::to_string(n));
  if (c.select_k < 1 || c.select_k > n) throw ConfigError("select.k must lie in [1, n]");
  if (c.select_r < 1) throw ConfigError("select.r must be >= 1");
  if (c.max_rejects != 0)
    for (std::size_t r : c.r_values)
      if (c.max_rejects < r) throw ConfigError("max_rejects must be >= every r");
}

RunConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  RunConfig config;
  const auto& keys = registry();
  for (const auto& [section, body] : tree) {
    if (!body.data().empty())
      throw ConfigError("key '" + section + "' must live inside a section");
    for (const auto& [name, value] : body) {
      auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) {
        return k.section == section && k.name == name;
      });
      if (it == keys.end()) throw ConfigError("unknown config key " + section + "." + name);
      try {
        it->set(config, trim(value.data()));
      } catch (const ConfigError& e) {
        throw ConfigError(section + "." + name + ": " + e.what());
      }
    }
  }
  validate(config);
  return config;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  std::string current;
  for (const Key& k : registry()) {
    if (k.section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << k.section << "]\n";
      current = k.section;
    }
    out << k.name << " = " << k.get(config) << '\n';
  }
  return out.str();
}

BenchmarkConfig RunConfig::benchmark() const {
  BenchmarkConfig b;
  b.geometry = geometry;
  b.episode.motion = motion;
  b.episode.detector = detector;
  b.episode.filter = filter;
  b.episode.time_budget_us = time_budget_us;
  b.algorithms = algorithms;
  b.k_values = k_values;
  b.r_values = r_values;
  b.people = people;
  b.seeds = seeds;
  b.trajectories = trajectories;
  b.timesteps = timesteps;
  b.max_rejects = max_rejects;
  b.jobs = jobs;
  return b;
}

}  // namespace partimax
