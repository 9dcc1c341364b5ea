#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bsdelab/config.hpp"

namespace bsdelab {

namespace {

Config from_tree(const boost::property_tree::ptree& tree) {
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      c.set(section, body.data());
      continue;
    }
    for (const auto& [key, leaf] : body) c.set(section + "." + key, leaf.data());
  }
  return c;
}

}  // namespace

Config Config::load(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::runtime_error("config: " + std::string(e.what()));
  }
  return from_tree(tree);
}

Config Config::parse(const std::string& text) {
  std::istringstream is(text);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::runtime_error("config: " + std::string(e.what()));
  }
  return from_tree(tree);
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::optional<std::string> Config::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  resolved_[key] = it->second;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
  auto v = find(key);
  if (!v) resolved_[key] = def;
  return v ? *v : def;
}

double Config::get_double(const std::string& key, double def) const {
  auto v = find(key);
  if (!v) {
    std::ostringstream os;
    os << std::setprecision(17) << def;
    resolved_[key] = os.str();
    return def;
  }
  try {
    std::size_t pos = 0;
    double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument(*v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " is not a number: " + *v);
  }
}

long long Config::get_int(const std::string& key, long long def) const {
  auto v = find(key);
  if (!v) {
    resolved_[key] = std::to_string(def);
    return def;
  }
  try {
    std::size_t pos = 0;
    long long d = std::stoll(*v, &pos, 0);
    if (pos != v->size()) throw std::invalid_argument(*v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " is not an integer: " + *v);
  }
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto v = find(key);
  if (!v) {
    resolved_[key] = def ? "true" : "false";
    return def;
  }
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw std::invalid_argument("config: " + key + " is not a boolean: " + *v);
}

std::string Config::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [k, v] : values_) {
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::uint64_t resolve_seed(const Config& cfg, std::optional<std::uint64_t> override_seed,
                           std::uint64_t def) {
  if (override_seed) return *override_seed;
  if (const char* e = std::getenv("BSDELAB_SEED"); e && *e) {
    try {
      return std::stoull(e, nullptr, 0);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("BSDELAB_SEED is not an integer: ") + e);
    }
  }
  return static_cast<std::uint64_t>(cfg.get_int("sim.seed", static_cast<long long>(def)));
}

const char* version_string() { return BSDELAB_VERSION; }

}  // namespace bsdelab
