#pragma once

// Frozen reference values keyed by "operation|k1=v1,k2=v2".

#include <complex>
#include <fstream>
#include <map>
#include <string>

#include "json.hpp"
#include "wld/errors.hpp"

namespace wld {

struct GoldenEntry {
  std::complex<double> value;
  bool is_complex = false;
  std::string provenance;
  std::string oracle;
};

class GoldenStore {
 public:
  GoldenStore() = default;

  static GoldenStore load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("golden store not found: " + path);
    nlohmann::json j;
    in >> j;
    GoldenStore g;
    g.path_ = path;
    for (auto& [key, e] : j.items()) {
      GoldenEntry ge;
      const auto& v = e.at("value");
      if (v.is_array()) {
        ge.value = {v.at(0).get<double>(), v.at(1).get<double>()};
        ge.is_complex = true;
      } else {
        ge.value = {v.get<double>(), 0.0};
      }
      ge.provenance = e.value("provenance", "");
      ge.oracle = e.value("oracle", "");
      g.entries_.emplace(key, std::move(ge));
    }
    return g;
  }

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }

  const GoldenEntry& at(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw Error("golden entry missing: " + key);
    return it->second;
  }

  double real(const std::string& key) const { return at(key).value.real(); }
  std::complex<double> complex(const std::string& key) const { return at(key).value; }

  /// Adds an entry; an existing key must keep its value.
  void put(const std::string& key, const GoldenEntry& e) {
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      if (std::abs(it->second.value - e.value) > 1e-13 * std::max(1.0, std::abs(e.value)))
        throw Error("golden entry is immutable: " + key);
      return;
    }
    entries_.emplace(key, e);
  }

  void save(const std::string& path) const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, e] : entries_) {
      nlohmann::json v;
      if (e.is_complex)
        v = nlohmann::json::array({e.value.real(), e.value.imag()});
      else
        v = e.value.real();
      j[k] = {{"value", v}, {"provenance", e.provenance}, {"oracle", e.oracle}};
    }
    std::ofstream out(path);
    out << j.dump(1) << "\n";
  }

  const std::map<std::string, GoldenEntry>& entries() const { return entries_; }

 private:
  std::string path_;
  std::map<std::string, GoldenEntry> entries_;
};

}  // namespace wld
