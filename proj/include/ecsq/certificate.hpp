#pragma once
// certificate.hpp — structured pass/fail reports with named residuals.
//
// A certificate is a list of sections, one per pipeline stage; each section
// holds named checks (measured value, tolerance, relation, verdict).  The
// overall verdict is the conjunction of all section verdicts, and a skipped
// section counts as a failure, so nothing passes silently.  Serialization is
// deterministic: ordered keys, and doubles emitted with the shortest
// round-trip representation, so repeated runs with the same configuration
// produce byte-identical JSON.

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ecsq {

struct CheckEntry {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "lt", "gt", "eq", "info"
  bool pass = true;
};

struct CertSection {
  std::string name;
  bool skipped = false;
  std::string error;  // populated when a stage aborts
  std::vector<CheckEntry> entries;

  bool pass() const {
    if (skipped || !error.empty()) return false;
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }

  void require_lt(const std::string& check, double value, double tolerance) {
    entries.push_back({check, value, tolerance, "lt", value < tolerance});
  }
  void require_gt(const std::string& check, double value, double threshold) {
    entries.push_back({check, value, threshold, "gt", value > threshold});
  }
  void require_true(const std::string& check, bool ok) {
    entries.push_back({check, ok ? 1.0 : 0.0, 1.0, "eq", ok});
  }
  void info(const std::string& check, double value) {
    entries.push_back({check, value, 0.0, "info", true});
  }
};

struct Certificate {
  std::string schema = "ecs-cert/1";
  nlohmann::ordered_json config;
  std::vector<CertSection> sections;

  CertSection& add_section(const std::string& name) {
    sections.push_back(CertSection{name});
    return sections.back();
  }

  bool overall() const {
    if (sections.empty()) return false;
    for (const auto& s : sections)
      if (!s.pass()) return false;
    return true;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = schema;
    j["config"] = config;
    nlohmann::ordered_json secs = nlohmann::ordered_json::array();
    for (const auto& s : sections) {
      nlohmann::ordered_json js;
      js["name"] = s.name;
      js["pass"] = s.pass();
      if (s.skipped) js["skipped"] = true;
      if (!s.error.empty()) js["error"] = s.error;
      nlohmann::ordered_json entries = nlohmann::ordered_json::array();
      for (const auto& e : s.entries) {
        nlohmann::ordered_json je;
        je["name"] = e.name;
        je["value"] = e.value;
        if (e.relation != "info") {
          je["tolerance"] = e.tolerance;
          je["relation"] = e.relation;
        }
        je["pass"] = e.pass;
        entries.push_back(std::move(je));
      }
      js["entries"] = std::move(entries);
      secs.push_back(std::move(js));
    }
    j["sections"] = std::move(secs);
    j["overall"] = overall();
    return j;
  }

  std::string dump(int indent = 2) const { return to_json().dump(indent); }
};

}  // namespace ecsq
