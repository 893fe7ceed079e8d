#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gamelab {

// One validation problem. Findings are data, not failures: validators never
// throw, they report.
struct Finding {
  std::string code;     // machine-readable, e.g. UNKNOWN_COMBINATION
  std::string path;     // config/template path of the offending field
  std::string message;  // human-readable detail

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }

  void add(std::string code, std::string path, std::string message) {
    findings.push_back({std::move(code), std::move(path), std::move(message)});
  }

  bool has(const std::string& code) const {
    for (const auto& f : findings)
      if (f.code == code) return true;
    return false;
  }

  void merge(const ValidationReport& other) {
    findings.insert(findings.end(), other.findings.begin(), other.findings.end());
  }
};

inline std::ostream& operator<<(std::ostream& os, const Finding& f) {
  return os << f.code << " at " << f.path << ": " << f.message;
}

}  // namespace gamelab
