#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mvn {

// Flat key=value run configuration. Every key must be registered; unknown
// keys are rejected with their line number so typos fail loudly. A run
// writes its fully resolved configuration next to its outputs.
class RunConfig {
 public:
  static RunConfig defaults();
  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text, const std::string& origin);

  void set(const std::string& key, const std::string& value);  // validates the key
  bool has(const std::string& key) const;

  const std::string& str(const std::string& key) const;
  int64_t i64(const std::string& key) const;
  double dbl(const std::string& key) const;
  bool flag(const std::string& key) const;  // on/off|true/false|1/0
  std::vector<int> int_list(const std::string& key) const;
  std::vector<std::string> str_list(const std::string& key) const;

  std::string serialize() const;  // canonical: version line + sorted keys

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace mvn
