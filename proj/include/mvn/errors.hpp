#pragma once

#include <stdexcept>
#include <string>

namespace mvn {

// All library failures derive from Error and carry a short machine-readable
// category ("shape", "input", "config", ...) used by the CLI for exit
// reporting.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& msg)
      : std::runtime_error(msg), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error("shape", m) {}
};
struct IndexError : Error {
  explicit IndexError(const std::string& m) : Error("index", m) {}
};
struct InputError : Error {
  explicit InputError(const std::string& m) : Error("input", m) {}
};
struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& m) : Error("degenerate", m) {}
};
struct IngestionError : Error {
  explicit IngestionError(const std::string& m) : Error("ingest", m) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& m) : Error("contract", m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error("io", m) {}
};
struct TrainError : Error {
  explicit TrainError(const std::string& m) : Error("train", m) {}
};

}  // namespace mvn
