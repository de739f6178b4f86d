#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvn/matrix.hpp"

namespace mvn {

// Ordered named parameter collection. Order is part of the identity: the
// optimizer state and gradient vectors are index-aligned with it.
struct ParamSet {
  std::vector<std::string> names;
  std::vector<Matrix> values;

  void add(const std::string& name, Matrix m);
  int index_of(const std::string& name) const;  // -1 when absent
  const Matrix& get(const std::string& name) const;
  Matrix& get(const std::string& name);
  size_t count() const { return values.size(); }
  size_t scalar_count() const;

  bool operator==(const ParamSet& o) const {
    return names == o.names && values == o.values;
  }
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment estimates, index-aligned with the ParamSet they were
// created for. step increases by exactly one per update.
struct AdamState {
  AdamConfig cfg;
  int64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  static AdamState init(const ParamSet& params, AdamConfig cfg = {});
};

// In-place bias-corrected Adam update.
void adam_step(ParamSet& params, const std::vector<Matrix>& grads, AdamState& state,
               double lr);

// Piecewise-constant decay: rate(e) = initial * factor^floor(e / period).
struct LrSchedule {
  double initial = 1e-3;
  double factor = 0.25;
  int period = 20;

  double at(int epoch) const;
};

}  // namespace mvn
