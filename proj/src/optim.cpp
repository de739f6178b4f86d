#include "mvn/optim.hpp"

#include <cmath>

#include "mvn/errors.hpp"

namespace mvn {

void ParamSet::add(const std::string& name, Matrix m) {
  if (index_of(name) >= 0) throw ContractError("duplicate parameter name: " + name);
  names.push_back(name);
  values.push_back(std::move(m));
}

int ParamSet::index_of(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

const Matrix& ParamSet::get(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw ContractError("no such parameter: " + name);
  return values[i];
}

Matrix& ParamSet::get(const std::string& name) {
  int i = index_of(name);
  if (i < 0) throw ContractError("no such parameter: " + name);
  return values[i];
}

size_t ParamSet::scalar_count() const {
  size_t n = 0;
  for (const auto& m : values) n += m.size();
  return n;
}

AdamState AdamState::init(const ParamSet& params, AdamConfig cfg) {
  AdamState s;
  s.cfg = cfg;
  s.m.reserve(params.count());
  s.v.reserve(params.count());
  for (const auto& p : params.values) {
    s.m.emplace_back(p.rows, p.cols);
    s.v.emplace_back(p.rows, p.cols);
  }
  return s;
}

void adam_step(ParamSet& params, const std::vector<Matrix>& grads, AdamState& state,
               double lr) {
  if (grads.size() != params.count() || state.m.size() != params.count())
    throw ShapeError("adam_step: parameter/gradient/state count mismatch");
  state.step += 1;
  const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.count(); ++i) {
    Matrix& p = params.values[i];
    const Matrix& g = grads[i];
    if (!p.same_shape(g))
      throw ShapeError("adam_step: gradient shape mismatch for " + params.names[i]);
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    for (size_t k = 0; k < p.size(); ++k) {
      m.d[k] = b1 * m.d[k] + (1.0 - b1) * g.d[k];
      v.d[k] = b2 * v.d[k] + (1.0 - b2) * g.d[k] * g.d[k];
      double mhat = m.d[k] / corr1;
      double vhat = v.d[k] / corr2;
      p.d[k] -= lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
    }
  }
}

double LrSchedule::at(int epoch) const {
  if (epoch < 0) throw ContractError("lr schedule: negative epoch");
  int steps = epoch / period;
  return initial * std::pow(factor, static_cast<double>(steps));
}

}  // namespace mvn
