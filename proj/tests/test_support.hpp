#pragma once
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "mvn/matrix.hpp"
#include "mvn/rng.hpp"

namespace mvn_test {

inline void fill_random(mvn::Matrix& m, mvn::Rng& rng, double scale = 1.0) {
  for (auto& x : m.d) x = rng.uniform(-scale, scale);
}

inline mvn::Matrix random_matrix(int r, int c, mvn::Rng& rng, double scale = 1.0) {
  mvn::Matrix m(r, c);
  fill_random(m, rng, scale);
  return m;
}

inline double rel_err(double a, double b) {
  double denom = std::max(std::abs(a) + std::abs(b), 1e-7);
  return std::abs(a - b) / denom;
}

// Central finite differences over every scalar of every parameter matrix.
// loss() must recompute the loss from the (mutated) parameters each call.
inline double max_grad_rel_err(std::vector<mvn::Matrix*> params,
                               const std::vector<const mvn::Matrix*>& analytic,
                               const std::function<double()>& loss, double step = 1e-5) {
  double worst = 0.0;
  for (size_t p = 0; p < params.size(); ++p) {
    for (size_t i = 0; i < params[p]->size(); ++i) {
      double saved = params[p]->d[i];
      params[p]->d[i] = saved + step;
      double up = loss();
      params[p]->d[i] = saved - step;
      double down = loss();
      params[p]->d[i] = saved;
      double numeric = (up - down) / (2.0 * step);
      worst = std::max(worst, rel_err(analytic[p]->d[i], numeric));
    }
  }
  return worst;
}

// Fresh scratch directory under the system tmp dir.
inline std::string scratch_dir(const std::string& tag) {
  auto path = std::filesystem::temp_directory_path() /
              ("mvnw_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path.string();
}

}  // namespace mvn_test
