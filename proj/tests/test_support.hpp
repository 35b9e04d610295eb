#pragma once

// Test-only helpers: fixed models and a path enumerator that shares no code
// with the library's likelihood routines.

#include <cmath>
#include <cstdint>
#include <vector>

#include "psohmm/hmm.hpp"

namespace psohmm::testing {

/// pi=[1,0], trans=[[0,1],[1,0]], emit rows one-hot on symbols 0 and 1.
inline HmmModel alternating_model() {
  HmmModel model(2, 2, 1);
  model.pi = {1.0, 0.0};
  model.trans = {0.0, 1.0, 1.0, 0.0};
  model.emit = {1.0, 0.0, 0.0, 1.0};
  return model;
}

/// Two-state, three-symbol model used for frozen reference values.
inline HmmModel reference_model(std::size_t dims) {
  HmmModel model(2, 3, dims);
  model.pi = {0.6, 0.4};
  model.trans = {0.7, 0.3, 0.4, 0.6};
  std::vector<double> emit = {0.5, 0.4, 0.1, 0.1, 0.3, 0.6};
  if (dims == 2) emit.insert(emit.end(), {0.2, 0.5, 0.3, 0.6, 0.3, 0.1});
  model.emit = emit;
  return model;
}

struct Enumeration {
  double total = 0.0;                 // sum of joint probabilities
  double best = -1.0;                 // largest joint probability
  std::vector<std::size_t> best_path;  // lexicographically first argmax
};

/// Walks every hidden path recursively, multiplying parameters directly.
inline Enumeration enumerate_paths(const HmmModel& model, const ObservationSequence& obs) {
  Enumeration out;
  std::vector<std::size_t> path(obs.length());
  auto emit = [&](std::size_t t, std::size_t state) {
    double p = 1.0;
    for (std::size_t r = 0; r < obs.dims(); ++r) {
      p *= model.emit[(r * model.n + state) * model.m + obs.step(t)[r]];
    }
    return p;
  };
  auto visit = [&](auto&& self, std::size_t t, double prob) -> void {
    if (t == obs.length()) {
      out.total += prob;
      if (prob > out.best) {
        out.best = prob;
        out.best_path = path;
      }
      return;
    }
    for (std::size_t s = 0; s < model.n; ++s) {
      path[t] = s;
      const double step = t == 0 ? model.pi[s] : model.trans[path[t - 1] * model.n + s];
      self(self, t + 1, prob * step * emit(t, s));
    }
  };
  visit(visit, 0, 1.0);
  return out;
}

/// Uniformly random symbols (not model-generated), for stress instances.
inline ObservationSequence random_symbols(std::size_t length, std::size_t m, std::size_t d,
                                          Rng& rng) {
  std::vector<std::uint32_t> symbols(length * d);
  for (auto& s : symbols) s = static_cast<std::uint32_t>(rng.uniform() * static_cast<double>(m));
  return ObservationSequence(d, std::move(symbols));
}

}  // namespace psohmm::testing
