#include "psohmm/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psohmm {

namespace {

void check_row(std::span<const double> row, const std::string& label, bool check_sum,
               std::vector<Violation>& out) {
  double sum = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    const double v = row[k];
    sum += v;
    if (std::isnan(v)) {
      out.push_back({label + "[" + std::to_string(k) + "]", "out of range",
                     std::numeric_limits<double>::quiet_NaN()});
    } else if (v < 0.0) {
      // breaks both non-negativity and the [0,1] box
      out.push_back({label + "[" + std::to_string(k) + "]", "negative", -v});
      out.push_back({label + "[" + std::to_string(k) + "]", "out of range", -v});
    } else if (v > 1.0) {
      out.push_back({label + "[" + std::to_string(k) + "]", "out of range", v - 1.0});
    }
  }
  if (check_sum && !(std::abs(sum - 1.0) <= kSumTolerance)) {
    out.push_back({label, "row sum", std::abs(sum - 1.0)});
  }
}

void fill_normalized(std::span<double> row, Rng& rng) {
  double sum = 0.0;
  for (double& v : row) {
    v = rng.uniform_positive();
    sum += v;
  }
  for (double& v : row) v /= sum;
}

}  // namespace

HmmModel::HmmModel(std::size_t hidden, std::size_t symbols, std::size_t dims)
    : n(hidden),
      m(symbols),
      d(dims),
      pi(hidden, 0.0),
      trans(hidden * hidden, 0.0),
      emit(dims * hidden * symbols, 0.0) {}

HmmModel HmmModel::uniform(std::size_t hidden, std::size_t symbols, std::size_t dims) {
  HmmModel model(hidden, symbols, dims);
  std::fill(model.pi.begin(), model.pi.end(), 1.0 / static_cast<double>(hidden));
  std::fill(model.trans.begin(), model.trans.end(), 1.0 / static_cast<double>(hidden));
  std::fill(model.emit.begin(), model.emit.end(), 1.0 / static_cast<double>(symbols));
  return model;
}

ObservationSequence::ObservationSequence(std::size_t dims, std::vector<std::uint32_t> symbols)
    : dims_(dims), symbols_(std::move(symbols)) {
  if (dims_ == 0) throw std::invalid_argument("observation sequence needs d >= 1");
  if (symbols_.size() % dims_ != 0) {
    throw std::invalid_argument("observation sequence: symbol count is not a multiple of d");
  }
}

ObservationSequence ObservationSequence::from_symbols(std::vector<std::uint32_t> symbols) {
  return ObservationSequence(1, std::move(symbols));
}

std::uint32_t ObservationSequence::max_symbol() const {
  return symbols_.empty() ? 0 : *std::max_element(symbols_.begin(), symbols_.end());
}

std::vector<Violation> validate_model(const HmmModel& model) {
  std::vector<Violation> out;
  const auto n = model.n, m = model.m, d = model.d;
  if (model.pi.size() != n || model.trans.size() != n * n || model.emit.size() != d * n * m) {
    out.push_back({"shape", "size mismatch", 0.0});
    return out;
  }
  check_row(model.pi, "pi", true, out);
  for (std::size_t i = 0; i < n; ++i) {
    check_row(model.trans_row(i), "trans[" + std::to_string(i) + "]", true, out);
  }
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      check_row(model.emit_row(r, i),
                "emit[" + std::to_string(r) + "][" + std::to_string(i) + "]", true, out);
    }
  }
  return out;
}

bool is_valid(const HmmModel& model) { return validate_model(model).empty(); }

void require_valid(const HmmModel& model) {
  if (model.n == 0 || model.m == 0 || model.d == 0) {
    throw ConstraintViolationError("model dimensions n, m, d must all be positive");
  }
  const auto violations = validate_model(model);
  if (!violations.empty()) {
    const auto& v = violations.front();
    std::ostringstream msg;
    msg << "invalid model: " << v.where << " " << v.what << " (deviation " << v.deviation << ")";
    if (violations.size() > 1) msg << " and " << violations.size() - 1 << " more";
    throw ConstraintViolationError(msg.str());
  }
}

HmmModel random_model(std::size_t n, std::size_t m, std::size_t d, Rng& rng) {
  if (n == 0 || m == 0 || d == 0) {
    throw std::invalid_argument("random_model: n, m and d must be at least 1");
  }
  HmmModel model(n, m, d);
  fill_normalized(model.pi, rng);
  for (std::size_t i = 0; i < n; ++i) {
    fill_normalized(std::span<double>(model.trans).subspan(i * n, n), rng);
  }
  for (std::size_t row = 0; row < d * n; ++row) {
    fill_normalized(std::span<double>(model.emit).subspan(row * m, m), rng);
  }
  return model;
}

ObservationSequence sample_sequence(const HmmModel& model, std::size_t length, Rng& rng) {
  require_valid(model);
  if (length == 0) throw std::invalid_argument("sample_sequence: length must be at least 1");
  std::vector<std::uint32_t> symbols;
  symbols.reserve(length * model.d);
  std::size_t state = rng.categorical(model.pi);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) state = rng.categorical(model.trans_row(state));
    for (std::size_t r = 0; r < model.d; ++r) {
      symbols.push_back(static_cast<std::uint32_t>(rng.categorical(model.emit_row(r, state))));
    }
  }
  return ObservationSequence(model.d, std::move(symbols));
}

void check_compatible(const HmmModel& model, const ObservationSequence& obs) {
  if (obs.length() == 0) throw std::invalid_argument("observation sequence is empty");
  if (obs.dims() != model.d) {
    throw std::invalid_argument("observation has d=" + std::to_string(obs.dims()) +
                                " but model has d=" + std::to_string(model.d));
  }
  if (obs.max_symbol() >= model.m) {
    throw std::invalid_argument("observation symbol " + std::to_string(obs.max_symbol()) +
                                " out of range for m=" + std::to_string(model.m));
  }
}

double emission_probability(const HmmModel& model, const ObservationSequence& obs,
                            std::size_t t, std::size_t i) {
  double p = 1.0;
  const auto step = obs.step(t);
  for (std::size_t r = 0; r < model.d; ++r) p *= model.b(r, i, step[r]);
  return p;
}

namespace {

// Scaled forward pass. alpha holds T x n normalized rows; scale[t] is the
// normalizer of step t, so log P(O) = sum log scale[t]. Returns false as soon
// as a step has zero total mass.
bool scaled_forward(const HmmModel& model, const ObservationSequence& obs,
                    std::vector<double>& alpha, std::vector<double>& scale) {
  const auto n = model.n;
  const auto T = obs.length();
  alpha.assign(T * n, 0.0);
  scale.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double prior = 0.0;
      if (t == 0) {
        prior = model.pi[j];
      } else {
        for (std::size_t i = 0; i < n; ++i) prior += alpha[(t - 1) * n + i] * model.a(i, j);
      }
      const double v = prior * emission_probability(model, obs, t, j);
      alpha[t * n + j] = v;
      total += v;
    }
    if (!(total > 0.0)) return false;
    scale[t] = total;
    for (std::size_t j = 0; j < n; ++j) alpha[t * n + j] /= total;
  }
  return true;
}

}  // namespace

double forward_log_likelihood(const HmmModel& model, const ObservationSequence& obs) {
  check_compatible(model, obs);
  std::vector<double> alpha, scale;
  if (!scaled_forward(model, obs, alpha, scale)) return kNegInf;
  double loglik = 0.0;
  for (double c : scale) loglik += std::log(c);
  return loglik;
}

double path_log_probability(const HmmModel& model, const ObservationSequence& obs,
                            std::span<const std::size_t> path) {
  check_compatible(model, obs);
  if (path.size() != obs.length()) throw std::invalid_argument("path length mismatch");
  double lp = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    const double step = (t == 0 ? model.pi[path[0]] : model.a(path[t - 1], path[t])) *
                        emission_probability(model, obs, t, path[t]);
    lp += std::log(step);
  }
  return lp;
}

double brute_force_log_likelihood(const HmmModel& model, const ObservationSequence& obs) {
  check_compatible(model, obs);
  const auto n = model.n;
  const auto T = obs.length();
  std::size_t paths = 1;
  for (std::size_t t = 0; t < T; ++t) {
    if (paths > kMaxEnumeratedPaths / n) {
      throw std::invalid_argument("brute_force_log_likelihood: n^T exceeds path guard");
    }
    paths *= n;
  }
  // Odometer over every path q_1..q_T; each term is
  // pi[q1] b(q1,o1) a(q1,q2) b(q2,o2) ... a(q_{T-1},q_T) b(q_T,o_T).
  std::vector<std::size_t> path(T, 0);
  double total = 0.0;
  for (std::size_t p = 0; p < paths; ++p) {
    double term = model.pi[path[0]] * emission_probability(model, obs, 0, path[0]);
    for (std::size_t t = 1; t < T && term > 0.0; ++t) {
      term *= model.a(path[t - 1], path[t]) * emission_probability(model, obs, t, path[t]);
    }
    total += term;
    for (std::size_t t = T; t-- > 0;) {
      if (++path[t] < n) break;
      path[t] = 0;
    }
  }
  return total > 0.0 ? std::log(total) : kNegInf;
}

ViterbiResult viterbi_decode(const HmmModel& model, const ObservationSequence& obs) {
  check_compatible(model, obs);
  const auto n = model.n;
  const auto T = obs.length();
  std::vector<double> delta(T * n, kNegInf);
  std::vector<std::size_t> back(T * n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    delta[j] = std::log(model.pi[j]) + std::log(emission_probability(model, obs, 0, j));
  }
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      double best = kNegInf;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double cand = delta[(t - 1) * n + i] + std::log(model.a(i, j));
        if (cand > best) {
          best = cand;
          arg = i;
        }
      }
      delta[t * n + j] = best + std::log(emission_probability(model, obs, t, j));
      back[t * n + j] = arg;
    }
  }
  ViterbiResult result;
  result.path.assign(T, 0);
  std::size_t last = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (delta[(T - 1) * n + j] > result.log_probability) {
      result.log_probability = delta[(T - 1) * n + j];
      last = j;
    }
  }
  result.path[T - 1] = last;
  for (std::size_t t = T - 1; t > 0; --t) result.path[t - 1] = back[t * n + result.path[t]];
  return result;
}

namespace {

void normalize_or_uniform(std::span<double> row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  if (sum > 0.0) {
    for (double& v : row) v /= sum;
  } else {
    std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
  }
}

}  // namespace

HmmModel baum_welch_step(const HmmModel& model, const ObservationSequence& obs) {
  require_valid(model);
  check_compatible(model, obs);
  const auto n = model.n;
  const auto T = obs.length();

  std::vector<double> alpha, scale;
  if (!scaled_forward(model, obs, alpha, scale)) {
    throw DegenerateInputError("baum_welch_step: observation sequence has probability zero");
  }

  // Scaled backward pass sharing the forward normalizers.
  std::vector<double> beta(T * n, 0.0);
  std::vector<double> emis(T * n);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < n; ++j) emis[t * n + j] = emission_probability(model, obs, t, j);
  }
  for (std::size_t i = 0; i < n; ++i) beta[(T - 1) * n + i] = 1.0;
  for (std::size_t t = T - 1; t > 0; --t) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        acc += model.a(i, j) * emis[t * n + j] * beta[t * n + j];
      }
      beta[(t - 1) * n + i] = acc / scale[t];
    }
  }

  HmmModel next(n, model.m, model.d);
  std::vector<double> gamma(n);
  for (std::size_t t = 0; t < T; ++t) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gamma[i] = alpha[t * n + i] * beta[t * n + i];
      norm += gamma[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double g = gamma[i] / norm;
      if (t == 0) next.pi[i] = g;
      const auto step = obs.step(t);
      for (std::size_t r = 0; r < model.d; ++r) next.b(r, i, step[r]) += g;
    }
    if (t + 1 < T) {
      // xi_t(i, j) = alpha_t(i) a_ij b_j(o_{t+1}) beta_{t+1}(j) / scale_{t+1}
      for (std::size_t i = 0; i < n; ++i) {
        if (alpha[t * n + i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          next.a(i, j) += alpha[t * n + i] * model.a(i, j) * emis[(t + 1) * n + j] *
                          beta[(t + 1) * n + j] / scale[t + 1];
        }
      }
    }
  }

  normalize_or_uniform(next.pi);
  for (std::size_t i = 0; i < n; ++i) {
    normalize_or_uniform(std::span<double>(next.trans).subspan(i * n, n));
  }
  for (std::size_t row = 0; row < model.d * n; ++row) {
    normalize_or_uniform(std::span<double>(next.emit).subspan(row * model.m, model.m));
  }
  return next;
}

BaumWelchResult baum_welch_train(const HmmModel& model, const ObservationSequence& obs,
                                 std::size_t iterations) {
  BaumWelchResult result{model, {}};
  result.trace.reserve(iterations + 1);
  result.trace.push_back(forward_log_likelihood(model, obs));
  for (std::size_t it = 0; it < iterations; ++it) {
    result.model = baum_welch_step(result.model, obs);
    result.trace.push_back(forward_log_likelihood(result.model, obs));
  }
  return result;
}

}  // namespace psohmm
