#include "pmjp/state_space.hpp"

#include <algorithm>
#include <numeric>

namespace pmjp {

std::uint64_t StateBox::raw_size() const {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (upper[i] < lower[i]) return 0;
    n *= static_cast<std::uint64_t>(upper[i] - lower[i] + 1);
  }
  return n;
}

bool StateBox::contains(const State& s) const {
  if (s.size() != upper.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < lower[i] || s[i] > upper[i]) return false;
  if (invariant) {
    long v = 0;
    for (std::size_t i = 0; i < s.size(); ++i) v += invariant->coeffs[i] * s[i];
    if (v != invariant->value) return false;
  }
  return true;
}

std::size_t StateHash::operator()(const State& s) const {
  std::size_t h = 0x811c9dc5;
  for (int c : s) h = (h ^ static_cast<std::size_t>(c + 1)) * 0x01000193;
  return h;
}

long StateSpace::index(const State& s) const {
  if (!box.contains(s)) return -1;
  if (!strides_.empty()) {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      idx += strides_[i] * static_cast<std::uint64_t>(s[i] - box.lower[i]);
    return static_cast<long>(idx);
  }
  auto it = index_.find(s);
  return it == index_.end() ? -1 : it->second;
}

StateSpace enumerate_box(const StateBox& box, std::uint64_t cap) {
  if (box.lower.size() != box.upper.size())
    throw dimension_error("box bounds have different lengths");
  for (std::size_t i = 0; i < box.lower.size(); ++i)
    if (box.lower[i] > box.upper[i])
      throw validation_error("box lower bound exceeds upper bound");
  if (box.invariant && box.invariant->coeffs.size() != box.lower.size())
    throw dimension_error("invariant coefficient length mismatch");

  std::uint64_t raw = box.raw_size();
  if (raw > cap)
    throw resource_error("state space of " + std::to_string(raw) +
                         " states exceeds the cap of " + std::to_string(cap));

  StateSpace space;
  space.box = box;
  const std::size_t m = box.lower.size();
  // lexicographic, first component most significant
  State s = box.lower;
  while (true) {
    if (box.contains(s)) space.states.push_back(s);
    std::size_t i = m;
    while (i > 0) {
      --i;
      if (s[i] < box.upper[i]) {
        ++s[i];
        break;
      }
      s[i] = box.lower[i];
      if (i == 0) {
        i = m + 1;  // rolled over completely
        break;
      }
    }
    if (i == m + 1 || m == 0) break;
  }

  if (!box.invariant) {
    space.strides_.assign(m, 1);
    for (std::size_t i = m; i-- > 1;)
      space.strides_[i - 1] =
          space.strides_[i] *
          static_cast<std::uint64_t>(box.upper[i] - box.lower[i] + 1);
  } else {
    space.index_.reserve(space.states.size() * 2);
    for (std::size_t k = 0; k < space.states.size(); ++k)
      space.index_.emplace(space.states[k], static_cast<long>(k));
  }
  return space;
}

double Generator::max_exit_rate() const {
  double m = 0.0;
  for (double d : diag) m = std::max(m, -d);
  return m;
}

void Generator::apply_transpose(const std::vector<double>& x,
                                std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    y[i] += xi * diag[i];
    if (xi == 0.0) continue;
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
      y[col[p]] += xi * val[p];
  }
}

Generator build_generator(const StateSpace& space, const Model& model,
                          const std::vector<double>& theta) {
  if (theta.size() != model.parameter_count())
    throw dimension_error("parameter vector length mismatch");
  Generator gen;
  gen.n = space.size();
  gen.row_ptr.assign(gen.n + 1, 0);
  gen.diag.assign(gen.n, 0.0);
  gen.col.reserve(gen.n * model.reactions.size());
  gen.val.reserve(gen.n * model.reactions.size());

  State target;
  for (std::size_t i = 0; i < gen.n; ++i) {
    const State& s = space.states[i];
    double total = 0.0;
    for (const auto& r : model.reactions) {
      double rate = evaluate_propensity(r, s, theta[r.parameter_index]);
      if (rate <= 0.0) continue;
      total += rate;
      target = s;
      bool nonneg = true;
      for (std::size_t c = 0; c < target.size(); ++c) {
        target[c] += r.update[c];
        if (target[c] < 0) nonneg = false;
      }
      // out-of-box targets contribute to the diagonal only
      long j = nonneg ? space.index(target) : -1;
      if (j >= 0) {
        gen.col.push_back(j);
        gen.val.push_back(rate);
      }
    }
    gen.diag[i] = -total;
    gen.row_ptr[i + 1] = gen.col.size();
  }
  return gen;
}

StateBox truncation_from_observations(const ObservationSet& observations,
                                      int margin) {
  observations.validate();
  if (margin < 0) throw validation_error("negative truncation margin");
  std::size_t m = observations.points[0].state.size();
  StateBox box;
  box.lower.assign(m, 0);
  box.upper.assign(m, 0);
  for (const auto& obs : observations.points)
    for (std::size_t i = 0; i < m; ++i)
      box.upper[i] = std::max(box.upper[i], obs.state[i]);
  for (std::size_t i = 0; i < m; ++i) box.upper[i] += margin;
  return box;
}

}  // namespace pmjp
