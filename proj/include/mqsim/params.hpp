#pragma once

#include <stdexcept>

#include "mqsim/time.hpp"

namespace mqsim {

// n processes, message delay within [d-u, d], local clocks offset from real
// time by a per-process constant.
struct SystemParams {
  int n = 2;
  Time d = Time(1);
  Time u = Time(0);

  void validate() const {
    if (n < 2) throw std::invalid_argument("SystemParams: n must be at least 2");
    if (!(d > Time(0))) throw std::invalid_argument("SystemParams: d must be positive");
    if (u < Time(0) || u > d) throw std::invalid_argument("SystemParams: u must lie in [0, d]");
  }

  friend bool operator==(const SystemParams& a, const SystemParams& b) {
    return a.n == b.n && a.d == b.d && a.u == b.u;
  }
};

// Largest clock skew an admissible run may exhibit: (1 - 1/n) * u.
inline Time epsilon(const SystemParams& p) {
  return Time(p.n - 1, p.n) * p.u;
}

// Dequeue latency threshold: min{(3d + 2u)/5, d/2 + u}.
// The two branches cross at u = d/6.
inline Time bound_Q(const SystemParams& p) {
  Time branch_a = (Time(3) * p.d + Time(2) * p.u) / Time(5);
  Time branch_b = p.d / Time(2) + p.u;
  return min(branch_a, branch_b);
}

// Stagger between consecutive Dequeue invocations in the scenario families:
// max{0, Q - u}.
inline Time stagger_s(const SystemParams& p) {
  return max(Time(0), bound_Q(p) - p.u);
}

}  // namespace mqsim
