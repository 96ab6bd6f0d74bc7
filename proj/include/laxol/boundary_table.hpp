#pragma once

/// \file
/// Time-gridded values of W(0, t) with the mechanism that produced each node.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "laxol/numerics.hpp"

namespace laxol {

enum class Mechanism { Start, InitialDirect, Follow, Loop };

inline const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::Start: return "start";
    case Mechanism::InitialDirect: return "initial-direct";
    case Mechanism::Follow: return "boundary-follow";
    case Mechanism::Loop: return "loop";
  }
  return "?";
}

struct BoundaryTable {
  std::vector<double> t;
  std::vector<long double> W;
  std::vector<Mechanism> mechanism;
  /// Origin node of the winning follow step or loop; -1 otherwise.
  std::vector<int> from;
  /// Minimizing y for initial-direct nodes.
  std::vector<double> arg;
  std::vector<double> ub_bar;

  std::size_t size() const { return t.size(); }
  double horizon() const { return t.empty() ? 0.0 : t.back(); }
  double step() const {
    return t.size() < 2 ? 0.0 : (t.back() - t.front()) / (t.size() - 1);
  }

  /// W(0, tau) by linear interpolation between nodes.
  long double value_at(double tau) const {
    if (t.empty() || tau < 0.0 || tau > horizon() * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "boundary table: tau = " << tau << " beyond horizon "
          << horizon();
      throw ConfigError(msg.str());
    }
    auto it = std::upper_bound(t.begin(), t.end(), tau);
    if (it == t.end()) return W.back();
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    if (k == 0) return W.front();
    const long double w = (static_cast<long double>(tau) - t[k - 1]) /
                          (static_cast<long double>(t[k]) - t[k - 1]);
    return W[k - 1] + w * (W[k] - W[k - 1]);
  }

  /// value_at(tau) - value_at(ref) without forming either value, so the
  /// difference keeps its digits when W itself is large.
  long double value_gap(double tau, double ref) const {
    auto interp = [&](double s) -> std::pair<std::size_t, long double> {
      value_at(s);
      auto it = std::upper_bound(t.begin(), t.end(), s);
      if (it == t.end()) return {t.size() - 1, 0.0L};
      const std::size_t k = static_cast<std::size_t>(it - t.begin());
      if (k == 0) return {0, 0.0L};
      const long double w = (static_cast<long double>(s) - t[k - 1]) /
                            (static_cast<long double>(t[k]) - t[k - 1]);
      return {k - 1, w * (W[k] - W[k - 1])};
    };
    const auto [ka, da] = interp(tau);
    const auto [kb, db] = interp(ref);
    return (W[ka] - W[kb]) + (da - db);
  }

  /// Nearest node index to tau.
  std::size_t node_of(double tau) const {
    auto it = std::lower_bound(t.begin(), t.end(), tau);
    if (it == t.end()) return t.size() - 1;
    std::size_t k = static_cast<std::size_t>(it - t.begin());
    if (k > 0 && std::abs(t[k - 1] - tau) < std::abs(t[k] - tau)) --k;
    return k;
  }
};

}  // namespace laxol
