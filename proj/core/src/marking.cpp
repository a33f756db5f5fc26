#include "kacfem/marking.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace kacfem {

MarkingRule parse_marking(const std::string& spec) {
  const auto parse_theta = [&](const std::string& s) {
    std::size_t used = 0;
    double theta = 0.0;
    try {
      theta = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("marking: bad theta in '" + spec + "'");
    }
    if (used != s.size() || !(theta > 0.0) || theta > 1.0)
      throw std::invalid_argument("marking: theta must be in (0,1] in '" + spec + "'");
    return theta;
  };
  if (spec == "global") return {MarkingKind::global, 1.0};
  if (spec.rfind("max:", 0) == 0) return {MarkingKind::maximum, parse_theta(spec.substr(4))};
  if (spec.rfind("doerfler:", 0) == 0)
    return {MarkingKind::doerfler, parse_theta(spec.substr(9))};
  throw std::invalid_argument("marking: unknown spec '" + spec +
                              "' (use global, max:T, doerfler:T)");
}

std::string marking_to_string(const MarkingRule& rule) {
  char buf[64];
  switch (rule.kind) {
    case MarkingKind::global:
      return "global";
    case MarkingKind::maximum:
      std::snprintf(buf, sizeof(buf), "max:%g", rule.theta);
      return buf;
    case MarkingKind::doerfler:
      std::snprintf(buf, sizeof(buf), "doerfler:%g", rule.theta);
      return buf;
  }
  return "?";
}

std::vector<int> mark(const LocalEstimates& est, const MarkingRule& rule) {
  const int m = static_cast<int>(est.eta.size());
  if (m == 0) throw std::invalid_argument("mark: empty estimates");
  if (!(rule.theta > 0.0) || rule.theta > 1.0)
    throw std::invalid_argument("mark: theta must be in (0,1]");

  const double eta_max = *std::max_element(est.eta.begin(), est.eta.end());
  if (eta_max == 0.0) return {0};

  std::vector<int> marked;
  switch (rule.kind) {
    case MarkingKind::global: {
      marked.resize(m);
      std::iota(marked.begin(), marked.end(), 0);
      break;
    }
    case MarkingKind::maximum: {
      const double threshold = rule.theta * eta_max;
      for (int t = 0; t < m; ++t)
        if (est.eta[t] >= threshold) marked.push_back(t);
      break;
    }
    case MarkingKind::doerfler: {
      std::vector<int> order(m);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return est.eta[a] != est.eta[b] ? est.eta[a] > est.eta[b] : a < b;
      });
      double total = 0.0;
      for (double e : est.eta) total += e * e;
      const double target = rule.theta * rule.theta * total;
      double acc = 0.0;
      for (int t : order) {
        marked.push_back(t);
        acc += est.eta[t] * est.eta[t];
        if (acc >= target) break;
      }
      std::sort(marked.begin(), marked.end());
      break;
    }
  }
  return marked;
}

}  // namespace kacfem
