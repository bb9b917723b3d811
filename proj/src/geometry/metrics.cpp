#include <cmath>

#include "vertalign/geometry.hpp"

namespace vertalign {
namespace {

void check_shape(const GroupedValues& actual, const GroupedValues& predicted) {
  if (actual.size() != predicted.size()) throw GeometryError("metric inputs differ in section count");
  for (std::size_t s = 0; s < actual.size(); ++s) {
    if (actual[s].size() != predicted[s].size()) {
      throw GeometryError("metric inputs differ in offset count");
    }
  }
}

}  // namespace

double mape(const GroupedValues& actual, const GroupedValues& predicted) {
  check_shape(actual, predicted);
  double outer = 0.0;
  int sections = 0;
  for (std::size_t s = 0; s < actual.size(); ++s) {
    double inner = 0.0;
    int offsets = 0;
    for (std::size_t j = 0; j < actual[s].size(); ++j) {
      const double p = actual[s][j];
      if (p == 0.0) continue;
      inner += std::abs(p - predicted[s][j]) / std::abs(p);
      ++offsets;
    }
    if (offsets == 0) continue;
    outer += 100.0 * inner / offsets;
    ++sections;
  }
  if (sections == 0) throw GeometryError("MAPE undefined: no non-zero actual values");
  return outer / sections;
}

double rmse(const GroupedValues& actual, const GroupedValues& predicted) {
  check_shape(actual, predicted);
  double outer = 0.0;
  int sections = 0;
  for (std::size_t s = 0; s < actual.size(); ++s) {
    if (actual[s].empty()) continue;
    double sq = 0.0;
    for (std::size_t j = 0; j < actual[s].size(); ++j) {
      const double r = actual[s][j] - predicted[s][j];
      sq += r * r;
    }
    outer += std::sqrt(sq / static_cast<double>(actual[s].size()));
    ++sections;
  }
  if (sections == 0) throw GeometryError("RMSE undefined: empty input");
  return outer / sections;
}

ErrorMetrics area_error_metrics(const CrossSectionSet& tables, const AreaPredictor& predicted) {
  ErrorMetrics m;
  for (const Side side : {Side::kCut, Side::kFill}) {
    GroupedValues actual, pred;
    for (const auto& [key, t] : tables) {
      std::vector<double> a, p;
      for (const AreaSample& s : t.samples) {
        if (side == Side::kCut ? s.offset >= 0.0 : s.offset <= 0.0) continue;
        a.push_back(side == Side::kCut ? s.cut_area : s.fill_area);
        p.push_back(predicted(key, side, s.offset));
      }
      if (a.empty()) continue;
      actual.push_back(std::move(a));
      pred.push_back(std::move(p));
    }
    if (actual.empty()) continue;
    const double e = mape(actual, pred);
    const double r = rmse(actual, pred);
    if (side == Side::kCut) {
      m.mape_cut = e;
      m.rmse_cut = r;
    } else {
      m.mape_fill = e;
      m.rmse_fill = r;
    }
  }
  return m;
}

}  // namespace vertalign
