#include <algorithm>
#include <cmath>

#include "vertalign/geometry.hpp"

namespace vertalign {

double SlabSide::depth() const {
  double d = 0.0;
  for (double h : heights) d += h;
  return d;
}

double SlabSide::volume(double depth) const {
  double v = 0.0;
  double below = 0.0;
  for (int k = 0; k < count() && depth > below; ++k) {
    v += areas[k] * std::min(heights[k], depth - below);
    below += heights[k];
  }
  return v;
}

SlabSide merge_non_increasing(const SlabSide& raw) {
  struct Block {
    double volume;
    double height;
    double area() const { return volume / height; }
  };
  std::vector<Block> stack;
  for (int k = 0; k < raw.count(); ++k) {
    stack.push_back({raw.areas[k] * raw.heights[k], raw.heights[k]});
    while (stack.size() >= 2) {
      const Block& top = stack.back();
      const Block& prev = stack[stack.size() - 2];
      const double tol = 1e-12 * std::max(1.0, std::abs(prev.area()));
      if (top.area() > prev.area() + tol) break;
      Block merged{prev.volume + top.volume, prev.height + top.height};
      stack.pop_back();
      stack.back() = merged;
    }
  }
  SlabSide out;
  for (const Block& b : stack) {
    out.areas.push_back(std::max(0.0, b.area()));
    out.heights.push_back(b.height);
  }
  return out;
}

namespace {

SlabSide raw_side(const CrossSectionTable& table, double length, Side side, int count) {
  const double extent = side == Side::kCut ? -table.min_offset() : table.max_offset();
  const double sign = side == Side::kCut ? -1.0 : 1.0;
  SlabSide raw;
  const double h = extent / count;
  double prev_area = 0.0;
  for (int k = 1; k <= count; ++k) {
    const double depth = k == count ? extent : h * k;
    const double area = table.area(side, sign * depth);
    const double band = depth - h * (k - 1);
    raw.areas.push_back(length * (area - prev_area) / band);
    raw.heights.push_back(band);
    prev_area = area;
  }
  return raw;
}

}  // namespace

SlabApproximation build_slabs(const CrossSectionTable& table, double section_length,
                              int cut_slabs, int fill_slabs) {
  if (cut_slabs < 1 || fill_slabs < 1) throw GeometryError("slab count must be at least 1");
  if (!(section_length > 0.0)) throw GeometryError("section length must be positive");
  CrossSectionTable checked = table;
  normalize_table(checked);
  SlabApproximation out;
  out.cut = merge_non_increasing(raw_side(checked, section_length, Side::kCut, cut_slabs));
  out.fill = merge_non_increasing(raw_side(checked, section_length, Side::kFill, fill_slabs));
  return out;
}

}  // namespace vertalign
