#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "vertalign/oracle.hpp"

namespace vertalign {
namespace {

constexpr double kFlowEps = 1e-12;
constexpr double kGradeTol = 1e-9;

// Successive shortest paths with Bellman-Ford; small graphs only.
class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : head_(n, -1) {}

  int node() {
    head_.push_back(-1);
    return static_cast<int>(head_.size()) - 1;
  }

  void arc(int u, int v, double cap, double cost, double lower = 0.0) {
    if (lower > 0.0) {
      fixed_cost_ += lower * cost;
      excess_.resize(head_.size(), 0.0);
      excess_[v] += lower;
      excess_[u] -= lower;
      cap -= lower;
    }
    if (cap <= 0.0) return;
    add(u, v, cap, cost);
  }

  // Cost of the cheapest flow meeting every lower bound, +inf if none exists.
  double solve() {
    excess_.resize(head_.size(), 0.0);
    const int ss = node();
    const int tt = node();
    excess_.resize(head_.size(), 0.0);
    double need = 0.0;
    for (int v = 0; v < ss; ++v) {
      if (excess_[v] > 0.0) {
        add(ss, v, excess_[v], 0.0);
        need += excess_[v];
      } else if (excess_[v] < 0.0) {
        add(v, tt, -excess_[v], 0.0);
      }
    }
    double sent = 0.0;
    double cost = fixed_cost_;
    const int n = static_cast<int>(head_.size());
    std::vector<double> dist(n);
    std::vector<int> via(n);
    while (sent < need * (1.0 - 1e-12) - kFlowEps) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(via.begin(), via.end(), -1);
      dist[ss] = 0.0;
      for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (int u = 0; u < n; ++u) {
          if (dist[u] == kInf) continue;
          for (int a = head_[u]; a >= 0; a = next_[a]) {
            if (cap_[a] <= kFlowEps) continue;
            const double d = dist[u] + cost_[a];
            if (d < dist[to_[a]] - 1e-12) {
              dist[to_[a]] = d;
              via[to_[a]] = a;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (dist[tt] == kInf) return kInf;
      double push = need - sent;
      for (int v = tt; v != ss; v = to_[via[v] ^ 1]) push = std::min(push, cap_[via[v]]);
      for (int v = tt; v != ss; v = to_[via[v] ^ 1]) {
        cap_[via[v]] -= push;
        cap_[via[v] ^ 1] += push;
      }
      sent += push;
      cost += push * dist[tt];
    }
    return cost;
  }

 private:
  void add(int u, int v, double cap, double cost) {
    for (int k = 0; k < 2; ++k) {
      to_.push_back(k == 0 ? v : u);
      cap_.push_back(k == 0 ? cap : 0.0);
      cost_.push_back(k == 0 ? cost : -cost);
      const int from = k == 0 ? u : v;
      next_.push_back(head_[from]);
      head_[from] = static_cast<int>(to_.size()) - 1;
    }
  }

  std::vector<int> head_, next_, to_;
  std::vector<double> cap_, cost_;
  std::vector<double> excess_;
  double fixed_cost_ = 0.0;
};

VolumeCaps caps_of(const CapSet& caps, const SectionKey& key) {
  const auto it = caps.find(key);
  return it == caps.end() ? VolumeCaps{} : it->second;
}

double material_cost(const RoadNetwork& net, const NetworkIndex& idx, const VolumeFunction& volume,
                     const CapSet& caps, const std::vector<std::vector<double>>& offsets,
                     const std::vector<double>& zoff, int m) {
  const int nh = net.haul_count();
  const int nr = static_cast<int>(net.roads.size());
  const int ne = static_cast<int>(net.intersections.size());
  const Material& mat = net.materials[m];
  MinCostFlow g(2);
  const int s = 0, t = 1;
  g.arc(t, s, kInf, 0.0);

  // Directed haul layers: plus carries toward higher sections, minus toward lower.
  std::vector<std::vector<std::vector<int>>> plus(nh), minus(nh);
  std::vector<std::vector<int>> junction(nh);
  for (int h = 0; h < nh; ++h) {
    plus[h].resize(nr);
    minus[h].resize(nr);
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < net.roads[i].section_count(); ++j) {
        plus[h][i].push_back(g.node());
        minus[h][i].push_back(g.node());
      }
    }
    for (int e = 0; e < ne; ++e) junction[h].push_back(g.node());
  }

  // Cut and fill owners; lower bounds are the volumes implied by the offset.
  auto owner = [&](const SectionKey& key, double u, const VolumeCaps& cap, auto&& attach) {
    const double need_cut = u < 0.0 ? volume(key, Side::kCut, -u) : 0.0;
    const double need_fill = u > 0.0 ? volume(key, Side::kFill, u) : 0.0;
    if (need_cut > nh * cap.cut + 1e-9 || need_fill > nh * cap.fill + 1e-9) return false;
    const int cut_in = g.node(), cut = g.node(), fill = g.node(), fill_out = g.node();
    g.arc(s, cut_in, kInf, 0.0, need_cut);
    g.arc(fill_out, t, kInf, 0.0, need_fill);
    for (int h = 0; h < nh; ++h) {
      g.arc(cut_in, cut, cap.cut, mat.excavation_cost + net.haul_types[h].loading_cost[m]);
      g.arc(fill, fill_out, cap.fill, mat.embankment_cost);
      attach(h, cut, fill);
    }
    return true;
  };

  for (int i = 0; i < nr; ++i) {
    const Road& road = net.roads[i];
    const int n = road.section_count();
    for (int j = 0; j < n; ++j) {
      for (int h = 0; h < nh; ++h) {
        const double c = net.haul_types[h].haul_cost[m];
        if (j + 1 < n) {
          const double d = road.sections[j + 1].station - road.sections[j].station;
          g.arc(plus[h][i][j], plus[h][i][j + 1], kInf, c * d);
          g.arc(minus[h][i][j + 1], minus[h][i][j], kInf, c * d);
        }
      }
      if (idx.intersection_at(i, j)) continue;
      const SectionKey key{i, j, m};
      const bool ok = owner(key, offsets[i][j], caps_of(caps, key), [&](int h, int cut, int fill) {
        const VolumeCaps cap = caps_of(caps, key);
        g.arc(cut, plus[h][i][j], cap.cut, 0.0);
        g.arc(cut, minus[h][i][j], cap.cut, 0.0);
        g.arc(plus[h][i][j], fill, cap.fill, 0.0);
        g.arc(minus[h][i][j], fill, cap.fill, 0.0);
      });
      if (!ok) return kInf;
    }
  }

  const double transfer = net.config.intersection_transfer_distance;
  for (int e = 0; e < ne; ++e) {
    const SectionKey key = junction_key(net, e, m);
    const bool ok = owner(key, zoff[e], caps_of(caps, key), [&](int h, int cut, int fill) {
      const VolumeCaps cap = caps_of(caps, key);
      g.arc(cut, junction[h][e], cap.cut, 0.0);
      g.arc(junction[h][e], fill, cap.fill, 0.0);
    });
    if (!ok) return kInf;
    for (const Attachment& a : net.intersections[e].attachments) {
      const int last = net.roads[a.road].section_count() - 1;
      for (int h = 0; h < nh; ++h) {
        const double c = net.haul_types[h].haul_cost[m] * transfer;
        const int x = junction[h][e];
        if (a.section == 0) {
          g.arc(x, plus[h][a.road][0], kInf, c);
          g.arc(minus[h][a.road][0], x, kInf, c);
        }
        if (a.section == last) {
          g.arc(plus[h][a.road][last], x, kInf, c);
          g.arc(x, minus[h][a.road][last], kInf, c);
        }
      }
    }
  }

  for (const Pit& pit : net.pits) {
    const double cap = net.config.pit_capacity_constraints ? pit.capacity[m] : kInf;
    const int node = g.node();
    if (pit.kind == PitKind::kBorrow) {
      g.arc(s, node, cap, 0.0);
    } else {
      g.arc(node, t, cap, 0.0);
    }
    for (int h = 0; h < nh; ++h) {
      const double haul = net.haul_types[h].haul_cost[m] * pit.dead_haul_distance;
      const int p = plus[h][pit.road][pit.section];
      const int q = minus[h][pit.road][pit.section];
      if (pit.kind == PitKind::kBorrow) {
        const double c = mat.excavation_cost + net.haul_types[h].loading_cost[m] + haul;
        g.arc(node, p, kInf, c);
        g.arc(node, q, kInf, c);
      } else {
        const double c = mat.embankment_cost + haul;
        g.arc(p, node, kInf, c);
        g.arc(q, node, kInf, c);
      }
    }
  }
  return g.solve();
}

// Maps section elevations of one road to segment-end slopes through the
// unique interpolating spline.
struct SplineMap {
  Eigen::MatrixXd slopes;  // 2 * segments x sections
};

SplineMap spline_map(const RoadNetwork& net, const NetworkIndex& idx, int i) {
  const Road& road = net.roads[i];
  const int ng = road.segment_count();
  const int ns = road.section_count();
  if (ns != ng + 2) {
    throw OracleError("brute force needs segments + 2 sections on road " + std::to_string(i + 1));
  }
  const int n = 3 * ng;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  int r = 0;
  for (int g = 1; g < ng; ++g) {
    const double len = road.segments[g - 1].length;
    a(r, 3 * (g - 1)) = 1.0;
    a(r, 3 * (g - 1) + 1) = len;
    a(r, 3 * (g - 1) + 2) = len * len;
    a(r, 3 * g) = -1.0;
    ++r;
    a(r, 3 * (g - 1) + 1) = 1.0;
    a(r, 3 * (g - 1) + 2) = 2.0 * len;
    a(r, 3 * g + 1) = -1.0;
    ++r;
  }
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, ns);
  for (int j = 0; j < ns; ++j) {
    const int g = idx.segment_of(i, j);
    const double t = road.sections[j].station - road.segments[g].start_station;
    a(r, 3 * g) = 1.0;
    a(r, 3 * g + 1) = t;
    a(r, 3 * g + 2) = t * t;
    rhs(r, j) = 1.0;
    ++r;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < n) throw OracleError("spline through the sections is not unique");
  const Eigen::MatrixXd coef = lu.solve(rhs);
  SplineMap map;
  map.slopes.resize(2 * ng, ns);
  for (int g = 0; g < ng; ++g) {
    const double len = road.segments[g].length;
    map.slopes.row(2 * g) = coef.row(3 * g + 1);
    map.slopes.row(2 * g + 1) = coef.row(3 * g + 1) + 2.0 * len * coef.row(3 * g + 2);
  }
  return map;
}

std::vector<double> grid_values(double lo, double hi, double step) {
  std::vector<double> out;
  const long k0 = static_cast<long>(std::ceil(lo / step - 1e-9));
  const long k1 = static_cast<long>(std::floor(hi / step + 1e-9));
  for (long k = k0; k <= k1; ++k) out.push_back(k * step);
  return out;
}

}  // namespace

VolumeFunction slab_volume_function(const SlabSet& slabs) {
  return [&slabs](const SectionKey& key, Side side, double depth) {
    const auto it = slabs.find(key);
    if (it == slabs.end()) throw OracleError("no slabs for section");
    const SlabSide& s = it->second.side(side);
    if (depth > s.depth() + 1e-9) return kInf;
    return s.volume(depth);
  };
}

double allocation_cost(const RoadNetwork& net, const VolumeFunction& volume, const CapSet& caps,
                       const std::vector<std::vector<double>>& offsets,
                       const std::vector<double>& zoff) {
  const NetworkIndex idx(net);
  double total = 0.0;
  for (int m = 0; m < net.material_count(); ++m) {
    total += material_cost(net, idx, volume, caps, offsets, zoff, m);
    if (total == kInf) return kInf;
  }
  return total;
}

BruteForceResult brute_force_optimum(const RoadNetwork& net, const VolumeFunction& volume,
                                     const CapSet& caps, const GridSpec& grid) {
  if (!(grid.step > 0.0)) throw OracleError("grid step must be positive");
  const ValidationReport rep = validate_network(net);
  if (!rep.ok()) throw OracleError("invalid network:\n" + rep.summary());
  const NetworkIndex idx(net);
  const int nr = static_cast<int>(net.roads.size());
  const int ne = static_cast<int>(net.intersections.size());

  // Free dimensions: non-attached sections, then intersections.
  struct Dim {
    int road = -1, section = -1, junction = -1;
    std::vector<double> values;
  };
  std::vector<Dim> dims;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      if (idx.intersection_at(i, j)) continue;
      const Section& s = net.roads[i].sections[j];
      dims.push_back({i, j, -1, grid_values(s.offset_lower, s.offset_upper, grid.step)});
    }
  }
  for (int e = 0; e < ne; ++e) {
    double lo = net.intersections[e].offset_lower, hi = net.intersections[e].offset_upper;
    for (const Attachment& a : net.intersections[e].attachments) {
      lo = std::max(lo, net.roads[a.road].sections[a.section].offset_lower);
      hi = std::min(hi, net.roads[a.road].sections[a.section].offset_upper);
    }
    dims.push_back({-1, -1, e, grid_values(lo, hi, grid.step)});
  }
  double count = 1.0;
  for (const Dim& d : dims) count *= static_cast<double>(d.values.size());
  if (count > static_cast<double>(grid.cap)) {
    throw OracleError("grid has " + std::to_string(static_cast<long long>(count)) +
                      " combinations, above the cap of " + std::to_string(grid.cap));
  }

  std::vector<SplineMap> maps;
  for (int i = 0; i < nr; ++i) maps.push_back(spline_map(net, idx, i));

  BruteForceResult best;
  std::vector<std::vector<double>> u(nr);
  for (int i = 0; i < nr; ++i) u[i].assign(net.roads[i].section_count(), 0.0);
  std::vector<double> z(ne, 0.0);
  std::vector<std::size_t> pos(dims.size(), 0);
  if (count == 0.0) return best;

  while (true) {
    for (std::size_t d = 0; d < dims.size(); ++d) {
      const double v = dims[d].values[pos[d]];
      if (dims[d].junction >= 0) {
        z[dims[d].junction] = v;
        for (const Attachment& a : net.intersections[dims[d].junction].attachments) u[a.road][a.section] = v;
      } else {
        u[dims[d].road][dims[d].section] = v;
      }
    }
    ++best.combinations;

    bool grade_ok = true;
    for (int i = 0; i < nr && grade_ok; ++i) {
      const Road& road = net.roads[i];
      Eigen::VectorXd y(road.section_count());
      for (int j = 0; j < road.section_count(); ++j) y[j] = road.sections[j].ground_elevation + u[i][j];
      const Eigen::VectorXd slopes = maps[i].slopes * y;
      for (Eigen::Index k = 0; k < slopes.size(); ++k) {
        if (slopes[k] < net.config.grade_lower - kGradeTol || slopes[k] > net.config.grade_upper + kGradeTol) {
          grade_ok = false;
          break;
        }
      }
    }
    if (grade_ok) {
      ++best.grade_feasible;
      const double cost = allocation_cost(net, volume, caps, u, z);
      if (cost < best.cost - 1e-12) {
        best.feasible = true;
        best.cost = cost;
        best.offsets = u;
        best.junction_offsets = z;
      }
    }

    std::size_t d = 0;
    while (d < dims.size()) {
      if (++pos[d] < dims[d].values.size()) break;
      pos[d] = 0;
      ++d;
    }
    if (d == dims.size()) break;
  }
  return best;
}

}  // namespace vertalign
