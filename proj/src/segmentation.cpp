#include "ctxslam/segmentation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "ctxslam/error.hpp"

namespace ctxslam {

namespace {

EnvironmentDistribution distribution_for(std::span<const std::size_t> members,
                                         std::span<const Landmark> landmarks,
                                         const Ontology& ontology, const SemanticsParams& params,
                                         const Rect* rect) {
  std::vector<SegmentLandmark> seg;
  seg.reserve(members.size());
  for (const std::size_t i : members) {
    const Landmark& l = landmarks[i];
    seg.push_back({ontology.class_index(l.feature_class), l.confidence, l.position});
  }
  const SegmentFeatures features = rect ? SegmentFeatures::for_rect(std::move(seg), *rect)
                                        : SegmentFeatures::for_points(std::move(seg));
  return environment_distribution(features, ontology, params);
}

// Convex hull over landmark indices (counter-clockwise, duplicates collapsed).
std::vector<std::size_t> hull_indices(std::span<const std::size_t> members,
                                      std::span<const Landmark> landmarks) {
  std::vector<std::size_t> idx(members.begin(), members.end());
  auto pos = [&](std::size_t i) { return landmarks[i].position; };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Vec2 pa = pos(a);
    const Vec2 pb = pos(b);
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return a < b;
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](std::size_t a, std::size_t b) { return pos(a) == pos(b); }),
            idx.end());
  if (idx.size() < 3) return idx;
  std::vector<std::size_t> hull(2 * idx.size());
  std::size_t k = 0;
  auto turn = [&](std::size_t o, std::size_t a, std::size_t b) {
    return cross(pos(a) - pos(o), pos(b) - pos(o));
  };
  for (const std::size_t q : idx) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], q) <= 0) --k;
    hull[k++] = q;
  }
  for (std::size_t i = idx.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], idx[i]) <= 0) --k;
    hull[k++] = idx[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) return {idx.front(), idx.back()};
  return hull;
}

std::vector<std::pair<std::size_t, std::size_t>> hull_edge_indices(
    const std::vector<std::size_t>& hull) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (hull.size() == 2) edges.emplace_back(hull[0], hull[1]);
  if (hull.size() >= 3)
    for (std::size_t i = 0; i < hull.size(); ++i) edges.emplace_back(hull[i], hull[(i + 1) % hull.size()]);
  return edges;
}

void split(GridSegment& seg, std::span<const Landmark> landmarks,
           const std::vector<std::pair<int, int>>& cells, const Ontology& ontology,
           const GridParams& params) {
  seg.distribution = distribution_for(seg.members, landmarks, ontology, params.semantics, &seg.rect);
  const bool confident = seg.distribution.max_probability >= params.threshold;
  const bool can_split = seg.span >= 2 && seg.span % 2 == 0 && seg.depth < params.max_depth;
  if (confident || seg.members.empty() ||
      static_cast<int>(seg.members.size()) < params.sparsity_floor || !can_split)
    return;

  const int half = seg.span / 2;
  const Vec2 mid = seg.rect.centre();
  for (int qy = 0; qy < 2; ++qy)
    for (int qx = 0; qx < 2; ++qx) {
      GridSegment child;
      child.depth = seg.depth + 1;
      child.row0 = seg.row0 + qy * half;
      child.col0 = seg.col0 + qx * half;
      child.span = half;
      child.rect = Rect{{qx == 0 ? seg.rect.min.x : mid.x, qy == 0 ? seg.rect.min.y : mid.y},
                        {qx == 0 ? mid.x : seg.rect.max.x, qy == 0 ? mid.y : seg.rect.max.y}};
      for (const std::size_t i : seg.members) {
        const auto [r, c] = cells[i];
        if (r >= child.row0 && r < child.row0 + half && c >= child.col0 && c < child.col0 + half)
          child.members.push_back(i);
      }
      split(child, landmarks, cells, ontology, params);
      seg.children.push_back(std::move(child));
    }
}

void collect_leaves(const GridSegment& seg, std::vector<const GridSegment*>& out) {
  if (seg.is_leaf()) {
    out.push_back(&seg);
    return;
  }
  for (const auto& c : seg.children) collect_leaves(c, out);
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<const GridSegment*> GridSegmentation::leaves() const {
  std::vector<const GridSegment*> out;
  for (const auto& r : roots) collect_leaves(r, out);
  return out;
}

GridSegmentation grid_segment(std::span<const Landmark> landmarks, const Rect& bounds,
                              const Ontology& ontology, const GridParams& params) {
  if (params.threshold < 0.0 || params.threshold > 1.0)
    throw InvalidArgument("grid threshold must lie in [0, 1]");
  if (params.sparsity_floor < 1) throw InvalidArgument("sparsity floor must be at least 1");

  constexpr int n = kEvalGridSize;
  constexpr int root_span = n / 3;
  std::vector<std::pair<int, int>> cells;
  cells.reserve(landmarks.size());
  for (const auto& l : landmarks) cells.push_back(LabelGrid::cell_of(bounds, n, n, l.position));

  GridSegmentation out;
  out.bounds = bounds;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      GridSegment seg;
      seg.depth = 0;
      seg.row0 = r * root_span;
      seg.col0 = c * root_span;
      seg.span = root_span;
      const Rect lo = LabelGrid::cell_rect(bounds, n, n, seg.row0, seg.col0);
      const Rect hi = LabelGrid::cell_rect(bounds, n, n, seg.row0 + root_span - 1,
                                           seg.col0 + root_span - 1);
      seg.rect = Rect{lo.min, hi.max};
      for (std::size_t i = 0; i < landmarks.size(); ++i) {
        const auto [lr, lc] = cells[i];
        if (lr >= seg.row0 && lr < seg.row0 + root_span && lc >= seg.col0 &&
            lc < seg.col0 + root_span)
          seg.members.push_back(i);
      }
      split(seg, landmarks, cells, ontology, params);
      out.roots.push_back(std::move(seg));
    }
  return out;
}

void refresh_fragment(Fragment& fragment, std::span<const Landmark> landmarks,
                      const Ontology& ontology, const SemanticsParams& params) {
  std::sort(fragment.members.begin(), fragment.members.end());
  Vec2 sum;
  std::vector<Vec2> pts;
  for (const std::size_t i : fragment.members) {
    sum += landmarks[i].position;
    pts.push_back(landmarks[i].position);
  }
  fragment.centroid =
      fragment.members.empty() ? Vec2{} : sum / static_cast<double>(fragment.members.size());
  fragment.hull = convex_hull(pts);
  fragment.distribution = distribution_for(fragment.members, landmarks, ontology, params, nullptr);
}

std::vector<Fragment> nnn_cluster(std::span<const Landmark> landmarks, const Ontology& ontology,
                                  const SemanticsParams& params, Vec2 seed_position,
                                  int momentum) {
  if (landmarks.empty()) throw InvalidArgument("cannot cluster an empty map");
  if (momentum < 0) throw InvalidArgument("momentum must be non-negative");

  const std::size_t n = landmarks.size();
  std::vector<bool> assigned(n, false);
  std::size_t remaining = n;
  std::vector<Fragment> fragments;
  Vec2 centre = seed_position;

  auto unassigned_by = [&](auto&& key) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (!assigned[i]) idx.push_back(i);
    std::vector<double> k(n, 0.0);
    for (const std::size_t i : idx) k[i] = key(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return k[a] < k[b]; });
    return idx;
  };

  while (remaining > 0) {
    auto order = unassigned_by([&](std::size_t i) { return distance(landmarks[i].position, centre); });
    Fragment frag;
    for (std::size_t k = 0; k < std::min<std::size_t>(3, order.size()); ++k) {
      frag.members.push_back(order[k]);
      assigned[order[k]] = true;
      --remaining;
    }
    refresh_fragment(frag, landmarks, ontology, params);
    double prior = frag.distribution.max_probability;

    while (remaining > 0) {
      const Vec2 c = frag.centroid;
      std::size_t cand = n;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (assigned[i]) continue;
        const double d = distance(landmarks[i].position, c);
        if (d < best) {
          best = d;
          cand = i;
        }
      }
      Fragment grown = frag;
      grown.members.push_back(cand);
      refresh_fragment(grown, landmarks, ontology, params);
      const double posterior = grown.distribution.max_probability;
      if (prior > posterior) break;
      frag = std::move(grown);
      assigned[cand] = true;
      --remaining;
      prior = posterior;
    }
    fragments.push_back(std::move(frag));
    if (remaining == 0) break;

    // Walk outward from the closed cluster, skipping `momentum` landmarks.
    const Fragment& last = fragments.back();
    auto outward = unassigned_by([&](std::size_t i) {
      double d = std::numeric_limits<double>::infinity();
      for (const std::size_t m : last.members)
        d = std::min(d, distance(landmarks[i].position, landmarks[m].position));
      return d;
    });
    const std::size_t skip = std::min<std::size_t>(static_cast<std::size_t>(momentum), outward.size() - 1);
    centre = landmarks[outward[skip]].position;
  }
  return fragments;
}

double default_adjacency_distance(std::span<const Landmark> landmarks) {
  if (landmarks.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < landmarks.size(); ++j)
      if (i != j) best = std::min(best, distance(landmarks[i].position, landmarks[j].position));
    total += best;
  }
  return 2.0 * total / static_cast<double>(landmarks.size());
}

void compute_neighbours(std::vector<Fragment>& fragments, double adjacency) {
  for (auto& f : fragments) f.neighbours.clear();
  for (std::size_t i = 0; i < fragments.size(); ++i)
    for (std::size_t j = i + 1; j < fragments.size(); ++j) {
      if (fragments[i].members.empty() || fragments[j].members.empty()) continue;
      if (hull_distance(fragments[i].hull, fragments[j].hull) < adjacency) {
        fragments[i].neighbours.push_back(j);
        fragments[j].neighbours.push_back(i);
      }
    }
}

std::vector<Fragment> merge_fragments(const std::vector<Fragment>& fragments,
                                      std::span<const Landmark> landmarks,
                                      const Ontology& ontology, const SemanticsParams& params,
                                      double adjacency) {
  DisjointSet sets(fragments.size());
  for (std::size_t i = 0; i < fragments.size(); ++i)
    for (std::size_t j = i + 1; j < fragments.size(); ++j) {
      if (fragments[i].label() != fragments[j].label()) continue;
      if (hull_distance(fragments[i].hull, fragments[j].hull) < adjacency) sets.unite(i, j);
    }

  std::vector<Fragment> merged;
  std::vector<std::size_t> slot(fragments.size(), fragments.size());
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == fragments.size()) {
      slot[root] = merged.size();
      merged.emplace_back();
    }
    auto& m = merged[slot[root]].members;
    m.insert(m.end(), fragments[i].members.begin(), fragments[i].members.end());
  }
  for (auto& f : merged) refresh_fragment(f, landmarks, ontology, params);
  compute_neighbours(merged, adjacency);
  return merged;
}

std::vector<Bisection> detect_bisection(const Fragment& a, const Fragment& b,
                                        std::span<const Landmark> landmarks) {
  const auto edges_a = hull_edge_indices(hull_indices(a.members, landmarks));
  const auto edges_b = hull_edge_indices(hull_indices(b.members, landmarks));
  std::vector<Bisection> out;
  for (const auto& [a1, a2] : edges_a)
    for (const auto& [b1, b2] : edges_b)
      if (segments_intersect(landmarks[a1].position, landmarks[a2].position,
                             landmarks[b1].position, landmarks[b2].position))
        out.push_back({a1, a2, b1, b2});
  return out;
}

void trade_landmarks(Fragment& a, Fragment& b, const Hyperplane& h,
                     std::span<const Landmark> landmarks, const Ontology& ontology,
                     const SemanticsParams& params) {
  std::vector<std::size_t> to_a;
  std::vector<std::size_t> to_b;
  auto route = [&](const std::vector<std::size_t>& members, bool from_a) {
    for (const std::size_t i : members) {
      const double s = h.signed_distance(landmarks[i].position);
      if (s < 0.0 || (s == 0.0 && from_a))
        to_a.push_back(i);
      else
        to_b.push_back(i);
    }
  };
  route(a.members, true);
  route(b.members, false);
  a.members = std::move(to_a);
  b.members = std::move(to_b);
  refresh_fragment(a, landmarks, ontology, params);
  refresh_fragment(b, landmarks, ontology, params);
}

BranchSegmentation branch_segment(std::span<const Landmark> landmarks, const Ontology& ontology,
                                  const BranchParams& params) {
  BranchSegmentation out;
  if (landmarks.empty()) return out;
  out.adjacency_distance = params.adjacency_distance > 0.0
                               ? params.adjacency_distance
                               : default_adjacency_distance(landmarks);
  const double adjacency = out.adjacency_distance;

  auto fragments = nnn_cluster(landmarks, ontology, params.semantics, params.seed_position,
                               params.momentum);
  compute_neighbours(fragments, adjacency);
  fragments = merge_fragments(fragments, landmarks, ontology, params.semantics, adjacency);

  for (int round = 0; round < params.max_trade_rounds; ++round) {
    bool traded = false;
    for (std::size_t i = 0; i < fragments.size(); ++i) {
      for (std::size_t j = i + 1; j < fragments.size(); ++j) {
        Fragment& fa = fragments[i];
        Fragment& fb = fragments[j];
        if (fa.members.empty() || fb.members.empty()) continue;
        if (hull_distance(fa.hull, fb.hull) >= adjacency) continue;
        const auto crossings = detect_bisection(fa, fb, landmarks);
        if (crossings.empty()) continue;

        std::set<std::size_t> bisecting;
        std::vector<Vec2> sites;
        for (const auto& c : crossings) {
          bisecting.insert({c.a1, c.a2, c.b1, c.b2});
          sites.push_back((landmarks[c.a1].position + landmarks[c.a2].position +
                           landmarks[c.b1].position + landmarks[c.b2].position) *
                          0.25);
        }
        auto surrounding = [&](const Fragment& f) {
          std::vector<Vec2> pts;
          for (const std::size_t v : hull_indices(f.members, landmarks)) {
            if (bisecting.contains(v)) continue;
            for (const Vec2 s : sites)
              if (distance(landmarks[v].position, s) <= adjacency) {
                pts.push_back(landmarks[v].position);
                break;
              }
          }
          if (pts.empty())
            for (const std::size_t v : f.members)
              if (!bisecting.contains(v)) pts.push_back(landmarks[v].position);
          if (pts.empty())
            for (const std::size_t v : f.members) pts.push_back(landmarks[v].position);
          return pts;
        };
        const auto pa = surrounding(fa);
        const auto pb = surrounding(fb);
        Hyperplane h;
        try {
          h = max_margin_boundary(pa, pb);
        } catch (const NotSeparable&) {
          h = least_misclassification_boundary(pa, pb);
        }
        trade_landmarks(fa, fb, h, landmarks, ontology, params.semantics);
        ++out.trades;
        traded = true;
      }
    }
    std::erase_if(fragments, [](const Fragment& f) { return f.members.empty(); });
    if (!traded) break;
  }
  compute_neighbours(fragments, adjacency);
  out.fragments = std::move(fragments);
  return out;
}

LabelGrid rasterize(const GridSegmentation& segmentation) {
  LabelGrid grid(kEvalGridSize, kEvalGridSize);
  for (const GridSegment* leaf : segmentation.leaves()) {
    for (int r = leaf->row0; r < leaf->row0 + leaf->span; ++r)
      for (int c = leaf->col0; c < leaf->col0 + leaf->span; ++c)
        grid.set(r, c, leaf->distribution.label, leaf->distribution.max_probability);
  }
  return grid;
}

LabelGrid rasterize(std::span<const Fragment> fragments, std::span<const Landmark> landmarks,
                    const Rect& bounds, int rows, int cols) {
  LabelGrid grid(rows, cols);
  std::vector<std::size_t> order(fragments.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fragments[a].distribution.max_probability > fragments[b].distribution.max_probability;
  });
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const Vec2 centre = LabelGrid::cell_rect(bounds, rows, cols, r, c).centre();
      for (const std::size_t f : order) {
        const auto& frag = fragments[f];
        if (frag.label() == kUnknown) continue;
        if (hull_contains(frag.hull, centre)) {
          grid.set(r, c, frag.label(), frag.distribution.max_probability);
          break;
        }
      }
    }
  for (const std::size_t f : order) {
    const auto& frag = fragments[f];
    if (frag.label() == kUnknown) continue;
    for (const std::size_t i : frag.members) {
      const auto [r, c] = LabelGrid::cell_of(bounds, rows, cols, landmarks[i].position);
      if (grid.label(r, c) == kUnknown) grid.set(r, c, frag.label(), frag.distribution.max_probability);
    }
  }
  return grid;
}

}  // namespace ctxslam
