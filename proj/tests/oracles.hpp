// Independent reference implementations used only by the tests. Each one is
// written directly from the rule it checks and shares no code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct P2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(P2 a, P2 b) { return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)); }

// ---------------------------------------------------------------------------
// Semantics: brute-force double loop over ordered pairs, halved.

struct SemFeature {
  int cls;
  double conf;
  P2 pos;
};

struct SemResult {
  std::vector<double> c;
  std::vector<double> p;
  std::vector<long> inferences;
  int label = -1;  // -1 is Unknown
};

// sp[cls][env]; env_names gives the lexicographic tie-break.
inline SemResult semantics(const std::vector<SemFeature>& feats,
                           const std::vector<std::vector<double>>& sp,
                           const std::vector<std::string>& env_names, double max_distance,
                           double alpha) {
  const std::size_t n_env = env_names.size();
  const long z = static_cast<long>(feats.size());
  SemResult r;
  r.c.assign(n_env, 0.0);
  r.p.assign(n_env, 0.0);
  r.inferences.assign(n_env, 0);
  for (std::size_t e = 0; e < n_env; ++e) {
    double twice_raw = 0.0;
    long twice_count = 0;
    for (long x = 0; x < z; ++x)
      for (long y = 0; y < z; ++y) {
        if (x == y) continue;
        const double sx = sp[feats[x].cls][e];
        const double sy = sp[feats[y].cls][e];
        if (!(sx > 0.0 && sy > 0.0)) continue;
        double d = max_distance > 0.0 ? dist(feats[x].pos, feats[y].pos) / max_distance : 0.0;
        if (d > 1.0) d = 1.0;
        twice_raw += (sx * feats[x].conf + sy * feats[y].conf) * (1.0 - d);
        ++twice_count;
      }
    const long count = twice_count / 2;
    const double raw = twice_raw / 2.0;
    double c = 0.0;
    if (count > 0) {
      c = raw / (2.0 * static_cast<double>(count));
    } else if (z > 0) {
      double s = 0.0;
      for (const auto& f : feats) s += sp[f.cls][e] * f.conf;
      c = s / static_cast<double>(z);
    }
    const double ratio = z < 2 ? 0.0 : static_cast<double>(count) / (z * (z - 1) / 2.0);
    double p = alpha * c + (1.0 - alpha) * ratio;
    p = std::min(1.0, std::max(0.0, p));
    r.c[e] = c;
    r.p[e] = p;
    r.inferences[e] = count;
  }
  for (std::size_t e = 0; e < n_env; ++e) {
    if (r.p[e] <= 0.0) continue;
    const auto l = static_cast<std::size_t>(r.label);
    if (r.label < 0 || r.p[e] > r.p[l] || (r.p[e] == r.p[l] && env_names[e] < env_names[l]))
      r.label = static_cast<int>(e);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Max margin: every line supported by one point per side (bisector) or by
// two points on one side and one on the other (parallel to the pair).

struct Line {
  double nx, ny, c;  // unit normal, nx*x + ny*y + c = 0
};

inline bool separates(const Line& l, const std::vector<P2>& a, const std::vector<P2>& b,
                      double& margin) {
  margin = std::numeric_limits<double>::infinity();
  for (const P2 p : a) {
    const double s = -(l.nx * p.x + l.ny * p.y + l.c);
    if (s <= 0) return false;
    margin = std::min(margin, s);
  }
  for (const P2 p : b) {
    const double s = l.nx * p.x + l.ny * p.y + l.c;
    if (s <= 0) return false;
    margin = std::min(margin, s);
  }
  return true;
}

// Best margin over all support candidates; negative when none separates.
inline double best_margin(const std::vector<P2>& a, const std::vector<P2>& b) {
  double best = -1.0;
  auto try_line = [&](double nx, double ny, double c) {
    const double n = std::hypot(nx, ny);
    if (n == 0.0) return;
    for (int sign : {1, -1}) {
      const Line l{sign * nx / n, sign * ny / n, sign * c / n};
      double m = 0.0;
      if (separates(l, a, b, m)) best = std::max(best, m);
    }
  };
  for (const P2 p : a)
    for (const P2 q : b) {
      const double nx = q.x - p.x, ny = q.y - p.y;
      try_line(nx, ny, -(nx * (p.x + q.x) / 2 + ny * (p.y + q.y) / 2));
    }
  auto pairs = [&](const std::vector<P2>& same, const std::vector<P2>& other) {
    for (std::size_t i = 0; i < same.size(); ++i)
      for (std::size_t j = i + 1; j < same.size(); ++j) {
        const double nx = -(same[j].y - same[i].y), ny = same[j].x - same[i].x;
        for (const P2 q : other) {
          const double ci = -(nx * same[i].x + ny * same[i].y);
          const double cq = -(nx * q.x + ny * q.y);
          try_line(nx, ny, (ci + cq) / 2);
        }
      }
  };
  pairs(a, b);
  pairs(b, a);
  return best;
}

// ---------------------------------------------------------------------------
// Hull edges by the all-others-on-one-side definition, O(n^3).

inline std::vector<std::pair<std::size_t, std::size_t>> hull_edges(const std::vector<P2>& pts,
                                                                   const std::vector<std::size_t>& ids) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const P2 a = pts[ids[i]], b = pts[ids[j]];
      int pos = 0, neg = 0;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (k == i || k == j) continue;
        const P2 c = pts[ids[k]];
        const double cr = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (cr > 0) ++pos;
        if (cr < 0) ++neg;
      }
      if (pos == 0 || neg == 0) edges.emplace_back(ids[i], ids[j]);
    }
  return edges;
}

inline bool proper_or_touching(P2 p1, P2 p2, P2 q1, P2 q2) {
  auto orient = [](P2 a, P2 b, P2 c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0) - (v < 0);
  };
  auto on = [](P2 a, P2 b, P2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
           c.y <= std::max(a.y, b.y);
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on(p1, p2, q1)) return true;
  if (o2 == 0 && on(p1, p2, q2)) return true;
  if (o3 == 0 && on(q1, q2, p1)) return true;
  if (o4 == 0 && on(q1, q2, p2)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Point in polygon by winding number; boundary handled by the caller.

inline bool winding_contains(const std::vector<P2>& ring, P2 p) {
  int wn = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const P2 a = ring[i], b = ring[(i + 1) % ring.size()];
    const double is_left = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && is_left > 0) ++wn;
    } else if (b.y <= p.y && is_left < 0) {
      --wn;
    }
  }
  return wn != 0;
}

// ---------------------------------------------------------------------------
// Merge rules, interpreted step by step on plain records.

struct MergeRecord {
  std::string cls;
  double conf;
  P2 pos;
  int count = 1;
  unsigned id = 0;
};

struct MergeRules {
  double radius;
  double tolerance;
  int threshold;
  double floor;
  // Classes that count as similar, besides equality.
  std::vector<std::pair<std::string, std::string>> aliases;

  bool similar(const std::string& a, const std::string& b) const {
    if (a == b) return true;
    for (const auto& [x, y] : aliases)
      if ((a == x && b == y) || (a == y && b == x)) return true;
    return false;
  }
};

class MergeInterpreter {
 public:
  explicit MergeInterpreter(MergeRules rules) : r_(std::move(rules)) {}

  std::string submit(MergeRecord in) {
    bool any_near = false;
    double min_sep = std::numeric_limits<double>::infinity();
    for (const auto& m : map_) {
      const double d = dist(m.pos, in.pos);
      min_sep = std::min(min_sep, d);
      if (d <= r_.radius) any_near = true;
    }
    if (!any_near) {
      in.id = next_++;
      map_.push_back(in);
      return "added";
    }
    const int j = nearest_similar(in.pos, in.cls, -1);
    if (j >= 0) {
      map_[j] = combine(map_[j], in);
      cascade(j);
      return "merged";
    }
    if (in.conf >= r_.floor && min_sep >= r_.tolerance) {
      in.id = next_++;
      map_.push_back(in);
      return "added";
    }
    std::vector<std::size_t> near;
    for (std::size_t i = 0; i < discards_.size(); ++i)
      if (r_.similar(discards_[i].cls, in.cls) && dist(discards_[i].pos, in.pos) <= r_.tolerance)
        near.push_back(i);
    if (static_cast<int>(near.size()) < r_.threshold) {
      discards_.push_back(in);
      return "discarded";
    }
    MergeRecord best = in;
    double sx = in.pos.x, sy = in.pos.y;
    int count = in.count;
    for (const std::size_t i : near) {
      sx += discards_[i].pos.x;
      sy += discards_[i].pos.y;
      count += discards_[i].count;
      if (discards_[i].conf > best.conf) best = discards_[i];
    }
    best.pos = {sx / (near.size() + 1), sy / (near.size() + 1)};
    best.count = count;
    std::vector<MergeRecord> kept;
    for (std::size_t i = 0; i < discards_.size(); ++i)
      if (std::find(near.begin(), near.end(), i) == near.end()) kept.push_back(discards_[i]);
    discards_ = kept;
    int at = nearest_similar(best.pos, best.cls, -1);
    if (at >= 0) {
      best.id = map_[at].id;
      map_[at] = best;
    } else {
      best.id = next_++;
      map_.push_back(best);
      at = static_cast<int>(map_.size()) - 1;
    }
    cascade(at);
    return "resurrected";
  }

  const std::vector<MergeRecord>& map() const { return map_; }
  const std::vector<MergeRecord>& discards() const { return discards_; }

 private:
  static MergeRecord combine(const MergeRecord& existing, const MergeRecord& in) {
    MergeRecord out = in.conf > existing.conf ? in : existing;
    out.id = existing.id;
    out.pos = {(existing.pos.x + in.pos.x) / 2, (existing.pos.y + in.pos.y) / 2};
    out.count = existing.count + in.count;
    return out;
  }

  int nearest_similar(P2 p, const std::string& cls, int skip) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < map_.size(); ++i) {
      if (static_cast<int>(i) == skip) continue;
      const double d = dist(p, map_[i].pos);
      if (d <= r_.radius && d < bd && r_.similar(cls, map_[i].cls)) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  void cascade(int idx) {
    for (;;) {
      const int j = nearest_similar(map_[idx].pos, map_[idx].cls, idx);
      if (j < 0) return;
      const int keep = std::min(idx, j), drop = std::max(idx, j);
      map_[keep] = combine(map_[keep], map_[drop]);
      map_.erase(map_.begin() + drop);
      idx = keep;
    }
  }

  MergeRules r_;
  std::vector<MergeRecord> map_;
  std::vector<MergeRecord> discards_;
  unsigned next_ = 0;
};

// ---------------------------------------------------------------------------
// Average precision from an explicit PR table.

struct Ranked {
  double score;
  bool positive;
};

// Walks score blocks in descending order and integrates with trapezoids,
// starting from recall 0 at the first block's precision.
inline double average_precision(std::vector<Ranked> items, long positives) {
  std::sort(items.begin(), items.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
  std::vector<std::pair<double, double>> rp;  // recall, precision
  long tp = 0, seen = 0;
  std::size_t i = 0;
  while (i < items.size()) {
    const double s = items[i].score;
    while (i < items.size() && items[i].score == s) {
      tp += items[i].positive ? 1 : 0;
      ++seen;
      ++i;
    }
    rp.emplace_back(positives ? static_cast<double>(tp) / positives : 0.0,
                    static_cast<double>(tp) / seen);
  }
  if (rp.empty()) return 0.0;
  double area = 0.0;
  double r0 = 0.0, p0 = rp.front().second;
  for (const auto& [r, p] : rp) {
    area += (r - r0) * (p + p0) / 2;
    r0 = r;
    p0 = p;
  }
  return area;
}

}  // namespace oracle
