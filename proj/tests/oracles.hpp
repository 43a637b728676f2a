#pragma once

#include <cmath>
#include <vector>

#include "gfk/morphology.hpp"

namespace gfk::oracle {

// Dense oracles: every voxel scans every in-ball offset.
struct Offset {
  int dx, dy, dz;
};

inline std::vector<Offset> ball(Vec3 s, double r) {
  std::vector<Offset> out;
  const int rx = int(std::ceil(r / s.x)), ry = int(std::ceil(r / s.y)), rz = int(std::ceil(r / s.z));
  for (int dz = -rz; dz <= rz; ++dz)
    for (int dy = -ry; dy <= ry; ++dy)
      for (int dx = -rx; dx <= rx; ++dx) {
        const double d2 = dx * dx * s.x * s.x + dy * dy * s.y * s.y + dz * dz * s.z * s.z;
        if (d2 <= r * r * (1.0 + kBallSlack)) out.push_back({dx, dy, dz});
      }
  return out;
}

inline bool at(Dims d, const BinaryVolume& v, int x, int y, int z) {
  return d.contains({x, y, z}) && v[d.offset({x, y, z})];
}

inline BinaryVolume dense_dilate(Dims d, Vec3 s, const BinaryVolume& v, double r) {
  const auto b = ball(s, r);
  BinaryVolume out(v.size(), 0);
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x)
        for (const auto& o : b)
          if (at(d, v, x + o.dx, y + o.dy, z + o.dz)) {
            out[d.offset({x, y, z})] = 1;
            break;
          }
  return out;
}

inline BinaryVolume dense_erode(Dims d, Vec3 s, const BinaryVolume& v, double r) {
  const auto b = ball(s, r);
  BinaryVolume out(v.size(), 0);
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        bool all = true;
        for (const auto& o : b)
          if (!at(d, v, x + o.dx, y + o.dy, z + o.dz)) {
            all = false;
            break;
          }
        out[d.offset({x, y, z})] = all;
      }
  return out;
}

// Closing in an unbounded background: embed with a margin the dilation cannot cross.
inline BinaryVolume dense_close(Dims d, Vec3 s, const BinaryVolume& v, double r) {
  const int px = int(std::ceil(r / s.x)), py = int(std::ceil(r / s.y)), pz = int(std::ceil(r / s.z));
  const Dims big{d.x + 2 * px, d.y + 2 * py, d.z + 2 * pz};
  BinaryVolume padded(big.count(), 0);
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) padded[big.offset({x + px, y + py, z + pz})] = v[d.offset({x, y, z})];
  const auto closed = dense_erode(big, s, dense_dilate(big, s, padded, r), r);
  BinaryVolume out(v.size());
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) out[d.offset({x, y, z})] = closed[big.offset({x + px, y + py, z + pz})];
  return out;
}

}  // namespace gfk::oracle

namespace gfk::oracle {

struct SplatPoint {
  int x, y, z;
  double sigma;
};

/// Per-voxel Gaussian sum: every voxel visits every point on its slice.
inline std::vector<double> dense_splat(const std::vector<SplatPoint>& pts, double f, Dims d) {
  auto disc_sum = [](double s) {
    const int r = int(std::ceil(3.0 * s));
    double sum = 0.0;
    for (int j = -r; j <= r; ++j)
      for (int i = -r; i <= r; ++i)
        if (double(i * i + j * j) <= 9.0 * s * s) sum += std::exp(-double(i * i + j * j) / (2.0 * s * s));
    return sum;
  };
  std::vector<double> norm;
  for (const auto& p : pts) norm.push_back(disc_sum(p.sigma));
  std::vector<double> out(d.count(), 0.0);
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        double v = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
          const auto& p = pts[k];
          if (p.z != z) continue;
          const double d2 = double(x - p.x) * (x - p.x) + double(y - p.y) * (y - p.y);
          if (d2 <= 9.0 * p.sigma * p.sigma) v += std::exp(-d2 / (2.0 * p.sigma * p.sigma)) / (f * norm[k]);
        }
        out[d.offset({x, y, z})] = v;
      }
  return out;
}

}  // namespace gfk::oracle

#include <algorithm>
#include <limits>
#include <string>

#include "gfk/evaluation.hpp"

namespace gfk::oracle {

struct BruteMatch {
  std::size_t tp = 0, fp = 0, fn = 0, ignored = 0;
  std::vector<std::pair<std::string, std::string>> pairs;  // (truth id, mark id)
};

/// Repeatedly takes the globally smallest (distance, mark id, truth id) hitting pair among
/// unmatched truths and marks, then classifies the leftovers.
inline BruteMatch brute_match(const std::vector<NoduleTruth>& truths, const std::vector<Mark>& marks,
                              const std::vector<NonNodule>& non_nodules, bool use_radius = false) {
  auto limit = [&](double r) { return use_radius ? r : 2.0 * r; };
  auto dist = [](Vec3 a, Vec3 b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
  };
  std::vector<bool> t_used(truths.size()), m_used(marks.size());
  BruteMatch out;
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bt = 0, bm = 0;
    bool found = false;
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (t_used[t]) continue;
      for (std::size_t m = 0; m < marks.size(); ++m) {
        if (m_used[m]) continue;
        const double d = dist(truths[t].centroid_mm, marks[m].centroid_mm);
        if (!(d < limit(truths[t].equivalent_radius_mm))) continue;
        const bool better = !found || d < best ||
                            (d == best && (marks[m].id < marks[bm].id ||
                                           (marks[m].id == marks[bm].id && truths[t].id < truths[bt].id)));
        if (better) {
          best = d;
          bt = t;
          bm = m;
          found = true;
        }
      }
    }
    if (!found) break;
    t_used[bt] = m_used[bm] = true;
    out.pairs.emplace_back(truths[bt].id, marks[bm].id);
  }
  out.tp = out.pairs.size();
  out.fn = truths.size() - out.tp;
  for (std::size_t m = 0; m < marks.size(); ++m) {
    if (m_used[m]) continue;
    bool hit = false;
    for (const auto& t : truths) hit |= dist(t.centroid_mm, marks[m].centroid_mm) < limit(t.equivalent_radius_mm);
    for (const auto& n : non_nodules) hit |= dist(n.centroid_mm, marks[m].centroid_mm) < limit(n.equivalent_radius_mm);
    (hit ? out.ignored : out.fp) += 1;
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

}  // namespace gfk::oracle

namespace gfk::oracle {

/// Double-exponential (tanh-sinh) quadrature on [a, b]; copes with integrable endpoint singularities.
template <typename F>
double tanh_sinh(F f, double a, double b, double h = 1.0 / 256, double tmax = 6.5) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (double t = -tmax; t <= tmax; t += h) {
    const double s = 0.5 * M_PI * std::sinh(t);
    const double u = std::tanh(s);
    const double w = 0.5 * M_PI * std::cosh(t) / (std::cosh(s) * std::cosh(s));
    // distance to the nearer endpoint, computed without cancellation
    const double e = 1.0 / (std::exp(s) * std::cosh(s));   // 1 - u for u > 0
    const double em = 1.0 / (std::exp(-s) * std::cosh(s)); // 1 + u for u < 0
    const double x = u >= 0 ? b - half * e : a + half * em;
    if (x <= a || x >= b) continue;
    sum += w * f(x);
  }
  return sum * h * half;
}

/// F(d1, d2) upper tail as the integral of the beta density up to d2 / (d2 + d1 f).
inline double f_tail(double f, double d1, double d2) {
  const double a = d2 / 2, b = d1 / 2;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double z = d2 / (d2 + d1 * f);
  return tanh_sinh([&](double t) { return std::exp((a - 1) * std::log(t) + (b - 1) * std::log1p(-t) - log_beta); }, 0.0,
                   z);
}

}  // namespace gfk::oracle

namespace gfk::oracle {

/// Agglomerative merge over explicit member lists: each round recomputes every cluster's
/// mean centroid and bbox from its members and merges the closest qualifying pair
/// (ties to the pair with the smallest member indices).
inline std::vector<Candidate> agglomerate(const std::vector<Candidate>& in) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < in.size(); ++i) clusters.push_back({i});
  auto summary = [&](const std::vector<std::size_t>& m) {
    Candidate c = in[m[0]];
    Vec3 sum{0, 0, 0};
    for (std::size_t k : m) {
      sum = sum + in[k].centroid_mm;
      if (in[k].score > c.score) {
        c.score = in[k].score;
        c.id = in[k].id;
      }
      c.bbox_w_mm = std::max(c.bbox_w_mm, in[k].bbox_w_mm);
      c.bbox_h_mm = std::max(c.bbox_h_mm, in[k].bbox_h_mm);
    }
    c.centroid_mm = sum * (1.0 / double(m.size()));
    return c;
  };
  for (;;) {
    std::vector<Candidate> reps;
    for (const auto& m : clusters) reps.push_back(summary(m));
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j) {
        const Vec3 d = reps[i].centroid_mm - reps[j].centroid_mm;
        const double dist = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
        const double lim = 0.5 * 0.5 * (reps[i].max_dim_mm() + reps[j].max_dim_mm());
        if (dist < lim && dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    if (!std::isfinite(best)) return reps;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
}

}  // namespace gfk::oracle
