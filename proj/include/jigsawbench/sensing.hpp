#pragma once

// Orthographic top-down rendering of the scene into a label grid at the
// camera's mm-per-pixel scale, plus the hidden ground-truth layer consumed
// by the metrics code. Sensor error is modeled as label jitter in a band
// around piece boundaries (the only error mode that moves a detection box)
// and as per-piece texture confusion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jigsawbench/geometry.hpp"
#include "jigsawbench/jigsaw.hpp"
#include "jigsawbench/rng.hpp"
#include "jigsawbench/world.hpp"

namespace jigsawbench::sensing {

using geom::Rect;
using geom::Vec2;

struct TruthItem {
  int piece_id = 0;
  jigsaw::PieceKind kind = jigsaw::PieceKind::fragment;
  Rect rect;  // exact axis-aligned bounding box of the true footprint
  std::string label;
  Vec2 centroid;
  geom::Pose2 pose;
  int z_layer = 0;
};

struct SceneTruth {
  std::vector<TruthItem> items;

  const TruthItem* find(int piece_id) const {
    for (const TruthItem& t : items) {
      if (t.piece_id == piece_id) return &t;
    }
    return nullptr;
  }
};

class Observation;
Observation render(const world::WorldState& w, const world::CameraProfile& camera,
                   std::uint64_t seed);
Observation render_background(const world::WorldState& w, const world::CameraProfile& camera);

class Observation {
 public:
  static constexpr std::int32_t kBackground = -1;

  int width() const { return width_; }
  int height() const { return height_; }
  double scale() const { return scale_; }
  Vec2 origin() const { return origin_; }

  std::int32_t label_at(int ix, int iy) const {
    return labels_[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(ix)];
  }

  Vec2 cell_center(int ix, int iy) const {
    return {origin_.x + (ix + 0.5) * scale_, origin_.y + (iy + 0.5) * scale_};
  }

  // Grid index of the cell containing a table-frame point, clamped to bounds.
  std::pair<int, int> cell_of(Vec2 p) const {
    const int ix = std::clamp(static_cast<int>(std::floor((p.x - origin_.x) / scale_)), 0, width_ - 1);
    const int iy = std::clamp(static_cast<int>(std::floor((p.y - origin_.y) / scale_)), 0, height_ - 1);
    return {ix, iy};
  }

  const std::vector<std::int32_t>& labels() const { return labels_; }

  // Texture label as seen by the camera (possibly confused).
  const std::string& apparent_label(int piece_id) const {
    static const std::string kEmpty;
    const auto it = apparent_.find(piece_id);
    return it == apparent_.end() ? kEmpty : it->second;
  }

  // Ground truth, for the metrics layer and oracle stages only. Pipeline
  // stages must never call this; the read counter backs the sentinel test.
  const SceneTruth& truth_for_metrics() const {
    ++truth_reads_;
    return truth_;
  }

  long truth_reads() const { return truth_reads_; }

  std::string to_pgm() const {
    std::ostringstream os;
    os << "P2\n" << width_ << " " << height_ << "\n255\n";
    for (int iy = 0; iy < height_; ++iy) {
      for (int ix = 0; ix < width_; ++ix) {
        const std::int32_t v = label_at(ix, iy);
        os << (v < 0 ? 0 : std::max(40, 255 - 40 * v));
        os << (ix + 1 == width_ ? '\n' : ' ');
      }
    }
    return os.str();
  }

 private:
  friend Observation render(const world::WorldState&, const world::CameraProfile&, std::uint64_t);
  friend Observation render_background(const world::WorldState&, const world::CameraProfile&);

  int width_ = 0;
  int height_ = 0;
  double scale_ = 1.0;
  Vec2 origin_;
  std::vector<std::int32_t> labels_;
  std::map<int, std::string> apparent_;
  SceneTruth truth_;
  mutable long truth_reads_ = 0;
};

namespace detail {

inline void rasterize(std::vector<std::int32_t>& labels, int width, int height, Vec2 origin,
                      double scale, const world::WorldState& w) {
  std::vector<const world::SceneObject*> order;
  for (const world::SceneObject& o : w.objects) order.push_back(&o);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->z_layer != b->z_layer ? a->z_layer < b->z_layer : a->piece_id < b->piece_id;
  });

  for (const world::SceneObject* obj : order) {
    const world::detail::Footprint fp = world::detail::footprint(w, *obj);
    const Rect bb = geom::bounding_rect(fp.outer);
    const int ix0 = std::max(0, static_cast<int>(std::floor((bb.min.x - origin.x) / scale)));
    const int iy0 = std::max(0, static_cast<int>(std::floor((bb.min.y - origin.y) / scale)));
    const int ix1 = std::min(width - 1, static_cast<int>(std::ceil((bb.max.x - origin.x) / scale)));
    const int iy1 = std::min(height - 1, static_cast<int>(std::ceil((bb.max.y - origin.y) / scale)));
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        const Vec2 center{origin.x + (ix + 0.5) * scale, origin.y + (iy + 0.5) * scale};
        if (world::detail::point_on_material(fp, center)) {
          labels[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(ix)] = obj->piece_id;
        }
      }
    }
  }
}

// One jitter pass: every background cell touching a piece bleeds to that
// piece's label with probability `p` (background-diff sensors over-segment
// at edges; the silhouette fringes outward, never inward). Draws are keyed
// by cell index so the noise pattern attaches to the geometry, not to scan
// order.
inline void jitter_pass(std::vector<std::int32_t>& labels, int w, int h, std::uint64_t pass_seed,
                        double p) {
  const std::vector<std::int32_t> src = labels;
  auto at = [&](int x, int y) { return src[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)]; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (at(x, y) != Observation::kBackground) continue;
      std::int32_t neighbors[4];
      int n_piece = 0;
      const int dx[4] = {0, 1, 0, -1};
      const int dy[4] = {-1, 0, 1, 0};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k];
        const int ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::int32_t v = at(nx, ny);
        if (v != Observation::kBackground) neighbors[n_piece++] = v;
      }
      if (n_piece == 0) continue;
      const std::uint64_t cell = static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(w) +
                                 static_cast<std::uint64_t>(x);
      if (rng::keyed_uniform(pass_seed, cell * 2) >= p) continue;
      const auto pick = static_cast<std::size_t>(rng::keyed_uniform(pass_seed, cell * 2 + 1) *
                                                 static_cast<double>(n_piece));
      labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
          neighbors[std::min<std::size_t>(pick, static_cast<std::size_t>(n_piece - 1))];
    }
  }
}

}  // namespace detail

// Renders the scene as seen by `camera`. Deterministic per seed; a zero
// localization sigma renders exactly.
inline Observation render(const world::WorldState& w, const world::CameraProfile& camera,
                          std::uint64_t seed) {
  Observation obs;
  obs.scale_ = camera.scale_mm_per_px;
  obs.origin_ = w.table.min;
  obs.width_ = static_cast<int>(std::ceil(w.table.width() / obs.scale_));
  obs.height_ = static_cast<int>(std::ceil(w.table.height() / obs.scale_));
  obs.labels_.assign(static_cast<std::size_t>(obs.width_) * static_cast<std::size_t>(obs.height_),
                     Observation::kBackground);

  detail::rasterize(obs.labels_, obs.width_, obs.height_, obs.origin_, obs.scale_, w);

  // Truth layer: exact rectangles and true labels, untouched by noise.
  for (const world::SceneObject& o : w.objects) {
    const jigsaw::PieceSpec* spec = w.set.piece(o.piece_id);
    const geom::Polygon fp = geom::transform(spec->shape, o.pose);
    TruthItem item;
    item.piece_id = o.piece_id;
    item.kind = spec->kind;
    item.rect = geom::bounding_rect(fp);
    item.label = spec->texture;
    item.centroid = o.pose.apply(geom::polygon_centroid(spec->shape));
    item.pose = o.pose;
    item.z_layer = o.z_layer;
    obs.truth_.items.push_back(std::move(item));
  }
  std::sort(obs.truth_.items.begin(), obs.truth_.items.end(),
            [](const TruthItem& a, const TruthItem& b) { return a.piece_id < b.piece_id; });

  // Apparent texture: corrupted to another label from the set's pool with
  // probability label_confusion, drawn per piece.
  const std::vector<std::string> pool = w.set.texture_labels();
  const std::uint64_t label_seed = seed ^ rng::fnv1a("texture");
  for (const world::SceneObject& o : w.objects) {
    const jigsaw::PieceSpec* spec = w.set.piece(o.piece_id);
    std::string label = spec->texture;
    if (camera.label_confusion > 0.0 &&
        rng::keyed_uniform(label_seed, static_cast<std::uint64_t>(o.piece_id) * 2) <
            camera.label_confusion) {
      std::vector<std::string> others;
      for (const std::string& l : pool) {
        if (l != spec->texture) others.push_back(l);
      }
      if (!others.empty()) {
        const auto i = static_cast<std::size_t>(
            rng::keyed_uniform(label_seed, static_cast<std::uint64_t>(o.piece_id) * 2 + 1) *
            static_cast<double>(others.size()));
        label = others[std::min(i, others.size() - 1)];
      }
    }
    obs.apparent_[o.piece_id] = std::move(label);
  }

  // Boundary jitter: the fringe band widens with sigma/scale and each pass
  // bleeds with probability proportional to sigma.
  if (camera.localization_sigma_mm > 0.0) {
    const double ratio = camera.localization_sigma_mm / obs.scale_;
    const int band = std::max(1, static_cast<int>(std::ceil(ratio)));
    const double p = std::clamp(0.5 * ratio, 0.0, 0.95);
    for (int pass = 0; pass < band; ++pass) {
      detail::jitter_pass(obs.labels_, obs.width_, obs.height_,
                          seed ^ rng::fnv1a("jitter") ^ rng::splitmix64(static_cast<std::uint64_t>(pass)),
                          p);
    }
  }
  return obs;
}

// The background capture: same grid, every movable piece removed, no noise.
inline Observation render_background(const world::WorldState& w,
                                     const world::CameraProfile& camera) {
  Observation obs;
  obs.scale_ = camera.scale_mm_per_px;
  obs.origin_ = w.table.min;
  obs.width_ = static_cast<int>(std::ceil(w.table.width() / obs.scale_));
  obs.height_ = static_cast<int>(std::ceil(w.table.height() / obs.scale_));
  obs.labels_.assign(static_cast<std::size_t>(obs.width_) * static_cast<std::size_t>(obs.height_),
                     Observation::kBackground);
  return obs;
}

}  // namespace jigsawbench::sensing
