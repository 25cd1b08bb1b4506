#include "awarekit/segmentation.hpp"

#include "awarekit/error.hpp"
#include "awarekit/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace awarekit {

Tensor resize_bilinear(const Tensor& input, Index height, Index width) {
  input.require_rank3("resize_bilinear");
  if (height < 1 || width < 1) throw ShapeError("resize_bilinear: target size must be positive");
  const Index h = input.height(), w = input.width();
  Tensor out({input.channels(), height, width});
  auto coord = [](Index dst, Index in, Index out_size, Index& i0, Index& i1, float& f) {
    double src = (static_cast<double>(dst) + 0.5) * static_cast<double>(in) / static_cast<double>(out_size) - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    i0 = static_cast<Index>(std::floor(src));
    i1 = std::min(i0 + 1, in - 1);
    f = static_cast<float>(src - static_cast<double>(i0));
  };
  std::vector<Index> y0(height), y1(height), x0(width), x1(width);
  std::vector<float> fy(height), fx(width);
  for (Index y = 0; y < height; ++y) coord(y, h, height, y0[y], y1[y], fy[y]);
  for (Index x = 0; x < width; ++x) coord(x, w, width, x0[x], x1[x], fx[x]);
  for (Index c = 0; c < input.channels(); ++c) {
    const auto src = input.plane(c);
    auto dst = out.plane(c);
    for (Index y = 0; y < height; ++y) {
      for (Index x = 0; x < width; ++x) {
        const float top = src(y0[y], x0[x]) * (1.0f - fx[x]) + src(y0[y], x1[x]) * fx[x];
        const float bottom = src(y1[y], x0[x]) * (1.0f - fx[x]) + src(y1[y], x1[x]) * fx[x];
        dst(y, x) = top * (1.0f - fy[y]) + bottom * fy[y];
      }
    }
  }
  return out;
}

std::vector<Index> select_blocks(Index num_blocks, LayerSelection selection, const std::vector<Index>& explicit_blocks) {
  std::vector<Index> out;
  switch (selection) {
    case LayerSelection::all:
      for (Index b = 0; b < num_blocks; ++b) out.push_back(b);
      break;
    case LayerSelection::second_half:
      for (Index b = num_blocks / 2; b < num_blocks; ++b) out.push_back(b);
      break;
    case LayerSelection::explicit_list:
      out = explicit_blocks;
      for (Index b : out) {
        if (b < 0 || b >= num_blocks) throw bad_block("block " + std::to_string(b) + " out of range");
      }
      break;
  }
  if (out.empty()) throw bad_param("layer selection is empty");
  return out;
}

LayerSelection parse_layer_selection(const std::string& s) {
  if (s == "all") return LayerSelection::all;
  if (s == "second-half" || s == "second_half") return LayerSelection::second_half;
  throw bad_param("unknown layer selection '" + s + "'");
}

FeatureVolume collect_feature_volume(const ForwardTrace& trace, const std::vector<Index>& blocks, Index size) {
  if (blocks.empty()) throw bad_param("feature volume needs at least one block");
  Index total = 0;
  for (Index b : blocks) {
    if (b < 0 || b >= static_cast<Index>(trace.blocks.size())) throw bad_block("block " + std::to_string(b) + " not in trace");
    total += trace.blocks[static_cast<std::size_t>(b)].post_relu.channels();
  }
  FeatureVolume v;
  v.data = Tensor({total, size, size});
  Index offset = 0;
  for (Index b : blocks) {
    const Tensor& f = trace.blocks[static_cast<std::size_t>(b)].post_relu;
    const Tensor r = (f.height() == size && f.width() == size) ? f : resize_bilinear(f, size, size);
    v.data.data().segment(offset * size * size, r.size()) = r.data();
    v.sources.push_back({b, offset, f.channels()});
    offset += f.channels();
  }
  return v;
}

Eigen::VectorXf awareness_weights(const FeatureVolume& volume, const AwarenessTable& table) {
  Eigen::VectorXf w(volume.data.channels());
  for (const auto& src : volume.sources) {
    if (src.block < 0 || src.block >= static_cast<Index>(table.blocks.size()) ||
        table.blocks[static_cast<std::size_t>(src.block)].channels() != src.channels) {
      throw bad_param("awareness table has no entries for block " + std::to_string(src.block));
    }
    const Eigen::VectorXd a = -table.blocks[static_cast<std::size_t>(src.block)].mean_t;
    const double lo = a.minCoeff(), hi = a.maxCoeff();
    for (Index c = 0; c < src.channels; ++c) {
      w[src.first_channel + c] = hi > lo ? static_cast<float>((a[c] - lo) / (hi - lo)) : 1.0f;
    }
  }
  return w;
}

FeatureVolume weight_by_awareness(const FeatureVolume& volume, const AwarenessTable& table) {
  const Eigen::VectorXf w = awareness_weights(volume, table);
  FeatureVolume out = volume;
  for (Index c = 0; c < out.data.channels(); ++c) out.data.channel(c) *= w[c];
  return out;
}

namespace {

// Squared distances from every point (column) to `center`.
Eigen::VectorXd squared_distances(const Eigen::MatrixXd& points, const Eigen::VectorXd& center) {
  return (points.colwise() - center).colwise().squaredNorm().transpose();
}

Index distinct_columns(const Eigen::MatrixXd& points, Index stop_after) {
  std::vector<Index> order(static_cast<std::size_t>(points.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  auto less = [&](Index a, Index b) {
    for (Index r = 0; r < points.rows(); ++r) {
      if (points(r, a) != points(r, b)) return points(r, a) < points(r, b);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  Index distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size() && distinct < stop_after; ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

}  // namespace

SegmentationResult kmeans_segment(const FeatureVolume& volume, const KMeansOptions& options) {
  const Tensor& v = volume.data;
  v.require_rank3("kmeans_segment volume");
  const Index k = options.k;
  if (k < 2) throw bad_param("k-means needs k >= 2");
  if (options.max_iter < 1) throw bad_param("max_iter must be >= 1");
  const Index n = v.plane_size(), d = v.channels();

  // Columns are pixel feature vectors.
  Eigen::MatrixXd points(d, n);
  for (Index c = 0; c < d; ++c) points.row(c) = v.channel(c).cast<double>().transpose();
  if (distinct_columns(points, k) < k) {
    throw bad_param("k = " + std::to_string(k) + " exceeds the number of distinct pixel vectors");
  }

  // k-means++ seeding.
  Rng rng(options.seed, Stream::kmeans);
  Eigen::MatrixXd centers(d, k);
  centers.col(0) = points.col(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd nearest = squared_distances(points, centers.col(0));
  for (Index j = 1; j < k; ++j) {
    const double total = nearest.sum();
    const double target = rng.uniform() * total;
    double acc = 0.0;
    Index pick = -1;
    for (Index i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      acc += nearest[i];
      pick = i;
      if (acc > target) break;
    }
    centers.col(j) = points.col(pick);
    nearest = nearest.cwiseMin(squared_distances(points, centers.col(j)));
  }

  SegmentationResult r;
  r.height = v.height();
  r.width = v.width();
  r.k = k;
  r.seed = options.seed;
  r.labels.assign(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd best(n);

  auto assign = [&] {
    Eigen::MatrixXd dist(k, n);
    for (Index j = 0; j < k; ++j) dist.row(j) = squared_distances(points, centers.col(j)).transpose();
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      Index arg = 0;
      for (Index j = 1; j < k; ++j) {
        if (dist(j, i) < dist(arg, i)) arg = j;
      }
      r.labels[static_cast<std::size_t>(i)] = arg;
      best[i] = dist(arg, i);
      inertia += best[i];
    }
    r.inertia_history.push_back(inertia);
    return inertia;
  };

  assign();
  for (Index iter = 0; iter < options.max_iter; ++iter) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(d, k);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const Index l = r.labels[static_cast<std::size_t>(i)];
      sums.col(l) += points.col(i);
      ++counts[static_cast<std::size_t>(l)];
    }
    Eigen::MatrixXd updated = centers;
    for (Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        updated.col(j) = sums.col(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
      } else {
        Index far = 0;
        best.maxCoeff(&far);
        updated.col(j) = points.col(far);
        best[far] = 0.0;
      }
    }
    const double movement = (updated - centers).colwise().norm().maxCoeff();
    centers = std::move(updated);
    r.iterations = iter + 1;
    assign();
    if (movement < options.tol) break;
  }

  r.inertia = r.inertia_history.back();
  r.counts.assign(static_cast<std::size_t>(k), 0);
  for (Index l : r.labels) ++r.counts[static_cast<std::size_t>(l)];
  return r;
}

double permutation_agreement(const std::vector<Index>& labels, const std::vector<Index>& truth, Index k) {
  if (labels.size() != truth.size() || labels.empty()) throw bad_param("label maps differ in size");
  if (k < 1 || k > 9) throw bad_param("permutation matching supports 1 <= k <= 9");
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k || truth[i] < 0 || truth[i] >= k) throw bad_param("label out of range");
    confusion(labels[i], truth[i]) += 1.0;
  }
  std::vector<Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = 0.0;
  do {
    double hit = 0.0;
    for (Index j = 0; j < k; ++j) hit += confusion(j, perm[static_cast<std::size_t>(j)]);
    best = std::max(best, hit);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(labels.size());
}

SegmentationResult segment_class(const Generator& g, const SegmentRequest& request) {
  const auto& s = g.spec();
  if (request.k < 2 || request.k > 16) throw bad_param("k must be in [2, 16]");
  const ConditioningInput cond{sample_latent(s.latent_dim, request.seed, 0), request.class_id};
  const ForwardResult run = forward(g, cond);
  FeatureVolume volume =
      collect_feature_volume(run.trace, select_blocks(s.num_blocks(), request.layers), s.output_resolution());
  if (request.weighted) {
    volume = weight_by_awareness(volume, estimate_awareness(g, request.class_id, {request.samples, request.seed}));
  }
  return kmeans_segment(volume, {request.k, request.seed});
}

nlohmann::ordered_json to_json(const SegmentationResult& r, bool include_labels) {
  nlohmann::ordered_json j;
  j["height"] = r.height;
  j["width"] = r.width;
  j["k"] = r.k;
  j["counts"] = r.counts;
  j["seed"] = r.seed;
  j["iterations"] = r.iterations;
  j["inertia"] = r.inertia;
  j["inertia_history"] = r.inertia_history;
  if (include_labels) j["labels"] = r.labels;
  return j;
}

}  // namespace awarekit
