#include "awarekit/metrics.hpp"

#include "awarekit/error.hpp"
#include "awarekit/parallel.hpp"
#include "awarekit/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace awarekit {

Eigen::VectorXd AvgPoolExtractor::extract(const Tensor& image) const {
  image.require_rank3("avgpool extractor");
  const Index h = image.height(), w = image.width();
  if (h % grid_ != 0 || w % grid_ != 0) throw ShapeError("avgpool extractor: image size must be a multiple of the grid");
  const Index ch = h / grid_, cw = w / grid_;
  Eigen::VectorXd f(image.channels() * grid_ * grid_);
  for (Index c = 0; c < image.channels(); ++c) {
    const auto p = image.plane(c);
    for (Index gy = 0; gy < grid_; ++gy) {
      for (Index gx = 0; gx < grid_; ++gx) {
        f[(c * grid_ + gy) * grid_ + gx] = p.block(gy * ch, gx * cw, ch, cw).cast<double>().mean();
      }
    }
  }
  return f;
}

Eigen::VectorXd IdentityExtractor::extract(const Tensor& image) const { return image.data().cast<double>(); }

Index IdentityExtractor::dim(const GeneratorSpec& spec) const {
  const Index r = spec.output_resolution();
  return GeneratorSpec::kOutputChannels * r * r;
}

std::unique_ptr<FeatureExtractor> make_extractor(const std::string& name) {
  if (name == "avgpool" || name == "avgpool8") return std::make_unique<AvgPoolExtractor>(8);
  if (name == "identity") return std::make_unique<IdentityExtractor>();
  throw bad_param("unknown feature extractor '" + name + "'");
}

FeatureMatrix generate_features(const Generator& g, Index class_id, Index n, std::uint64_t seed,
                                const FeatureExtractor& extractor, unsigned workers) {
  if (n < 1) throw bad_param("sample count must be >= 1");
  FeatureMatrix out(n, extractor.dim(g.spec()));
  parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
    const Eigen::VectorXf z = sample_latent(g.spec().latent_dim, seed, i);
    out.row(static_cast<Index>(i)) = extractor.extract(forward(g, {z, class_id}).image).transpose();
  });
  return out;
}

Eigen::VectorXd CentroidClassifier::scores(const Eigen::VectorXd& features) const {
  const Eigen::VectorXd dist = (centroids.rowwise() - features.transpose()).rowwise().norm();
  Eigen::VectorXd logits = -tau * dist;
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd p = logits.array().exp();
  return p / p.sum();
}

double CentroidClassifier::score(const Eigen::VectorXd& features, Index class_id) const {
  const auto it = std::find(classes.begin(), classes.end(), class_id);
  if (it == classes.end()) throw bad_class("classifier has no centroid for class " + std::to_string(class_id));
  return scores(features)[it - classes.begin()];
}

Index CentroidClassifier::predict(const Eigen::VectorXd& features) const {
  Index arg = 0;
  scores(features).maxCoeff(&arg);
  return classes[static_cast<std::size_t>(arg)];
}

CentroidClassifier fit_centroid_classifier(const Generator& g, const std::vector<Index>& classes, Index n_per_class,
                                           const FeatureExtractor& extractor, std::uint64_t seed, double tau,
                                           unsigned workers) {
  if (n_per_class < 1) throw bad_param("n_per_class must be >= 1");
  if (classes.empty()) throw bad_param("classifier needs at least one class");
  CentroidClassifier c;
  c.classes = classes;
  c.centroids.resize(static_cast<Index>(classes.size()), extractor.dim(g.spec()));
  for (std::size_t i = 0; i < classes.size(); ++i) {
    c.centroids.row(static_cast<Index>(i)) =
        generate_features(g, classes[i], n_per_class, seed, extractor, workers).colwise().mean();
  }
  if (tau > 0.0) {
    c.tau = tau;
  } else {
    std::vector<double> d;
    for (Index i = 0; i < c.centroids.rows(); ++i) {
      for (Index j = i + 1; j < c.centroids.rows(); ++j) d.push_back((c.centroids.row(i) - c.centroids.row(j)).norm());
    }
    double median = 1.0;
    if (!d.empty()) {
      std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
      median = d[d.size() / 2];
    }
    c.tau = kAutoTauScale / std::max(median, 1e-12);
  }
  return c;
}

double channel_classifier_response(const Generator& g, const CentroidClassifier& classifier,
                                   const FeatureExtractor& extractor, Index class_id,
                                   const std::vector<ChannelRef>& channels, Index n_pairs, std::uint64_t seed,
                                   unsigned workers) {
  if (n_pairs < 1) throw bad_param("n_pairs must be >= 1");
  InterventionPlan plan;
  for (const auto& r : channels) plan.zero(r.block, {r.channel});
  plan.validate(g.spec());
  std::vector<double> drop(static_cast<std::size_t>(n_pairs));
  parallel_for(drop.size(), workers, [&](std::size_t i) {
    const ConditioningInput cond{sample_latent(g.spec().latent_dim, seed, i), class_id};
    const double before = classifier.score(extractor.extract(forward(g, cond).image), class_id);
    const double after =
        plan.empty() ? before : classifier.score(extractor.extract(forward(g, cond, plan).image), class_id);
    drop[i] = before - after;
  });
  double sum = 0.0;
  for (double d : drop) sum += d;
  return sum / static_cast<double>(n_pairs);
}

std::vector<std::vector<double>> per_channel_responses(const Generator& g, const CentroidClassifier& classifier,
                                                       const FeatureExtractor& extractor, Index class_id,
                                                       Index n_pairs, std::uint64_t seed, unsigned workers) {
  if (n_pairs < 1) throw bad_param("n_pairs must be >= 1");
  const auto& s = g.spec();
  const Index total = s.total_channels();
  // drop(i, column) for latent i; reduced in latent order afterwards.
  Eigen::MatrixXd drop(n_pairs, total);
  // Single-input-channel slices of each block's convolution weights.
  std::vector<std::vector<Tensor>> slices(static_cast<std::size_t>(s.num_blocks()));
  for (Index b = 0; b < s.num_blocks(); ++b) {
    const Tensor& w = g.weights().blocks[static_cast<std::size_t>(b)].conv_weight;
    const Index out = w.dim(0), in = w.dim(1);
    for (Index c = 0; c < in; ++c) {
      Tensor slice({out, 1, 3, 3});
      for (Index o = 0; o < out; ++o) slice.data().segment(o * 9, 9) = w.data().segment((o * in + c) * 9, 9);
      slices[static_cast<std::size_t>(b)].push_back(std::move(slice));
    }
  }
  parallel_for(static_cast<std::size_t>(n_pairs), workers, [&](std::size_t i) {
    const ConditioningInput cond{sample_latent(s.latent_dim, seed, i), class_id};
    const ForwardResult base = forward(g, cond);
    const double before = classifier.score(extractor.extract(base.image), class_id);
    Index col = 0;
    for (Index b = 0; b < s.num_blocks(); ++b) {
      const Tensor& feature = base.trace.blocks[static_cast<std::size_t>(b)].post_relu;
      const Tensor conv = block_convolution(g, b, feature);
      const Index r = feature.height();
      const Eigen::VectorXf no_bias = Eigen::VectorXf::Zero(conv.channels());
      for (Index c = 0; c < feature.channels(); ++c, ++col) {
        if (feature.channel(c).isZero(0.0f)) {
          drop(static_cast<Index>(i), col) = 0.0;
          continue;
        }
        // The convolution is linear, so zeroing channel c removes exactly its own contribution.
        Tensor single({1, r, r});
        single.channel(0) = feature.channel(c);
        const Tensor contribution =
            conv2d(upsample_nearest(single, 2), slices[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)], no_bias);
        Tensor edited = conv;
        edited.data() -= contribution.data();
        const Tensor image = resume_from_convolution(g, cond, b, std::move(edited));
        drop(static_cast<Index>(i), col) = before - classifier.score(extractor.extract(image), class_id);
      }
    }
  });
  std::vector<std::vector<double>> out;
  Index col = 0;
  for (Index b = 0; b < s.num_blocks(); ++b) {
    std::vector<double> block(static_cast<std::size_t>(s.block_channels(b)));
    for (auto& v : block) {
      double sum = 0.0;
      for (Index i = 0; i < n_pairs; ++i) sum += drop(i, col);
      v = sum / static_cast<double>(n_pairs);
      ++col;
    }
    out.push_back(std::move(block));
  }
  return out;
}

double awareness_response_correlation(const AwarenessTable& table, Index block, const std::vector<double>& responses) {
  const BlockAwareness& ba = table.block(block);
  if (static_cast<Index>(responses.size()) != ba.channels()) throw bad_param("one response per channel required");
  std::vector<Index> order(responses.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return ba.mean_t[a] > ba.mean_t[b]; });
  const Index n = ba.channels();
  Eigen::VectorXd awareness(n), response(n);
  for (Index i = 0; i < n; ++i) {
    awareness[i] = -ba.mean_t[order[static_cast<std::size_t>(i)]];
    response[i] = responses[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  const Index window = savgol_window_for(n);
  return pearson_correlation(awareness, savgol_smooth(response, window, std::min<Index>(3, window - 1)));
}

Index savgol_window_for(Index length, Index preferred) {
  if (preferred <= length) return preferred;
  return (length + 29) / 30 * 2 + 1;
}

Eigen::VectorXd savgol_smooth(const Eigen::VectorXd& series, Index window, Index order) {
  if (window < 1 || window % 2 == 0) throw bad_param("Savitzky-Golay window must be a positive odd number");
  if (order < 0 || order >= window) throw bad_param("Savitzky-Golay order must be below the window length");
  const Index n = series.size();
  if (n < window) throw bad_param("series is shorter than the Savitzky-Golay window");
  const Index half = window / 2;

  // Hat matrix of the local polynomial fit: row r maps a window to the fitted value at position r.
  Eigen::MatrixXd vander(window, order + 1);
  for (Index r = 0; r < window; ++r) {
    const double x = static_cast<double>(r - half) / static_cast<double>(std::max<Index>(half, 1));
    double p = 1.0;
    for (Index c = 0; c <= order; ++c, p *= x) vander(r, c) = p;
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(vander);
  const Eigen::MatrixXd hat = vander * qr.solve(Eigen::MatrixXd::Identity(window, window));

  Eigen::VectorXd out(n);
  for (Index i = half; i < n - half; ++i) out[i] = hat.row(half).dot(series.segment(i - half, window));
  for (Index r = 0; r < half; ++r) {
    out[r] = hat.row(r).dot(series.head(window));
    out[n - half + r] = hat.row(half + 1 + r).dot(series.tail(window));
  }
  return out;
}

Eigen::VectorXd sliding_window_smooth(const Eigen::VectorXd& series, Index window) {
  if (window < 1) throw bad_param("sliding window must be >= 1");
  const Index n = series.size();
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - (window - 1) / 2);
    const Index hi = std::min<Index>(n, lo + window);
    out[i] = series.segment(lo, hi - lo).mean();
  }
  return out;
}

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw bad_param("correlation series differ in length");
  if (a.size() < 2) throw bad_param("correlation needs at least two points");
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double sa = da.square().sum(), sb = db.square().sum();
  if (sa == 0.0 || sb == 0.0) throw bad_param("correlation is undefined for a constant series");
  return std::clamp((da * db).sum() / std::sqrt(sa * sb), -1.0, 1.0);
}

namespace {

using Image = Eigen::MatrixXd;

Image luma(const Tensor& t) {
  t.require_rank3("ms_ssim");
  if (t.channels() != 3 && t.channels() != 1) throw ShapeError("ms_ssim: images must have 1 or 3 channels");
  auto unit = [&](Index c) { return ((t.plane(c).cast<double>().array() + 1.0) * 0.5).matrix(); };
  if (t.channels() == 1) return unit(0);
  return 0.299 * unit(0) + 0.587 * unit(1) + 0.114 * unit(2);
}

constexpr Index kWindow = 11;

const std::array<double, kWindow>& gaussian_taps() {
  static const std::array<double, kWindow> taps = [] {
    std::array<double, kWindow> t{};
    double sum = 0.0;
    for (Index i = 0; i < kWindow; ++i) {
      const double x = static_cast<double>(i - kWindow / 2);
      t[static_cast<std::size_t>(i)] = std::exp(-x * x / (2.0 * 1.5 * 1.5));
      sum += t[static_cast<std::size_t>(i)];
    }
    for (auto& v : t) v /= sum;
    return t;
  }();
  return taps;
}

// Separable Gaussian filter, valid region only.
Image filter_valid(const Image& x) {
  const auto& g = gaussian_taps();
  const Index h = x.rows() - kWindow + 1, w = x.cols() - kWindow + 1;
  Image rows = Image::Zero(h, x.cols());
  for (Index k = 0; k < kWindow; ++k) rows += g[static_cast<std::size_t>(k)] * x.middleRows(k, h);
  Image out = Image::Zero(h, w);
  for (Index k = 0; k < kWindow; ++k) out += g[static_cast<std::size_t>(k)] * rows.middleCols(k, w);
  return out;
}

Image downsample(const Image& x) {
  const Index h = x.rows() / 2, w = x.cols() / 2;
  Image out(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index c = 0; c < w; ++c) out(y, c) = 0.25 * x.block(2 * y, 2 * c, 2, 2).sum();
  }
  return out;
}

// Returns {ssim, cs} means over the valid window positions.
std::pair<double, double> ssim_terms(const Image& a, const Image& b) {
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const Eigen::ArrayXXd mu_a = filter_valid(a).array(), mu_b = filter_valid(b).array();
  const Eigen::ArrayXXd saa = filter_valid(a.cwiseProduct(a)).array() - mu_a.square();
  const Eigen::ArrayXXd sbb = filter_valid(b.cwiseProduct(b)).array() - mu_b.square();
  const Eigen::ArrayXXd sab = filter_valid(a.cwiseProduct(b)).array() - mu_a * mu_b;
  const Eigen::ArrayXXd cs = (2.0 * sab + c2) / (saa + sbb + c2);
  const Eigen::ArrayXXd lum = (2.0 * mu_a * mu_b + c1) / (mu_a.square() + mu_b.square() + c1);
  return {(lum * cs).mean(), cs.mean()};
}

}  // namespace

double ms_ssim(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("ms_ssim: images have different shapes");
  static constexpr std::array<double, 5> kWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  Image x = luma(a), y = luma(b);
  Index scales = 0;
  for (Index s = std::min(x.rows(), x.cols()); s >= kWindow && scales < 5; s /= 2) ++scales;
  if (scales == 0) throw ShapeError("ms_ssim: images are smaller than the 11x11 window");
  double weight_sum = 0.0;
  for (Index s = 0; s < scales; ++s) weight_sum += kWeights[static_cast<std::size_t>(s)];

  double log_result = 0.0;
  for (Index s = 0; s < scales; ++s) {
    const auto [ssim, cs] = ssim_terms(x, y);
    const double w = kWeights[static_cast<std::size_t>(s)] / weight_sum;
    const double term = std::max(s + 1 == scales ? ssim : cs, 0.0);
    if (term == 0.0) return 0.0;
    log_result += w * std::log(term);
    if (s + 1 < scales) {
      x = downsample(x);
      y = downsample(y);
    }
  }
  return std::clamp(std::exp(log_result), 0.0, 1.0);
}

namespace {

Eigen::MatrixXd pairwise_distances(const FeatureMatrix& a, const FeatureMatrix& b) {
  const Eigen::VectorXd na = a.rowwise().squaredNorm(), nb = b.rowwise().squaredNorm();
  Eigen::MatrixXd d = -2.0 * a * b.transpose();
  d.colwise() += na;
  d.rowwise() += nb.transpose();
  return d.cwiseMax(0.0).cwiseSqrt();
}

Eigen::VectorXd knn_radii(const FeatureMatrix& x, Index k) {
  const Eigen::MatrixXd d = pairwise_distances(x, x);
  Eigen::VectorXd r(x.rows());
  std::vector<double> row(static_cast<std::size_t>(x.rows() - 1));
  for (Index i = 0; i < x.rows(); ++i) {
    std::size_t n = 0;
    for (Index j = 0; j < x.rows(); ++j) {
      if (j != i) row[n++] = d(i, j);
    }
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
    r[i] = row[static_cast<std::size_t>(k - 1)];
  }
  return r;
}

double coverage(const FeatureMatrix& manifold, const Eigen::VectorXd& radii, const FeatureMatrix& queries) {
  const Eigen::MatrixXd d = pairwise_distances(queries, manifold);
  Index inside = 0;
  for (Index q = 0; q < queries.rows(); ++q) {
    if (((d.row(q).transpose() - radii).array() <= 0.0).any()) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(queries.rows());
}

}  // namespace

PrecisionRecall knn_precision_recall(const FeatureMatrix& real, const FeatureMatrix& fake, Index k) {
  if (k < 1) throw bad_param("k must be >= 1");
  if (real.rows() <= k || fake.rows() <= k) throw bad_param("precision/recall needs more than k points per set");
  if (real.cols() != fake.cols()) throw bad_param("feature sets differ in dimension");
  if (!real.allFinite() || !fake.allFinite()) throw bad_param("non-finite features");
  return {coverage(real, knn_radii(real, k), fake), coverage(fake, knn_radii(fake, k), real)};
}

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, int max_sweeps) {
  if (input.rows() != input.cols()) throw ShapeError("jacobi_eigen: matrix must be square");
  const Index n = input.rows();
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.squaredNorm(), 1e-300);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double off = a.squaredNorm() - a.diagonal().squaredNorm();
    if (off <= 1e-30 * scale) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        // A <- J^T A J with J the rotation in the (p, q) plane.
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return {a.diagonal(), v};
}

double frechet_distance(const FeatureMatrix& real, const FeatureMatrix& fake) {
  const Index d = real.cols();
  if (fake.cols() != d) throw bad_param("feature sets differ in dimension");
  if (real.rows() < d + 1 || fake.rows() < d + 1) {
    throw bad_param("Frechet distance needs at least D + 1 = " + std::to_string(d + 1) + " samples per set");
  }
  if (!real.allFinite() || !fake.allFinite()) throw bad_param("non-finite features");
  auto moments = [](const FeatureMatrix& x) {
    const Eigen::VectorXd mu = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
    return std::pair{mu, Eigen::MatrixXd(centered.transpose() * centered / static_cast<double>(x.rows() - 1))};
  };
  const auto [mu1, s1] = moments(real);
  const auto [mu2, s2] = moments(fake);

  const SymmetricEigen e1 = jacobi_eigen(s1);
  const Eigen::VectorXd root = e1.values.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd sqrt_s1 = e1.vectors * root.asDiagonal() * e1.vectors.transpose();
  const Eigen::MatrixXd m = sqrt_s1 * s2 * sqrt_s1;
  const double trace_sqrt = jacobi_eigen(m).values.cwiseMax(0.0).cwiseSqrt().sum();
  const double dist = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * trace_sqrt;
  return std::max(dist, 0.0);
}

ClassEvaluation evaluate_class(const Generator& g, Index class_id, const FeatureExtractor& extractor,
                               const FeatureMatrix& real_proxy_feats, const EvaluationConfig& config) {
  const auto& s = g.spec();
  if (config.ms_ssim_images < 2) throw bad_param("MS-SSIM needs at least 2 images");
  if (config.ms_ssim_pairs < 1) throw bad_param("MS-SSIM needs at least 1 pair");
  ClassEvaluation e;
  e.class_id = class_id;
  e.seed = config.seed;
  e.awareness_samples = config.awareness_samples;
  e.fake_samples = config.fake_samples;
  e.real_samples = real_proxy_feats.rows();
  e.ms_ssim_pairs = config.ms_ssim_pairs;
  e.total_awareness =
      estimate_awareness(g, class_id, {config.awareness_samples, config.seed, config.workers}).total_awareness;

  const Index n = std::max(config.fake_samples, config.ms_ssim_images);
  std::vector<Tensor> images(static_cast<std::size_t>(n));
  parallel_for(images.size(), config.workers, [&](std::size_t i) {
    images[i] = forward(g, {sample_latent(s.latent_dim, config.seed, i), class_id}).image;
  });
  FeatureMatrix fake(config.fake_samples, extractor.dim(s));
  for (Index i = 0; i < config.fake_samples; ++i) {
    fake.row(i) = extractor.extract(images[static_cast<std::size_t>(i)]).transpose();
  }
  const PrecisionRecall pr = knn_precision_recall(real_proxy_feats, fake, config.knn_k);
  e.precision = pr.precision;
  e.recall = pr.recall;
  e.frechet_distance = frechet_distance(real_proxy_feats, fake);

  // Pairs drawn uniformly with replacement from the unordered pairs of the first ms_ssim_images samples.
  const Index m = config.ms_ssim_images;
  const auto pair_count = static_cast<std::uint64_t>(m * (m - 1) / 2);
  Rng rng(config.seed, Stream::image_pairs, static_cast<std::uint64_t>(class_id));
  std::vector<std::pair<Index, Index>> pairs;
  for (Index p = 0; p < config.ms_ssim_pairs; ++p) {
    auto r = static_cast<Index>(rng.below(pair_count));
    Index i = 0;
    while (r >= m - 1 - i) {
      r -= m - 1 - i;
      ++i;
    }
    pairs.emplace_back(i, i + 1 + r);
  }
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), config.workers, [&](std::size_t p) {
    values[p] = ms_ssim(images[static_cast<std::size_t>(pairs[p].first)], images[static_cast<std::size_t>(pairs[p].second)]);
  });
  double sum = 0.0;
  for (double v : values) sum += v;
  e.ms_ssim_mean = sum / static_cast<double>(values.size());
  return e;
}

double metric_value(const ClassEvaluation& e, const std::string& metric) {
  if (metric == "precision") return e.precision;
  if (metric == "recall") return e.recall;
  if (metric == "ms_ssim") return e.ms_ssim_mean;
  if (metric == "frechet") return e.frechet_distance;
  throw bad_param("unknown metric '" + metric + "'");
}

namespace {

void sort_by_awareness(std::vector<ClassEvaluation>& evaluations) {
  std::stable_sort(evaluations.begin(), evaluations.end(), [](const ClassEvaluation& a, const ClassEvaluation& b) {
    return a.total_awareness < b.total_awareness;
  });
}

}  // namespace

double awareness_metric_correlation(std::vector<ClassEvaluation> evaluations, const std::string& metric,
                                    Index smoothing_window) {
  if (evaluations.size() < 3) throw bad_param("correlation needs at least 3 classes");
  sort_by_awareness(evaluations);
  const auto n = static_cast<Index>(evaluations.size());
  Eigen::VectorXd a(n), m(n);
  for (Index i = 0; i < n; ++i) {
    a[i] = evaluations[static_cast<std::size_t>(i)].total_awareness;
    m[i] = metric_value(evaluations[static_cast<std::size_t>(i)], metric);
  }
  if (smoothing_window > 1) {
    a = sliding_window_smooth(a, smoothing_window);
    m = sliding_window_smooth(m, smoothing_window);
  }
  return pearson_correlation(a, m);
}

nlohmann::ordered_json to_json(const ClassEvaluation& e) {
  nlohmann::ordered_json j;
  j["class_id"] = e.class_id;
  j["total_awareness"] = e.total_awareness;
  j["precision"] = e.precision;
  j["recall"] = e.recall;
  j["ms_ssim"] = e.ms_ssim_mean;
  j["frechet"] = e.frechet_distance;
  j["awareness_samples"] = e.awareness_samples;
  j["fake_samples"] = e.fake_samples;
  j["real_samples"] = e.real_samples;
  j["ms_ssim_pairs"] = e.ms_ssim_pairs;
  j["seed"] = e.seed;
  return j;
}

std::string evaluations_csv(std::vector<ClassEvaluation> evaluations) {
  sort_by_awareness(evaluations);
  std::ostringstream os;
  os << "class_id,total_awareness,precision,recall,ms_ssim,frechet\n";
  os << std::setprecision(17);
  for (const auto& e : evaluations) {
    os << e.class_id << ',' << e.total_awareness << ',' << e.precision << ',' << e.recall << ',' << e.ms_ssim_mean
       << ',' << e.frechet_distance << '\n';
  }
  return os.str();
}

}  // namespace awarekit
