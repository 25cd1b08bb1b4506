#pragma once

#include "awarekit/awareness.hpp"
#include "awarekit/generator.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace awarekit {

/// Rows are samples, columns are feature dimensions.
using FeatureMatrix = Eigen::MatrixXd;

class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual Eigen::VectorXd extract(const Tensor& image) const = 0;
  virtual Index dim(const GeneratorSpec& spec) const = 0;
  virtual std::string name() const = 0;
};

/// Average-pools each image channel to grid x grid cells (8 x 8 x 3 = 192 features by default).
class AvgPoolExtractor final : public FeatureExtractor {
 public:
  explicit AvgPoolExtractor(Index grid = 8) : grid_(grid) {}
  Eigen::VectorXd extract(const Tensor& image) const override;
  Index dim(const GeneratorSpec&) const override { return grid_ * grid_ * GeneratorSpec::kOutputChannels; }
  std::string name() const override { return "avgpool" + std::to_string(grid_); }

 private:
  Index grid_;
};

class IdentityExtractor final : public FeatureExtractor {
 public:
  Eigen::VectorXd extract(const Tensor& image) const override;
  Index dim(const GeneratorSpec& spec) const override;
  std::string name() const override { return "identity"; }
};

std::unique_ptr<FeatureExtractor> make_extractor(const std::string& name);

/// Features of n seeded samples of one class; row i uses latent draw i.
FeatureMatrix generate_features(const Generator& g, Index class_id, Index n, std::uint64_t seed,
                                const FeatureExtractor& extractor, unsigned workers = 0);

/// Nearest-centroid classifier with scores softmax(-tau * distance).
struct CentroidClassifier {
  std::vector<Index> classes;
  FeatureMatrix centroids;  // one row per entry of `classes`
  double tau = 1.0;

  Eigen::VectorXd scores(const Eigen::VectorXd& features) const;
  /// Score of `class_id`; throws bad_class when the classifier does not know it.
  double score(const Eigen::VectorXd& features, Index class_id) const;
  Index predict(const Eigen::VectorXd& features) const;
};

/// tau <= 0 selects kAutoTauScale / (median pairwise centroid distance).
inline constexpr double kAutoTauScale = 4.0;

CentroidClassifier fit_centroid_classifier(const Generator& g, const std::vector<Index>& classes, Index n_per_class,
                                           const FeatureExtractor& extractor, std::uint64_t seed, double tau = 0.0,
                                           unsigned workers = 0);

/// Mean over n_pairs seeded latents of score(unedited) - score(channels zeroed).
double channel_classifier_response(const Generator& g, const CentroidClassifier& classifier,
                                   const FeatureExtractor& extractor, Index class_id,
                                   const std::vector<ChannelRef>& channels, Index n_pairs, std::uint64_t seed,
                                   unsigned workers = 0);

/// Response of every channel zeroed on its own, in (block, channel) order. Shares the unedited prefix and the
/// following convolution of each latent across channels, so it matches channel_classifier_response per channel
/// up to float rounding.
std::vector<std::vector<double>> per_channel_responses(const Generator& g, const CentroidClassifier& classifier,
                                                       const FeatureExtractor& extractor, Index class_id,
                                                       Index n_pairs, std::uint64_t seed, unsigned workers = 0);

Eigen::VectorXd savgol_smooth(const Eigen::VectorXd& series, Index window = 51, Index order = 3);
/// 51 when the series is long enough, otherwise ceil(n / 30) * 2 + 1.
Index savgol_window_for(Index length, Index preferred = 51);
Eigen::VectorXd sliding_window_smooth(const Eigen::VectorXd& series, Index window = 20);
double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Pearson correlation between category awareness and the Savitzky-Golay smoothed response over one block's
/// channels sorted by awareness (stable, ascending).
double awareness_response_correlation(const AwarenessTable& table, Index block, const std::vector<double>& responses);

/// Luma MS-SSIM of two [-1, 1] images.
double ms_ssim(const Tensor& a, const Tensor& b);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

PrecisionRecall knn_precision_recall(const FeatureMatrix& real, const FeatureMatrix& fake, Index k = 3);

struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, int max_sweeps = 100);

double frechet_distance(const FeatureMatrix& real, const FeatureMatrix& fake);

struct EvaluationConfig {
  Index awareness_samples = 256;
  Index fake_samples = 256;
  Index ms_ssim_images = 32;
  Index ms_ssim_pairs = 496;
  Index knn_k = 3;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

struct ClassEvaluation {
  Index class_id = 0;
  double total_awareness = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double ms_ssim_mean = 0.0;
  double frechet_distance = 0.0;
  Index awareness_samples = 0;
  Index fake_samples = 0;
  Index real_samples = 0;
  Index ms_ssim_pairs = 0;
  std::uint64_t seed = 0;
};

ClassEvaluation evaluate_class(const Generator& g, Index class_id, const FeatureExtractor& extractor,
                               const FeatureMatrix& real_proxy_feats, const EvaluationConfig& config);

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"precision", "recall", "ms_ssim", "frechet"};
  return names;
}

double metric_value(const ClassEvaluation& e, const std::string& metric);

/// Pearson correlation between total awareness and `metric` across classes sorted by total awareness,
/// optionally after sliding-window smoothing of both series (window 0 = no smoothing).
double awareness_metric_correlation(std::vector<ClassEvaluation> evaluations, const std::string& metric,
                                    Index smoothing_window = 0);

nlohmann::ordered_json to_json(const ClassEvaluation& e);
/// CSV with one row per class, sorted by total awareness.
std::string evaluations_csv(std::vector<ClassEvaluation> evaluations);

}  // namespace awarekit
