#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oobball/dataset.hpp"
#include "oobball/frechet.hpp"
#include "oobball/rng.hpp"
#include "oobball/space.hpp"

namespace oobball {

enum class Flavor { FRF, RFWLCFR, MRF };

std::string flavor_name(Flavor flavor);
Flavor parse_flavor(std::string_view name);

struct ForestParams {
  std::size_t trees = 200;
  std::size_t mtry = 0;  // 0 means every feature
  std::size_t min_split_size = 1;
  std::uint64_t seed = 1;
  int threads = 1;  // tree-level workers; does not affect results

  // Throws InvalidArgument for B < 1, mtry outside [1, p] or min split size < 1.
  void validate(std::size_t features) const;
  std::size_t resolved_mtry(std::size_t features) const { return mtry == 0 ? features : mtry; }
};

// Voronoi split on one predictor component: x goes left when d(x_j, left) <= d(x_j, right).
struct SplitRule {
  std::size_t feature = 0;
  std::vector<double> left;
  std::vector<double> right;
};

struct TreeNode {
  std::int32_t left = -1;   // child node indices, -1 for leaves
  std::int32_t right = -1;
  SplitRule rule;                      // internal nodes only
  std::vector<std::uint32_t> members;  // leaves only: training indices with bootstrap multiplicity
  std::vector<double> value;           // leaves only, FRF: Frechet mean of the member responses

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<std::uint16_t> counts;  // bootstrap multiplicity of every training index

  std::size_t leaf_of(const ProductSpace& space, std::span<const double> x) const;
  bool in_bag(std::size_t i) const { return counts[i] != 0; }
};

// Per-training-index weights for one query point; sums to one.
using ForestWeights = std::vector<double>;

class ForestModel {
 public:
  // `distances` may carry a precomputed response distance matrix for MRF.
  ForestModel(Flavor flavor, ForestParams params, Dataset training, std::vector<Tree> trees,
              std::shared_ptr<const DistanceMatrix> distances = nullptr);

  Flavor flavor() const { return flavor_; }
  const ForestParams& params() const { return params_; }
  const Dataset& training() const { return training_; }
  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t size() const { return training_.size(); }
  const ProductSpace& predictor_space() const { return training_.predictor_space(); }
  const SpaceDescriptor& response_space() const { return training_.response_space(); }

  // Response distance matrix (MRF only; null otherwise).
  const DistanceMatrix* response_distances() const { return distances_.get(); }

  // Trees whose bootstrap sample excludes observation i.
  std::vector<std::uint32_t> oob_trees(std::size_t i) const;

  // Leaf-occupancy weights averaged over `trees` (all trees when empty).
  ForestWeights weights(std::span<const double> x, std::span<const std::uint32_t> trees = {}) const;

  // Forest prediction at x (flat predictor coordinates).
  MetricPoint predict(std::span<const double> x) const;
  // Prediction from the trees listed (all when empty). `exclude` removes one training
  // response from the MRF medoid candidates.
  MetricPoint predict_with(std::span<const double> x, std::span<const std::uint32_t> trees,
                           std::optional<std::size_t> exclude = std::nullopt) const;
  // Out-of-bag prediction for training observation i; throws NoOobTrees when i is in-bag everywhere.
  MetricPoint oob_predict(std::size_t i) const;

  // Hyperparameter record (for example, a tuning summary) persisted with the model.
  std::string note;

 private:
  Flavor flavor_;
  ForestParams params_;
  Dataset training_;
  std::vector<Tree> trees_;
  std::shared_ptr<const DistanceMatrix> distances_;
};

// Grows one tree on the bootstrap counts given. Exposed for testing.
Tree grow_tree(const Dataset& data, Flavor flavor, const ForestParams& params, std::vector<std::uint16_t> counts,
               Rng& rng, const DistanceMatrix* response_distances = nullptr);

ForestModel fit_forest(const Dataset& data, Flavor flavor, const ForestParams& params);

// Two-means clustering of node members on one predictor component. Returns nothing when
// the members take fewer than two distinct values or one cluster ends up empty. Centers are
// Frechet means of the clusters (medoids among cluster members when `medoid`).
std::optional<SplitRule> two_means_split(const PointSet& feature, std::span<const std::uint32_t> members,
                                         std::size_t feature_index, bool medoid, Rng& rng);

// Members sent left and right by the rule (ties go left).
void partition(const PointSet& feature, const SplitRule& rule, std::span<const std::uint32_t> members,
               std::vector<std::uint32_t>& left, std::vector<std::uint32_t>& right);

// Node impurity: Frechet variance of the member responses (medoid-based under MRF).
double node_variance(const PointSet& responses, std::span<const std::uint32_t> members, bool medoid,
                     const DistanceMatrix* distances = nullptr);

// V(A) - |A_l|/|A| V(A_l) - |A_r|/|A| V(A_r).
double cart_gain(const PointSet& responses, std::span<const std::uint32_t> parent,
                 std::span<const std::uint32_t> left, std::span<const std::uint32_t> right, bool medoid,
                 const DistanceMatrix* distances = nullptr);

struct TuningGrid {
  std::vector<std::size_t> min_split_sizes{1, 5, 10};
  std::vector<std::size_t> mtrys;  // empty means {1, ..., p}
};

struct TuningResult {
  ForestParams params;
  std::vector<double> cv_errors;  // one per grid point, min split size major
  std::vector<std::pair<std::size_t, std::size_t>> grid;  // (min split size, mtry)
};

// Grid search by k-fold cross-validation on the mean squared response distance. Every grid
// point sees the same folds and the same per-fold tree seeds. Ties go to the smallest min
// split size, then the smallest mtry. `tune_trees` overrides the tree count used inside the
// search (0 keeps base.trees).
TuningResult tune_hyperparameters(const Dataset& data, Flavor flavor, const ForestParams& base,
                                  const TuningGrid& grid = {}, std::size_t folds = 5, std::size_t tune_trees = 0);

}  // namespace oobball
