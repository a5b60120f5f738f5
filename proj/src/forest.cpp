#include "oobball/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "oobball/errors.hpp"
#include "oobball/metric.hpp"
#include "oobball/parallel.hpp"

namespace oobball {

namespace {

constexpr std::size_t kSeedSubset = 32;
constexpr int kLloydIterations = 10;
constexpr std::uint64_t kFoldTag = 0xF01D5EEDULL;
constexpr std::uint64_t kTuneTag = 0x7E57ULL;

bool same_point(std::span<const double> a, std::span<const double> b) { return std::equal(a.begin(), a.end(), b.begin()); }

std::vector<double> copy_of(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<std::uint32_t> unique_sorted(std::span<const std::uint32_t> members) {
  std::vector<std::uint32_t> u(members.begin(), members.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

// Center of one cluster on the feature space.
std::vector<double> cluster_center(const PointSet& feature, std::span<const std::uint32_t> cluster, bool medoid) {
  SampleView view{&feature, cluster, {}};
  if (medoid) {
    const auto candidates = unique_sorted(cluster);
    return frechet_medoid(view, candidates).minimizer.coords;
  }
  return frechet_mean(view).minimizer.coords;
}

// Deterministic farthest-pair seeding over at most kSeedSubset members.
std::pair<std::uint32_t, std::uint32_t> seed_pair(const PointSet& feature, std::span<const std::uint32_t> members,
                                                  Rng& rng) {
  const SpaceDescriptor& space = feature.space();
  if (space.kind() == SpaceKind::Euclidean && space.size() == 1) {
    std::uint32_t lo = members[0], hi = members[0];
    for (auto i : members) {
      if (feature[i][0] < feature[lo][0]) lo = i;
      if (feature[i][0] > feature[hi][0]) hi = i;
    }
    return {lo, hi};
  }
  std::vector<std::uint32_t> subset;
  if (members.size() <= kSeedSubset) {
    subset = unique_sorted(members);
  } else {
    for (std::size_t k = 0; k < kSeedSubset; ++k) subset.push_back(members[rng.below(members.size())]);
  }
  std::pair<std::uint32_t, std::uint32_t> best{subset[0], subset[0]};
  double best_d = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      const double d = distance(space, feature[subset[a]], feature[subset[b]]);
      if (d > best_d) {
        best_d = d;
        best = {subset[a], subset[b]};
      }
    }
  if (best_d == 0.0) {
    // The subset happened to be constant; pair its value with any member that differs.
    for (auto i : members)
      if (!same_point(feature[i], feature[best.first])) return {best.first, i};
  }
  return best;
}

}  // namespace

std::string flavor_name(Flavor flavor) {
  switch (flavor) {
    case Flavor::FRF:
      return "frf";
    case Flavor::RFWLCFR:
      return "rfwlcfr";
    case Flavor::MRF:
      return "mrf";
  }
  return {};
}

Flavor parse_flavor(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto f : {Flavor::FRF, Flavor::RFWLCFR, Flavor::MRF})
    if (flavor_name(f) == s) return f;
  throw ParseError("unknown forest flavor '" + std::string(name) + "' (expected frf, rfwlcfr or mrf)");
}

void ForestParams::validate(std::size_t features) const {
  if (trees < 1) throw InvalidArgument("number of trees must be at least 1");
  if (mtry > features) throw InvalidArgument("mtry must lie in [1, " + std::to_string(features) + "]");
  if (min_split_size < 1) throw InvalidArgument("min split size must be at least 1");
  if (trees > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("too many trees");
}

std::optional<SplitRule> two_means_split(const PointSet& feature, std::span<const std::uint32_t> members,
                                         std::size_t feature_index, bool medoid, Rng& rng) {
  if (members.empty()) return std::nullopt;
  bool distinct = false;
  for (auto i : members)
    if (!same_point(feature[i], feature[members[0]])) {
      distinct = true;
      break;
    }
  if (!distinct) return std::nullopt;

  const SpaceDescriptor& space = feature.space();
  const auto [a, b] = seed_pair(feature, members, rng);
  SplitRule rule{feature_index, copy_of(feature[a]), copy_of(feature[b])};

  std::vector<char> side(members.size(), 2), next(members.size());
  std::vector<std::uint32_t> left, right;
  for (int it = 0; it < kLloydIterations; ++it) {
    left.clear();
    right.clear();
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto x = feature[members[k]];
      const bool goes_left = distance(space, x, rule.left) <= distance(space, x, rule.right);
      next[k] = goes_left ? 0 : 1;
      (goes_left ? left : right).push_back(members[k]);
    }
    if (left.empty() || right.empty()) break;
    if (next == side) break;  // assignment is stable, centers already match it
    side = next;
    rule.left = cluster_center(feature, left, medoid);
    rule.right = cluster_center(feature, right, medoid);
  }
  if (same_point(rule.left, rule.right)) return std::nullopt;
  return rule;
}

void partition(const PointSet& feature, const SplitRule& rule, std::span<const std::uint32_t> members,
               std::vector<std::uint32_t>& left, std::vector<std::uint32_t>& right) {
  left.clear();
  right.clear();
  const SpaceDescriptor& space = feature.space();
  for (auto i : members) {
    const auto x = feature[i];
    (distance(space, x, rule.left) <= distance(space, x, rule.right) ? left : right).push_back(i);
  }
}

double node_variance(const PointSet& responses, std::span<const std::uint32_t> members, bool medoid,
                     const DistanceMatrix* distances) {
  SampleView view{&responses, members, {}};
  if (medoid) {
    const auto candidates = unique_sorted(members);
    return frechet_medoid(view, candidates, distances).objective;
  }
  return frechet_mean(view).objective;
}

double cart_gain(const PointSet& responses, std::span<const std::uint32_t> parent,
                 std::span<const std::uint32_t> left, std::span<const std::uint32_t> right, bool medoid,
                 const DistanceMatrix* distances) {
  if (left.empty() || right.empty()) throw InvalidArgument("split has an empty child");
  const double n = static_cast<double>(parent.size());
  return node_variance(responses, parent, medoid, distances) -
         static_cast<double>(left.size()) / n * node_variance(responses, left, medoid, distances) -
         static_cast<double>(right.size()) / n * node_variance(responses, right, medoid, distances);
}

std::size_t Tree::leaf_of(const ProductSpace& space, std::span<const double> x) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& t = nodes[node];
    const std::size_t j = t.rule.feature;
    const auto xj = x.subspan(space.offset(j), space[j].coordinate_count());
    node = distance(space[j], xj, t.rule.left) <= distance(space[j], xj, t.rule.right) ? t.left : t.right;
  }
  return node;
}

Tree grow_tree(const Dataset& data, Flavor flavor, const ForestParams& params, std::vector<std::uint16_t> counts,
               Rng& rng, const DistanceMatrix* response_distances) {
  const std::size_t p = data.predictor_space().arity();
  const std::size_t mtry = params.resolved_mtry(p);
  const std::size_t min_split = params.min_split_size;
  const bool medoid = flavor == Flavor::MRF;
  const PointSet& responses = data.responses();

  Tree tree;
  tree.counts = std::move(counts);
  std::vector<std::uint32_t> root;
  for (std::size_t i = 0; i < tree.counts.size(); ++i)
    for (std::uint16_t c = 0; c < tree.counts[i]; ++c) root.push_back(static_cast<std::uint32_t>(i));
  if (root.empty()) throw InvalidArgument("empty bootstrap sample");

  struct Pending {
    std::size_t node;
    std::vector<std::uint32_t> members;
    double variance;
  };
  std::vector<Pending> stack;
  tree.nodes.emplace_back();
  const double root_var = node_variance(responses, root, medoid, response_distances);
  stack.push_back({0, std::move(root), root_var});

  std::vector<std::size_t> features(p);
  std::vector<std::uint32_t> left, right;
  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    const std::size_t m = job.members.size();

    std::optional<SplitRule> best_rule;
    std::vector<std::uint32_t> best_left, best_right;
    double best_gain = 0.0, best_vl = 0.0, best_vr = 0.0;
    if (m >= 2 * min_split && job.variance > 0.0) {
      std::iota(features.begin(), features.end(), std::size_t{0});
      for (std::size_t k = 0; k < mtry; ++k) {
        const std::size_t pick = k + rng.below(p - k);
        std::swap(features[k], features[pick]);
        const std::size_t j = features[k];
        auto rule = two_means_split(data.feature(j), job.members, j, medoid, rng);
        if (!rule) continue;
        partition(data.feature(j), *rule, job.members, left, right);
        if (left.size() < min_split || right.size() < min_split) continue;
        const double vl = node_variance(responses, left, medoid, response_distances);
        const double vr = node_variance(responses, right, medoid, response_distances);
        const double gain = job.variance - static_cast<double>(left.size()) / static_cast<double>(m) * vl -
                            static_cast<double>(right.size()) / static_cast<double>(m) * vr;
        if (gain > best_gain) {
          best_gain = gain;
          best_rule = std::move(rule);
          best_left = left;
          best_right = right;
          best_vl = vl;
          best_vr = vr;
        }
      }
    }

    if (best_rule) {
      const auto l = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      tree.nodes[job.node].left = l;
      tree.nodes[job.node].right = l + 1;
      tree.nodes[job.node].rule = std::move(*best_rule);
      // Right first so the left subtree is expanded first.
      stack.push_back({static_cast<std::size_t>(l + 1), std::move(best_right), best_vr});
      stack.push_back({static_cast<std::size_t>(l), std::move(best_left), best_vl});
    } else {
      TreeNode& leaf = tree.nodes[job.node];
      if (flavor == Flavor::FRF) leaf.value = frechet_mean(SampleView{&responses, job.members, {}}).minimizer.coords;
      leaf.members = std::move(job.members);
    }
  }
  return tree;
}

ForestModel::ForestModel(Flavor flavor, ForestParams params, Dataset training, std::vector<Tree> trees,
                         std::shared_ptr<const DistanceMatrix> distances)
    : flavor_(flavor),
      params_(params),
      training_(std::move(training)),
      trees_(std::move(trees)),
      distances_(flavor == Flavor::MRF ? std::move(distances) : nullptr) {
  if (trees_.empty()) throw InvalidArgument("a forest needs at least one tree");
  for (const auto& t : trees_)
    if (t.counts.size() != training_.size()) throw InvalidArgument("bootstrap counts do not match the training set");
  if (flavor_ == Flavor::MRF && (!distances_ || distances_->size() != training_.size()))
    distances_ = std::make_shared<const DistanceMatrix>(training_.responses(), params_.threads);
}

std::vector<std::uint32_t> ForestModel::oob_trees(std::size_t i) const {
  if (i >= size()) throw InvalidArgument("training index out of range");
  std::vector<std::uint32_t> out;
  for (std::size_t b = 0; b < trees_.size(); ++b)
    if (!trees_[b].in_bag(i)) out.push_back(static_cast<std::uint32_t>(b));
  return out;
}

ForestWeights ForestModel::weights(std::span<const double> x, std::span<const std::uint32_t> trees) const {
  if (x.size() != predictor_space().coordinate_count())
    throw DescriptorMismatch("query has " + std::to_string(x.size()) + " coordinates, model predictors " +
                             predictor_space().to_string() + " need " +
                             std::to_string(predictor_space().coordinate_count()));
  const std::size_t count = trees.empty() ? trees_.size() : trees.size();
  ForestWeights w(size(), 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t b = trees.empty() ? k : trees[k];
    if (b >= trees_.size()) throw InvalidArgument("tree index out of range");
    const Tree& t = trees_[b];
    const auto& members = t.nodes[t.leaf_of(predictor_space(), x)].members;
    const double c = 1.0 / (static_cast<double>(members.size()) * static_cast<double>(count));
    for (auto i : members) w[i] += c;
  }
  return w;
}

MetricPoint ForestModel::predict_with(std::span<const double> x, std::span<const std::uint32_t> trees,
                                      std::optional<std::size_t> exclude) const {
  const PointSet& responses = training_.responses();
  if (flavor_ == Flavor::FRF) {
    if (x.size() != predictor_space().coordinate_count())
      throw DescriptorMismatch("query does not match the model predictor space " + predictor_space().to_string());
    const std::size_t count = trees.empty() ? trees_.size() : trees.size();
    PointSet predictions(response_space());
    predictions.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const Tree& t = trees_[trees.empty() ? k : trees[k]];
      predictions.push_back(t.nodes[t.leaf_of(predictor_space(), x)].value);
    }
    return frechet_mean(SampleView{&predictions, {}, {}}).minimizer;
  }

  const ForestWeights w = weights(x, trees);
  std::vector<std::uint32_t> support;
  std::vector<double> ws;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) {
      support.push_back(static_cast<std::uint32_t>(i));
      ws.push_back(w[i]);
    }
  SampleView view{&responses, support, ws};
  if (flavor_ == Flavor::RFWLCFR) return frechet_mean(view).minimizer;

  std::vector<std::uint32_t> candidates;
  candidates.reserve(size());
  for (std::size_t i = 0; i < size(); ++i)
    if (!exclude || *exclude != i) candidates.push_back(static_cast<std::uint32_t>(i));
  return frechet_medoid(view, candidates, distances_.get()).minimizer;
}

MetricPoint ForestModel::predict(std::span<const double> x) const { return predict_with(x, {}); }

MetricPoint ForestModel::oob_predict(std::size_t i) const {
  const auto trees = oob_trees(i);
  if (trees.empty()) throw NoOobTrees(i);
  return predict_with(training_.predictor(i), trees, i);
}

ForestModel fit_forest(const Dataset& data, Flavor flavor, const ForestParams& params) {
  const std::size_t n = data.size();
  params.validate(data.predictor_space().arity());
  if (n < 2) throw InvalidArgument("at least two observations are needed to fit a forest");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("training set too large");

  std::shared_ptr<const DistanceMatrix> distances;
  if (flavor == Flavor::MRF) distances = std::make_shared<const DistanceMatrix>(data.responses(), params.threads);

  std::vector<Tree> trees(params.trees);
  const Rng root(params.seed);
  parallel_for(params.trees, params.threads, [&](std::size_t b) {
    Rng rng = root.child(b);
    std::vector<std::uint16_t> counts(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      auto& c = counts[rng.below(n)];
      if (c == std::numeric_limits<std::uint16_t>::max()) throw NumericalFailure("bootstrap multiplicity overflow");
      ++c;
    }
    trees[b] = grow_tree(data, flavor, params, std::move(counts), rng, distances.get());
  });
  return ForestModel(flavor, params, data, std::move(trees), std::move(distances));
}

TuningResult tune_hyperparameters(const Dataset& data, Flavor flavor, const ForestParams& base, const TuningGrid& grid,
                                  std::size_t folds, std::size_t tune_trees) {
  const std::size_t n = data.size();
  const std::size_t p = data.predictor_space().arity();
  if (folds < 2) throw InvalidArgument("cross-validation needs at least two folds");
  if (n < folds) throw InvalidArgument("fewer observations than folds");
  std::vector<std::size_t> mtrys = grid.mtrys;
  if (mtrys.empty())
    for (std::size_t j = 1; j <= p; ++j) mtrys.push_back(j);
  if (grid.min_split_sizes.empty()) throw InvalidArgument("empty min split size grid");

  TuningResult result;
  for (auto s : grid.min_split_sizes)
    for (auto m : mtrys) {
      ForestParams candidate = base;
      candidate.min_split_size = s;
      candidate.mtry = m;
      candidate.validate(p);
      result.grid.emplace_back(s, m);
    }

  // Fold labels from a seeded permutation.
  Rng fold_rng = Rng(base.seed).child(kFoldTag);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[fold_rng.below(k)]);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t k = 0; k < n; ++k) fold_of[order[k]] = k % folds;

  std::vector<Dataset> train, test;
  std::vector<std::uint64_t> fold_seeds;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? te : tr).push_back(i);
    if (tr.size() < 2) throw InvalidArgument("cross-validation fold has fewer than two training observations");
    train.push_back(data.subset(tr));
    test.push_back(data.subset(te));
    fold_seeds.push_back(Rng(base.seed).child({kTuneTag, f}).engine()());
  }

  result.cv_errors.assign(result.grid.size(), 0.0);
  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      ForestParams params = base;
      params.min_split_size = result.grid[g].first;
      params.mtry = result.grid[g].second;
      params.seed = fold_seeds[f];
      if (tune_trees > 0) params.trees = tune_trees;
      const ForestModel model = fit_forest(train[f], flavor, params);
      const PointSet& y = test[f].responses();
      for (std::size_t i = 0; i < test[f].size(); ++i) {
        const double d = distance(y.space(), y[i], model.predict(test[f].predictor(i)).coords);
        total += d * d;
      }
    }
    result.cv_errors[g] = total / static_cast<double>(n);
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < result.grid.size(); ++g) {
    const auto& a = result.grid[g];
    const auto& b = result.grid[best];
    const double ea = result.cv_errors[g], eb = result.cv_errors[best];
    if (ea < eb || (ea == eb && (a.first < b.first || (a.first == b.first && a.second < b.second)))) best = g;
  }
  result.params = base;
  result.params.min_split_size = result.grid[best].first;
  result.params.mtry = result.grid[best].second;
  return result;
}

}  // namespace oobball
