#include "prodcoef/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prodcoef/error.hpp"
#include "prodcoef/parallel.hpp"
#include "prodcoef/rng.hpp"

namespace prodcoef {

void RandomForestConfig::validate() const {
  if (trees == 0) throw Error(ErrorCode::kConfiguration, "a forest needs at least one tree");
  if (max_features && *max_features == 0) {
    throw Error(ErrorCode::kConfiguration, "max_features must be positive");
  }
  if (min_samples_split < 2) {
    throw Error(ErrorCode::kConfiguration, "min_samples_split must be at least 2");
  }
}

void to_json(nlohmann::json& j, const RandomForestConfig& c) {
  j = nlohmann::json{{"trees", c.trees},
                     {"max_depth", c.max_depth},
                     {"min_samples_split", c.min_samples_split},
                     {"seed", c.seed},
                     {"criterion", "gini"},
                     {"bootstrap", true}};
  j["max_features"] = c.max_features ? nlohmann::json(*c.max_features) : nlohmann::json("sqrt");
}

void from_json(const nlohmann::json& j, RandomForestConfig& c) {
  c.trees = j.at("trees").get<std::size_t>();
  c.max_depth = j.value("max_depth", std::size_t{0});
  c.min_samples_split = j.value("min_samples_split", std::size_t{2});
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto& mf = j.at("max_features");
  if (mf.is_number()) {
    c.max_features = mf.get<std::size_t>();
  } else {
    c.max_features.reset();
  }
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const TreeNode& n = nodes[at];
    at = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold
                                      ? n.left
                                      : n.right);
  }
  return nodes[at];
}

std::size_t DecisionTree::vote(std::span<const double> row) const {
  const auto& counts = leaf_for(row).leaf_counts;
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) -
                                  counts.begin());
}

namespace {

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;
};

// Midpoint strictly below `hi`, so `lo` goes left and `hi` goes right.
double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return (mid >= hi || !std::isfinite(mid)) ? lo : mid;
}

}  // namespace

DecisionTree fit_tree(const FeatureMatrix& x, std::span<const std::uint32_t> class_index,
                      std::size_t class_count, std::vector<std::uint32_t> samples,
                      const RandomForestConfig& config, std::mt19937_64& rng) {
  const std::size_t cols = x.cols;
  const std::size_t try_features = std::clamp<std::size_t>(
      config.max_features.value_or(
          static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cols))))),
      1, std::max<std::size_t>(cols, 1));

  struct Work {
    std::int32_t node;
    std::vector<std::uint32_t> samples;
    std::size_t depth;
  };

  DecisionTree tree;
  tree.nodes.emplace_back();
  std::vector<Work> stack;
  stack.push_back({0, std::move(samples), 0});

  std::vector<std::size_t> feature_pool(cols);
  std::vector<std::pair<double, std::uint32_t>> sorted;
  std::vector<std::uint64_t> left_counts(class_count);

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();
    const auto n = work.samples.size();

    std::vector<std::uint32_t> counts(class_count, 0);
    for (const auto s : work.samples) ++counts[class_index[s]];
    const auto populated = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });

    const auto make_leaf = [&] {
      tree.nodes[static_cast<std::size_t>(work.node)].leaf_counts = counts;
    };
    if (populated <= 1 || n < config.min_samples_split || cols == 0 ||
        (config.max_depth != 0 && work.depth >= config.max_depth)) {
      make_leaf();
      continue;
    }

    // Candidate features: partial Fisher-Yates, then ascending for tie-breaks.
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
    for (std::size_t i = 0; i < try_features; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_below(rng, cols - i));
      std::swap(feature_pool[i], feature_pool[j]);
    }
    std::vector<std::size_t> candidates(feature_pool.begin(),
                                        feature_pool.begin() + static_cast<std::ptrdiff_t>(try_features));
    std::sort(candidates.begin(), candidates.end());

    // Weighted Gini decrease is monotone in sum_c(nL_c^2)/nL + sum_c(nR_c^2)/nR.
    std::uint64_t parent_sq = 0;
    for (const auto c : counts) parent_sq += std::uint64_t{c} * c;
    const double parent_score = static_cast<double>(parent_sq) / static_cast<double>(n);
    const double min_gain = 1e-12 * parent_score;

    std::optional<Split> best;
    for (const auto f : candidates) {
      sorted.clear();
      for (const auto s : work.samples) sorted.emplace_back(x.at(s, f), class_index[s]);
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;

      std::fill(left_counts.begin(), left_counts.end(), 0);
      std::uint64_t left_sq = 0;
      std::uint64_t right_sq = parent_sq;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto c = sorted[i].second;
        const std::uint64_t right_c = counts[c] - left_counts[c];
        left_sq += 2 * left_counts[c] + 1;
        right_sq -= 2 * right_c - 1;
        ++left_counts[c];
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double n_left = static_cast<double>(i + 1);
        const double n_right = static_cast<double>(n - i - 1);
        const double score =
            static_cast<double>(left_sq) / n_left + static_cast<double>(right_sq) / n_right;
        if (score - parent_score > min_gain && (!best || score > best->score)) {
          best = Split{f, midpoint(sorted[i].first, sorted[i + 1].first), score};
        }
      }
    }
    if (!best) {
      make_leaf();
      continue;
    }

    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    for (const auto s : work.samples) {
      (x.at(s, best->feature) <= best->threshold ? left : right).push_back(s);
    }
    const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    const auto right_id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(work.node)];
    node.feature = static_cast<std::int32_t>(best->feature);
    node.threshold = best->threshold;
    node.left = left_id;
    node.right = right_id;
    stack.push_back({right_id, std::move(right), work.depth + 1});
    stack.push_back({left_id, std::move(left), work.depth + 1});
  }
  return tree;
}

RandomForestModel rf_fit(const FeatureMatrix& x, const RandomForestConfig& config,
                         unsigned threads) {
  config.validate();
  const auto& labels = x.require_labels();
  if (x.rows == 0) throw Error(ErrorCode::kInsufficientData, "cannot fit a forest on no rows");

  RandomForestModel model;
  model.config = config;
  model.cols = x.cols;
  model.classes = labels;
  std::sort(model.classes.begin(), model.classes.end());
  model.classes.erase(std::unique(model.classes.begin(), model.classes.end()),
                      model.classes.end());
  std::vector<std::uint32_t> class_index(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) {
    class_index[r] = static_cast<std::uint32_t>(
        std::lower_bound(model.classes.begin(), model.classes.end(), labels[r]) -
        model.classes.begin());
  }

  model.trees.resize(config.trees);
  parallel_for(config.trees, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      auto rng = make_stream(config.seed, t);
      std::vector<std::uint32_t> bootstrap(x.rows);
      for (auto& s : bootstrap) s = static_cast<std::uint32_t>(uniform_below(rng, x.rows));
      model.trees[t] =
          fit_tree(x, class_index, model.classes.size(), std::move(bootstrap), config, rng);
    }
  });
  return model;
}

std::vector<Prediction> rf_predict(const RandomForestModel& model, const FeatureMatrix& queries,
                                   unsigned threads) {
  if (queries.cols != model.cols) {
    throw Error(ErrorCode::kDimension, "query has " + std::to_string(queries.cols) +
                                           " columns, forest expects " +
                                           std::to_string(model.cols));
  }
  std::vector<Prediction> out(queries.rows);
  parallel_for(queries.rows, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> tally(model.classes.size());
    for (std::size_t q = begin; q < end; ++q) {
      std::fill(tally.begin(), tally.end(), 0.0);
      for (const auto& tree : model.trees) tally[tree.vote(queries.row(q))] += 1.0;
      Prediction p;
      for (std::size_t c = 0; c < tally.size(); ++c) {
        if (tally[c] > 0.0) p.votes[model.classes[c]] = tally[c];
      }
      p.label = plurality(p.votes);
      out[q] = std::move(p);
    }
  });
  return out;
}

void to_json(nlohmann::json& j, const RandomForestModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : m.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      if (n.is_leaf()) {
        nodes.push_back({{"leaf_counts", n.leaf_counts}});
      } else {
        nodes.push_back(
            {{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  j = nlohmann::json{{"classifier", "random_forest"},
                     {"config", m.config},
                     {"cols", m.cols},
                     {"classes", m.classes},
                     {"trees", std::move(trees)}};
}

void from_json(const nlohmann::json& j, RandomForestModel& m) {
  m.config = j.at("config").get<RandomForestConfig>();
  m.cols = j.at("cols").get<std::size_t>();
  m.classes = j.at("classes").get<std::vector<int>>();
  m.trees.clear();
  for (const auto& jt : j.at("trees")) {
    DecisionTree tree;
    for (const auto& jn : jt) {
      TreeNode n;
      if (jn.contains("leaf_counts")) {
        n.leaf_counts = jn.at("leaf_counts").get<std::vector<std::uint32_t>>();
        if (n.leaf_counts.size() != m.classes.size()) {
          throw Error(ErrorCode::kParse, "leaf class counts do not match the class list");
        }
      } else {
        n.feature = jn.at("feature").get<std::int32_t>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<std::int32_t>();
        n.right = jn.at("right").get<std::int32_t>();
      }
      tree.nodes.push_back(std::move(n));
    }
    const auto count = static_cast<std::int32_t>(tree.nodes.size());
    for (const auto& n : tree.nodes) {
      if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count ||
                           n.feature >= static_cast<std::int32_t>(m.cols))) {
        throw Error(ErrorCode::kParse, "malformed tree node");
      }
    }
    if (tree.nodes.empty()) throw Error(ErrorCode::kParse, "empty tree");
    m.trees.push_back(std::move(tree));
  }
}

}  // namespace prodcoef
