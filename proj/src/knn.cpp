#include "prodcoef/knn.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include "prodcoef/error.hpp"
#include "prodcoef/parallel.hpp"

namespace prodcoef {

std::vector<int> labels_of(const std::vector<Prediction>& predictions) {
  std::vector<int> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) out.push_back(p.label);
  return out;
}

int plurality(const std::map<int, double>& votes) {
  if (votes.empty()) throw Error(ErrorCode::kEmptyInput, "no votes cast");
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

KnnModel::KnnModel(FeatureMatrix training, std::size_t k, std::size_t leaf_size)
    : training_(std::move(training)), k_(k), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  labels_ = training_.require_labels();
  if (k_ == 0) throw Error(ErrorCode::kConfiguration, "k must be positive");
  if (k_ > training_.rows) {
    throw Error(ErrorCode::kConfiguration, "k = " + std::to_string(k_) + " exceeds the " +
                                               std::to_string(training_.rows) +
                                               " training rows");
  }
  order_.resize(training_.rows);
  std::iota(order_.begin(), order_.end(), 0u);
  build(0, static_cast<std::uint32_t>(training_.rows));
}

std::int32_t KnnModel::build(std::uint32_t begin, std::uint32_t end) {
  const std::size_t d = training_.cols;
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  box_lo_.resize(box_lo_.size() + d, std::numeric_limits<double>::infinity());
  box_hi_.resize(box_hi_.size() + d, -std::numeric_limits<double>::infinity());
  double* lo = box_lo_.data() + static_cast<std::size_t>(id) * d;
  double* hi = box_hi_.data() + static_cast<std::size_t>(id) * d;
  for (std::uint32_t i = begin; i < end; ++i) {
    const auto row = training_.row(order_[i]);
    for (std::size_t c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], row[c]);
      hi[c] = std::max(hi[c], row[c]);
    }
  }
  if (end - begin <= leaf_size_ || d == 0) return id;
  std::size_t axis = 0;
  for (std::size_t c = 1; c < d; ++c) {
    if (hi[c] - lo[c] > hi[axis] - lo[axis]) axis = c;
  }
  if (hi[axis] == lo[axis]) return id;

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = training_.at(a, axis);
                     const double vb = training_.at(b, axis);
                     return va < vb || (va == vb && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double KnnModel::box_distance_sq(std::size_t node, std::span<const double> query) const {
  const std::size_t d = training_.cols;
  const double* lo = box_lo_.data() + node * d;
  const double* hi = box_hi_.data() + node * d;
  double s = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double delta = 0.0;
    if (query[c] < lo[c]) {
      delta = lo[c] - query[c];
    } else if (query[c] > hi[c]) {
      delta = query[c] - hi[c];
    }
    s += delta * delta;
  }
  return s;
}

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> query) const {
  if (query.size() != training_.cols) {
    throw Error(ErrorCode::kDimension, "query has " + std::to_string(query.size()) +
                                           " columns, model expects " +
                                           std::to_string(training_.cols));
  }
  using Candidate = std::pair<double, std::size_t>;
  std::priority_queue<Candidate> best;  // worst candidate on top
  std::vector<std::pair<double, std::int32_t>> stack;
  stack.emplace_back(box_distance_sq(0, query), 0);
  while (!stack.empty()) {
    const auto [bound, node_id] = stack.back();
    stack.pop_back();
    // Equal bounds may still hold a lower-index tie, so only prune on strictly greater.
    if (best.size() == k_ && bound > best.top().first) continue;
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::size_t id = order_[i];
        const Candidate c{squared_distance(training_.row(id), query), id};
        if (best.size() < k_) {
          best.push(c);
        } else if (c < best.top()) {
          best.pop();
          best.push(c);
        }
      }
      continue;
    }
    const double dl = box_distance_sq(static_cast<std::size_t>(node.left), query);
    const double dr = box_distance_sq(static_cast<std::size_t>(node.right), query);
    if (dl <= dr) {
      stack.emplace_back(dr, node.right);
      stack.emplace_back(dl, node.left);
    } else {
      stack.emplace_back(dl, node.left);
      stack.emplace_back(dr, node.right);
    }
  }
  std::vector<std::size_t> ids(best.size());
  for (std::size_t i = ids.size(); i-- > 0;) {
    ids[i] = best.top().second;
    best.pop();
  }
  return ids;
}

std::vector<Prediction> KnnModel::predict(const FeatureMatrix& queries, unsigned threads) const {
  if (queries.cols != training_.cols) {
    throw Error(ErrorCode::kDimension, "query has " + std::to_string(queries.cols) +
                                           " columns, model expects " +
                                           std::to_string(training_.cols));
  }
  std::vector<Prediction> out(queries.rows);
  parallel_for(queries.rows, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      Prediction p;
      for (const auto id : neighbors(queries.row(q))) p.votes[labels_[id]] += 1.0;
      p.label = plurality(p.votes);
      out[q] = std::move(p);
    }
  });
  return out;
}

std::vector<Prediction> knn_predict(const KnnModel& model, const FeatureMatrix& queries,
                                    unsigned threads) {
  return model.predict(queries, threads);
}

nlohmann::json knn_model_json(const KnnModel& model, const std::string& training_csv,
                              const std::string& training_digest) {
  return {{"classifier", "knn"},
          {"k", model.k()},
          {"distance", "euclidean"},
          {"weights", "uniform"},
          {"training_features", training_csv},
          {"training_digest", training_digest},
          {"training_rows", model.training().rows},
          {"cols", model.training().cols}};
}

}  // namespace prodcoef
