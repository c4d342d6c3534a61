#include "prodcoef/dyadic.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "prodcoef/error.hpp"

namespace prodcoef::dyadic {

namespace {

constexpr int kMaxDepth = 30;

void check_depth(int depth) {
  if (depth < 0 || depth > kMaxDepth) {
    throw Error(ErrorCode::kDomain, "tree depth " + std::to_string(depth) + " out of range");
  }
}

bool is_integral(double v) { return std::floor(v) == v && std::abs(v) < 9007199254740992.0; }

}  // namespace

int level_of(NodeIndex s) {
  if (s == 0) throw Error(ErrorCode::kIndex, "node index 0 is not a tree node");
  return std::bit_width(s) - 1;
}

double naive_measure(NodeIndex s) { return std::ldexp(1.0, -level_of(s)); }

// ---------------------------------------------------------------------------

DyadicTree::DyadicTree(int depth) : depth_(depth) {
  check_depth(depth);
  mass_.assign(node_count(depth) + 1, 0.0);
}

DyadicTree DyadicTree::from_leaves(std::span<const double> leaves) {
  const auto n = leaves.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw Error(ErrorCode::kDimension,
                "leaf count " + std::to_string(n) + " is not a power of two");
  }
  DyadicTree tree(std::bit_width(n) - 1);
  const NodeIndex first = first_leaf(tree.depth_);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(leaves[i] >= 0.0) || !std::isfinite(leaves[i])) {
      throw Error(ErrorCode::kDomain, "leaf mass must be finite and non-negative");
    }
    tree.mass_[first + i] = leaves[i];
  }
  tree.accumulate();
  return tree;
}

DyadicTree DyadicTree::from_level_order(int depth, std::span<const double> masses) {
  DyadicTree tree(depth);
  if (masses.size() != node_count(depth)) {
    throw Error(ErrorCode::kDimension, "expected " + std::to_string(node_count(depth)) +
                                           " node masses, got " + std::to_string(masses.size()));
  }
  for (std::size_t i = 0; i < masses.size(); ++i) tree.mass_[i + 1] = masses[i];
  tree.validate();
  return tree;
}

double DyadicTree::mass(NodeIndex s) const {
  if (!contains(s)) throw Error(ErrorCode::kIndex, "node " + std::to_string(s) + " not in tree");
  return mass_[s];
}

double& DyadicTree::mass(NodeIndex s) {
  if (!contains(s)) throw Error(ErrorCode::kIndex, "node " + std::to_string(s) + " not in tree");
  return mass_[s];
}

std::vector<double> DyadicTree::leaves() const {
  return {mass_.begin() + static_cast<std::ptrdiff_t>(first_leaf(depth_)), mass_.end()};
}

std::vector<double> DyadicTree::level_order() const { return {mass_.begin() + 1, mass_.end()}; }

void DyadicTree::accumulate() {
  for (NodeIndex s = first_leaf(depth_) - 1; s >= kRoot; --s) {
    mass_[s] = mass_[left_child(s)] + mass_[right_child(s)];
  }
}

void DyadicTree::validate(double tolerance) const {
  bool integral = true;
  for (NodeIndex s = kRoot; s < mass_.size(); ++s) {
    const double m = mass_[s];
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw Error(ErrorCode::kInconsistentMeasure,
                  "node " + std::to_string(s) + " has negative or non-finite mass");
    }
    integral = integral && is_integral(m);
  }
  for (NodeIndex s = kRoot; s < first_leaf(depth_); ++s) {
    const double sum = mass_[left_child(s)] + mass_[right_child(s)];
    const bool ok = integral ? sum == mass_[s] : std::abs(sum - mass_[s]) <= tolerance;
    if (!ok) {
      throw Error(ErrorCode::kInconsistentMeasure,
                  "additivity violated at node " + std::to_string(s));
    }
  }
}

// ---------------------------------------------------------------------------

CoefficientTree::CoefficientTree(int depth, double root_mass, std::vector<double> level_order)
    : depth_(depth), root_mass_(root_mass), a_(std::move(level_order)) {
  check_depth(depth);
  if (a_.size() != non_leaf_count(depth)) {
    throw Error(ErrorCode::kDimension, "expected " + std::to_string(non_leaf_count(depth)) +
                                           " coefficients, got " + std::to_string(a_.size()));
  }
}

double CoefficientTree::coefficient(NodeIndex s) const {
  if (s < kRoot || s >= first_leaf(depth_)) {
    throw Error(ErrorCode::kIndex, "node " + std::to_string(s) + " is not a non-leaf node");
  }
  return a_[s - 1];
}

void CoefficientTree::set_coefficient(NodeIndex s, double a) {
  if (s < kRoot || s >= first_leaf(depth_)) {
    throw Error(ErrorCode::kIndex, "node " + std::to_string(s) + " is not a non-leaf node");
  }
  a_[s - 1] = a;
}

namespace {

// True when every coefficient in the subtree rooted at `s` is zero.
bool subtree_is_zero(const CoefficientTree& c, NodeIndex s) {
  const NodeIndex limit = first_leaf(c.depth());
  for (NodeIndex lo = s, hi = s; lo < limit; lo = left_child(lo), hi = right_child(hi)) {
    for (NodeIndex t = lo; t <= hi; ++t) {
      if (c.coefficient(t) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

void CoefficientTree::validate() const {
  if (!(root_mass_ >= 0.0) || !std::isfinite(root_mass_)) {
    throw Error(ErrorCode::kDomain, "root mass must be finite and non-negative");
  }
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!(a_[i] >= -1.0 && a_[i] <= 1.0)) {
      throw Error(ErrorCode::kDomain,
                  "coefficient at node " + std::to_string(i + 1) + " outside [-1, 1]");
    }
  }
  for (NodeIndex s = kRoot; s < first_leaf(depth_); ++s) {
    const double a = a_[s - 1];
    if (a == 1.0 && !subtree_is_zero(*this, right_child(s))) {
      throw Error(ErrorCode::kConstraint, "a = 1 at node " + std::to_string(s) +
                                              " but the subtree at its right child is non-zero");
    }
    if (a == -1.0 && !subtree_is_zero(*this, left_child(s))) {
      throw Error(ErrorCode::kConstraint, "a = -1 at node " + std::to_string(s) +
                                              " but the subtree at its left child is non-zero");
    }
  }
}

void to_json(nlohmann::json& j, const CoefficientTree& c) {
  j = nlohmann::json{{"depth", c.depth()}, {"root_mass", c.root_mass()}, {"a", c.level_order()}};
}

void from_json(const nlohmann::json& j, CoefficientTree& c) {
  c = CoefficientTree(j.at("depth").get<int>(), j.at("root_mass").get<double>(),
                      j.at("a").get<std::vector<double>>());
}

// ---------------------------------------------------------------------------

double product_coefficient(double mu_parent, double mu_left) {
  if (!(mu_left >= 0.0) || !(mu_parent >= 0.0) || !std::isfinite(mu_parent)) {
    throw Error(ErrorCode::kDomain, "measures must be finite and non-negative");
  }
  if (mu_left > mu_parent) {
    throw Error(ErrorCode::kDomain, "left-child measure exceeds parent measure");
  }
  if (mu_parent == 0.0) return 0.0;
  // mu_left - mu_right with mu_right = mu_parent - mu_left
  return (2.0 * mu_left - mu_parent) / mu_parent;
}

CoefficientTree coefficients_from_measure(const DyadicTree& tree, double tolerance) {
  tree.validate(tolerance);
  const int depth = tree.depth();
  std::vector<double> a(non_leaf_count(depth));
  for (NodeIndex s = kRoot; s < first_leaf(depth); ++s) {
    const double parent = tree.mass(s);
    // Real-valued masses may overshoot the parent by rounding.
    const double left = std::min(tree.mass(left_child(s)), parent);
    a[s - 1] = product_coefficient(parent, left);
  }
  return CoefficientTree(depth, tree.root_mass(), std::move(a));
}

DyadicTree measure_from_coefficients(const CoefficientTree& coeffs) {
  coeffs.validate();
  const int depth = coeffs.depth();
  DyadicTree tree(depth);
  const NodeIndex first = first_leaf(depth);
  const double base = coeffs.root_mass() * std::ldexp(1.0, -depth);
  for (NodeIndex leaf = first; leaf < first_leaf(depth + 1); ++leaf) {
    double m = base;
    for (int level = 0; level < depth; ++level) {
      const NodeIndex s = leaf >> (depth - level);
      m *= 1.0 + coeffs.coefficient(s) * haar_value(depth, s, leaf);
    }
    tree.mass(leaf) = m;
  }
  tree.accumulate();
  return tree;
}

int haar_value(int depth, NodeIndex node, NodeIndex leaf) {
  check_depth(depth);
  if (node < kRoot || node >= first_leaf(depth)) {
    throw Error(ErrorCode::kIndex, "node " + std::to_string(node) + " is not a non-leaf node");
  }
  if (leaf < first_leaf(depth) || leaf >= first_leaf(depth + 1)) {
    throw Error(ErrorCode::kIndex, "index " + std::to_string(leaf) + " is not a leaf");
  }
  // Ancestor of the leaf one level below the node.
  const NodeIndex child = leaf >> (depth - level_of(node) - 1);
  if (parent_of(child) != node) return 0;
  return child == left_child(node) ? 1 : -1;
}

HaarFunction::HaarFunction(int depth, NodeIndex node) : depth_(depth), node_(node) {
  check_depth(depth);
  if (node < kRoot || node >= first_leaf(depth)) {
    throw Error(ErrorCode::kIndex, "node " + std::to_string(node) + " is not a non-leaf node");
  }
}

}  // namespace prodcoef::dyadic
