#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace prodcoef::dyadic {

// Nodes of a complete binary tree are addressed in level order: the root is 1
// and the children of node i are 2i (left) and 2i+1 (right). A tree of depth d
// has levels 0..d; the leaves are indices [2^d, 2^(d+1)).
using NodeIndex = std::size_t;

constexpr NodeIndex kRoot = 1;
constexpr NodeIndex left_child(NodeIndex s) { return 2 * s; }
constexpr NodeIndex right_child(NodeIndex s) { return 2 * s + 1; }
constexpr NodeIndex parent_of(NodeIndex s) { return s / 2; }

int level_of(NodeIndex s);
constexpr std::size_t node_count(int depth) { return (std::size_t{2} << depth) - 1; }
constexpr std::size_t non_leaf_count(int depth) { return (std::size_t{1} << depth) - 1; }
constexpr NodeIndex first_leaf(int depth) { return NodeIndex{1} << depth; }

// Naive reference measure: 1 at the root, halved at every level.
double naive_measure(NodeIndex s);

// Non-negative measure on every node of a complete binary tree.
class DyadicTree {
 public:
  DyadicTree() = default;

  // All-zero tree.
  explicit DyadicTree(int depth);

  // From leaf masses (2^depth of them, left to right). Internal nodes are sums,
  // so additivity holds by construction.
  static DyadicTree from_leaves(std::span<const double> leaves);

  // From a full level-order table (node_count(depth) entries, root first).
  // Validates non-negativity and additivity.
  static DyadicTree from_level_order(int depth, std::span<const double> masses);

  int depth() const { return depth_; }
  double mass(NodeIndex s) const;
  double& mass(NodeIndex s);
  double root_mass() const { return mass(kRoot); }
  bool is_leaf(NodeIndex s) const { return s >= first_leaf(depth_); }
  bool contains(NodeIndex s) const { return s >= 1 && s < first_leaf(depth_ + 1); }
  std::vector<double> leaves() const;
  std::vector<double> level_order() const;

  // Recomputes internal nodes from the leaves.
  void accumulate();

  // Checks non-negativity and additivity: exact when every mass is an integer,
  // otherwise within `tolerance`. Throws Error(kInconsistentMeasure).
  void validate(double tolerance = 1e-12) const;

 private:
  int depth_ = 0;
  std::vector<double> mass_{0.0, 0.0};  // slot 0 unused
};

// Product coefficients a_S for every non-leaf node plus the root mass.
class CoefficientTree {
 public:
  CoefficientTree() = default;
  CoefficientTree(int depth, double root_mass, std::vector<double> level_order);

  int depth() const { return depth_; }
  double root_mass() const { return root_mass_; }
  double coefficient(NodeIndex s) const;
  void set_coefficient(NodeIndex s, double a);
  // Non-leaf coefficients in level order (root first).
  const std::vector<double>& level_order() const { return a_; }

  // Throws Error(kDomain) if any coefficient lies outside [-1,1] or the root
  // mass is negative, Error(kConstraint) if a saturated coefficient has a
  // non-zero coefficient below its empty child.
  void validate() const;

 private:
  int depth_ = 0;
  double root_mass_ = 0.0;
  std::vector<double> a_;
};

void to_json(nlohmann::json& j, const CoefficientTree& c);
void from_json(const nlohmann::json& j, CoefficientTree& c);

// (mu_left - mu_right) / mu_parent with mu_right = mu_parent - mu_left; 0 when
// the parent is empty.
double product_coefficient(double mu_parent, double mu_left);

CoefficientTree coefficients_from_measure(const DyadicTree& tree, double tolerance = 1e-12);

// Rebuilds the measure from mu(X) * prod(1 + a_S h_S) dy evaluated on leaves.
DyadicTree measure_from_coefficients(const CoefficientTree& coeffs);

// Haar-like function h_S: +1 on L(S), -1 on R(S), 0 off S. `node` must be a
// non-leaf node and `leaf` a leaf of a tree of the given depth.
int haar_value(int depth, NodeIndex node, NodeIndex leaf);

class HaarFunction {
 public:
  HaarFunction(int depth, NodeIndex node);
  NodeIndex node() const { return node_; }
  int operator()(NodeIndex leaf) const { return haar_value(depth_, node_, leaf); }

 private:
  int depth_;
  NodeIndex node_;
};

}  // namespace prodcoef::dyadic
