#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "lceopt/pomdp.hpp"

namespace lceopt {

using NodeIndex = std::int64_t;

// Number of nodes in a complete observation-branching tree of the given
// depth: sum of branching^k for k = 0..depth. Overflow is reported, never
// wrapped.
inline std::int64_t policy_tree_node_count(int depth, int observation_count) {
  if (depth < 0) throw std::invalid_argument("policy_tree_node_count: negative depth");
  if (observation_count <= 0)
    throw std::invalid_argument("policy_tree_node_count: observation_count must be positive");
  std::int64_t total = 0;
  std::int64_t level = 1;
  for (int k = 0; k <= depth; ++k) {
    if (total > INT64_MAX - level) throw std::overflow_error("policy_tree_node_count: overflow");
    total += level;
    if (k < depth) {
      if (level > INT64_MAX / observation_count)
        throw std::overflow_error("policy_tree_node_count: overflow");
      level *= observation_count;
    }
  }
  return total;
}

// Breadth-first indexing: root is 0, the children of node v are
// v*branching + 1 .. v*branching + branching, ordered by observation.
struct PolicyTreeShape {
  int depth = 0;
  int observation_count = 1;
  int action_dim = 1;

  PolicyTreeShape() = default;
  PolicyTreeShape(int depth_, int observation_count_, int action_dim_)
      : depth(depth_), observation_count(observation_count_), action_dim(action_dim_) {
    if (action_dim <= 0) throw std::invalid_argument("PolicyTreeShape: action_dim must be positive");
    node_count_ = policy_tree_node_count(depth, observation_count);
    if (node_count_ > INT64_MAX / action_dim)
      throw std::overflow_error("PolicyTreeShape: parameter_dim overflow");
    internal_count_ = depth == 0 ? 0 : policy_tree_node_count(depth - 1, observation_count);
  }

  std::int64_t node_count() const { return node_count_; }
  std::int64_t parameter_dim() const { return node_count_ * action_dim; }

  bool is_leaf(NodeIndex node) const {
    check_node_(node);
    return node >= internal_count_;
  }

  NodeIndex child(NodeIndex node, int observation) const {
    check_node_(node);
    if (node >= internal_count_)
      throw std::out_of_range("PolicyTreeShape::child: descent from a leaf node");
    if (observation < 0 || observation >= observation_count)
      throw std::out_of_range("PolicyTreeShape::child: observation out of range");
    return node * observation_count + observation + 1;
  }

  NodeIndex parent(NodeIndex node) const {
    check_node_(node);
    if (node == 0) throw std::out_of_range("PolicyTreeShape::parent: root has no parent");
    return (node - 1) / observation_count;
  }

 private:
  void check_node_(NodeIndex node) const {
    if (node < 0 || node >= node_count_)
      throw std::out_of_range("PolicyTreeShape: node index out of range");
  }

  std::int64_t node_count_ = 1;
  std::int64_t internal_count_ = 0;
};

// Flat per-node action parameters with a presence mask. Values under absent
// nodes are deliberately uninitialized and unreadable; the mask is the only
// gate, which keeps per-candidate reset cost at O(node_count) bytes rather
// than O(parameter_dim) for lazily filled candidates.
class PolicyParameterVector {
 public:
  explicit PolicyParameterVector(const PolicyTreeShape& shape)
      : shape_(shape),
        values_(std::make_unique_for_overwrite<double[]>(
            static_cast<std::size_t>(shape.parameter_dim()))),
        present_(static_cast<std::size_t>(shape.node_count()), 0) {}

  PolicyParameterVector(const PolicyParameterVector& other)
      : shape_(other.shape_),
        values_(std::make_unique_for_overwrite<double[]>(
            static_cast<std::size_t>(other.shape_.parameter_dim()))),
        present_(other.present_) {
    std::memcpy(values_.get(), other.values_.get(),
                static_cast<std::size_t>(shape_.parameter_dim()) * sizeof(double));
  }

  PolicyParameterVector(PolicyParameterVector&&) noexcept = default;
  PolicyParameterVector& operator=(PolicyParameterVector&&) noexcept = default;

  PolicyParameterVector& operator=(const PolicyParameterVector& other) {
    if (this != &other) *this = PolicyParameterVector(other);
    return *this;
  }

  static PolicyParameterVector from_full(const PolicyTreeShape& shape,
                                         std::span<const double> values) {
    if (static_cast<std::int64_t>(values.size()) != shape.parameter_dim())
      throw std::invalid_argument("PolicyParameterVector::from_full: size mismatch");
    PolicyParameterVector v(shape);
    std::memcpy(v.values_.get(), values.data(), values.size() * sizeof(double));
    std::fill(v.present_.begin(), v.present_.end(), char(1));
    return v;
  }

  const PolicyTreeShape& shape() const { return shape_; }

  bool is_present(NodeIndex node) const {
    return present_[static_cast<std::size_t>(checked_(node))] != 0;
  }

  bool fully_present() const {
    for (char p : present_)
      if (!p) return false;
    return true;
  }

  std::int64_t present_node_count() const {
    std::int64_t n = 0;
    for (char p : present_) n += p != 0;
    return n;
  }

  // Reading through the mask is the contract: any access to an absent block
  // throws, which is what the sparsity tests lean on.
  std::span<const double> action_block(NodeIndex node) const {
    const NodeIndex v = checked_(node);
    if (!present_[static_cast<std::size_t>(v)])
      throw std::logic_error("PolicyParameterVector: read of absent action block");
    return {values_.get() + v * shape_.action_dim, static_cast<std::size_t>(shape_.action_dim)};
  }

  std::span<double> set_action_block(NodeIndex node) {
    const NodeIndex v = checked_(node);
    present_[static_cast<std::size_t>(v)] = 1;
    return {values_.get() + v * shape_.action_dim, static_cast<std::size_t>(shape_.action_dim)};
  }

  void mark_all_present() { std::fill(present_.begin(), present_.end(), char(1)); }

  // Clears the mask only; previously written values become unreachable.
  void reset() { std::fill(present_.begin(), present_.end(), char(0)); }

  // Component access for distribution fitting; presence keyed by owning node.
  bool component_present(std::int64_t dim) const {
    return present_[static_cast<std::size_t>(dim / shape_.action_dim)] != 0;
  }

  double component(std::int64_t dim) const {
    if (!component_present(dim))
      throw std::logic_error("PolicyParameterVector: read of absent component");
    return values_[static_cast<std::size_t>(dim)];
  }

  double* raw_values() { return values_.get(); }

 private:
  NodeIndex checked_(NodeIndex node) const {
    if (node < 0 || node >= shape_.node_count())
      throw std::out_of_range("PolicyParameterVector: node index out of range");
    return node;
  }

  PolicyTreeShape shape_;
  std::unique_ptr<double[]> values_;
  std::vector<char> present_;
};

// The executed action of a mean parameter vector: its root block clamped to
// the action box.
inline std::vector<double> root_action(std::span<const double> mean, const ProblemSpec& spec) {
  if (static_cast<int>(mean.size()) < spec.action_dim)
    throw std::invalid_argument("root_action: mean shorter than action_dim");
  std::vector<double> a(mean.begin(), mean.begin() + spec.action_dim);
  spec.clamp_action(a);
  return a;
}

}  // namespace lceopt
