#pragma once

#include <string>
#include <vector>

#include <capsac/geosum.hpp>
#include <capsac/model.hpp>
#include <capsac/rng.hpp>

namespace capsac {

// Binary axis-aligned splitting tree. A split on the column axis at absolute
// index k sends columns <= k to the first child and the rest to the second;
// rows behave the same way. Leaves are the sub-regions of the covering.
struct TreeNode {
  Rect rect;
  int axis = -1;   // -1 leaf, 0 column split, 1 row split
  int split = -1;  // absolute index into the instance coordinate lists
  int left = -1;
  int right = -1;

  bool is_leaf() const { return axis < 0; }
};

// Value type: every mutating operation returns a fresh tree and leaves its
// input untouched.
struct PartitionTree {
  std::vector<TreeNode> nodes;
  int root = 0;
};

struct HyperplaneMove {
  int node = -1;
  int axis = -1;
  int split = -1;
  int old_axis = -1;  // snapshot for staleness detection
  int old_split = -1;
};

namespace detail {

inline void preorder_visit(const PartitionTree& t, int idx, std::vector<int>& out) {
  out.push_back(idx);
  const TreeNode& n = t.nodes[idx];
  if (n.is_leaf()) return;
  preorder_visit(t, n.left, out);
  preorder_visit(t, n.right, out);
}

inline void collect_leaves(const PartitionTree& t, int idx, std::vector<int>& out) {
  const TreeNode& n = t.nodes[idx];
  if (n.is_leaf()) {
    out.push_back(idx);
    return;
  }
  collect_leaves(t, n.left, out);
  collect_leaves(t, n.right, out);
}

inline int first_occupied(const GeoSums& gs, const Rect& r, int axis) {
  if (axis == 0) {
    for (int c = r.c_lt; c <= r.c_gt; ++c)
      if (gs.region_count(Rect{c, c, r.l_lo, r.l_hi}) > 0) return c;
  } else {
    for (int l = r.l_lo; l <= r.l_hi; ++l)
      if (gs.region_count(Rect{r.c_lt, r.c_gt, l, l}) > 0) return l;
  }
  return -1;
}

inline int last_occupied(const GeoSums& gs, const Rect& r, int axis) {
  if (axis == 0) {
    for (int c = r.c_gt; c >= r.c_lt; --c)
      if (gs.region_count(Rect{c, c, r.l_lo, r.l_hi}) > 0) return c;
  } else {
    for (int l = r.l_hi; l >= r.l_lo; --l)
      if (gs.region_count(Rect{r.c_lt, r.c_gt, l, l}) > 0) return l;
  }
  return -1;
}

// Splits with both sides holding a photo: any position from the first
// occupied slice up to just before the last one.
inline bool split_range(const GeoSums& gs, const Rect& r, int axis, int& lo, int& hi) {
  lo = first_occupied(gs, r, axis);
  hi = last_occupied(gs, r, axis);
  if (lo < 0 || lo >= hi) return false;
  --hi;
  return true;
}

inline void make_children(PartitionTree& t, int idx) {
  TreeNode& n = t.nodes[idx];
  Rect lr = n.rect, rr = n.rect;
  if (n.axis == 0) {
    lr.c_gt = n.split;
    rr.c_lt = n.split + 1;
  } else {
    lr.l_hi = n.split;
    rr.l_lo = n.split + 1;
  }
  int li = static_cast<int>(t.nodes.size());
  t.nodes.push_back(TreeNode{lr, -1, -1, -1, -1});
  int ri = static_cast<int>(t.nodes.size());
  t.nodes.push_back(TreeNode{rr, -1, -1, -1, -1});
  t.nodes[idx].left = li;
  t.nodes[idx].right = ri;
}

// Splits random leaves under `root_idx` until the sub-tree has `target`
// leaves. Choice order: leaf, then axis, then position, each uniform.
inline void grow(PartitionTree& t, const GeoSums& gs, int root_idx, int target, Rng& rng) {
  std::vector<int> leaves;
  collect_leaves(t, root_idx, leaves);
  while (static_cast<int>(leaves.size()) < target) {
    std::vector<int> splittable;
    for (int idx : leaves) {
      int lo, hi;
      if (split_range(gs, t.nodes[idx].rect, 0, lo, hi) ||
          split_range(gs, t.nodes[idx].rect, 1, lo, hi))
        splittable.push_back(idx);
    }
    if (splittable.empty())
      throw std::runtime_error("cannot form " + std::to_string(target) + " nonempty leaves");
    int idx = splittable[rng.uniform_index(splittable.size())];
    int lo0, hi0, lo1, hi1;
    bool can0 = split_range(gs, t.nodes[idx].rect, 0, lo0, hi0);
    bool can1 = split_range(gs, t.nodes[idx].rect, 1, lo1, hi1);
    int axis;
    if (can0 && can1)
      axis = rng.uniform_int(0, 1);
    else
      axis = can0 ? 0 : 1;
    t.nodes[idx].axis = axis;
    t.nodes[idx].split =
        axis == 0 ? rng.uniform_int(lo0, hi0) : rng.uniform_int(lo1, hi1);
    make_children(t, idx);
    leaves.clear();
    collect_leaves(t, root_idx, leaves);
  }
}

// Recomputes child borders below `idx` after an attribute change. False when
// some split index falls outside its new range or some leaf loses all photos.
inline bool propagate(PartitionTree& t, const GeoSums& gs, int idx) {
  TreeNode& n = t.nodes[idx];
  if (n.is_leaf()) return gs.region_count(n.rect) > 0;
  const int lo = n.axis == 0 ? n.rect.c_lt : n.rect.l_lo;
  const int hi = n.axis == 0 ? n.rect.c_gt : n.rect.l_hi;
  if (n.split < lo || n.split >= hi) return false;
  Rect lr = n.rect, rr = n.rect;
  if (n.axis == 0) {
    lr.c_gt = n.split;
    rr.c_lt = n.split + 1;
  } else {
    lr.l_hi = n.split;
    rr.l_lo = n.split + 1;
  }
  t.nodes[n.left].rect = lr;
  t.nodes[n.right].rect = rr;
  return propagate(t, gs, n.left) && propagate(t, gs, n.right);
}

}  // namespace detail

inline std::vector<int> preorder(const PartitionTree& t) {
  std::vector<int> out;
  detail::preorder_visit(t, t.root, out);
  return out;
}

inline std::vector<int> leaf_list(const PartitionTree& t) {
  std::vector<int> out;
  detail::collect_leaves(t, t.root, out);
  return out;
}

inline int count_leaves(const PartitionTree& t, int idx) {
  std::vector<int> out;
  detail::collect_leaves(t, idx, out);
  return static_cast<int>(out.size());
}

inline std::vector<int> node_depths(const PartitionTree& t) {
  std::vector<int> depth(t.nodes.size(), 0);
  for (int idx : preorder(t)) {
    const TreeNode& n = t.nodes[idx];
    if (n.is_leaf()) continue;
    depth[n.left] = depth[idx] + 1;
    depth[n.right] = depth[idx] + 1;
  }
  return depth;
}

inline int tree_depth(const PartitionTree& t) {
  int d = 0;
  for (int v : node_depths(t)) d = std::max(d, v);
  return d;
}

inline std::vector<int> parent_of(const PartitionTree& t) {
  std::vector<int> par(t.nodes.size(), -1);
  for (int idx : preorder(t)) {
    const TreeNode& n = t.nodes[idx];
    if (n.is_leaf()) continue;
    par[n.left] = idx;
    par[n.right] = idx;
  }
  return par;
}

// Random covering tree with m leaves, each holding at least one photo.
inline PartitionTree random_tree(const Instance& inst, const GeoSums& gs, int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("need at least one leaf");
  PartitionTree t;
  t.nodes.push_back(TreeNode{inst.full_rect(), -1, -1, -1, -1});
  detail::grow(t, gs, t.root, m, rng);
  return t;
}

// Discards the sub-tree under `node` and regrows it at random with the same
// number of leaves. The rest of the tree is copied as-is.
inline PartitionTree reconstruct_subtree(const PartitionTree& t, const GeoSums& gs, int node,
                                         Rng& rng) {
  if (t.nodes[node].is_leaf()) throw std::invalid_argument("cannot reconstruct a leaf");
  const int keep = count_leaves(t, node);
  PartitionTree out;
  out.nodes.reserve(t.nodes.size());
  int new_target = -1;
  // Depth-first copy that flattens the target into a single leaf.
  struct Copier {
    const PartitionTree& src;
    PartitionTree& dst;
    int target;
    int* new_target;
    int run(int idx) {
      const TreeNode& n = src.nodes[idx];
      int ni = static_cast<int>(dst.nodes.size());
      if (idx == target) {
        dst.nodes.push_back(TreeNode{n.rect, -1, -1, -1, -1});
        *new_target = ni;
        return ni;
      }
      dst.nodes.push_back(n);
      if (!n.is_leaf()) {
        int l = run(n.left);
        int r = run(n.right);
        dst.nodes[ni].left = l;
        dst.nodes[ni].right = r;
      }
      return ni;
    }
  };
  out.root = Copier{t, out, node, &new_target}.run(t.root);
  detail::grow(out, gs, new_target, keep, rng);
  return out;
}

// Every (node, axis, position) reassignment inside the sub-tree rooted at
// `node` that keeps the structure intact and every leaf nonempty. The current
// attributes of a node are never offered back. Order: sub-tree pre-order,
// then axis, then position.
inline std::vector<HyperplaneMove> enumerate_hyperplane_moves(const PartitionTree& t,
                                                              const GeoSums& gs, int node) {
  std::vector<HyperplaneMove> out;
  std::vector<int> sub;
  detail::preorder_visit(t, node, sub);
  for (int idx : sub) {
    const TreeNode& n = t.nodes[idx];
    if (n.is_leaf()) continue;
    for (int axis = 0; axis < 2; ++axis) {
      int lo, hi;
      if (!detail::split_range(gs, n.rect, axis, lo, hi)) continue;
      for (int k = lo; k <= hi; ++k) {
        if (axis == n.axis && k == n.split) continue;
        PartitionTree trial = t;
        trial.nodes[idx].axis = axis;
        trial.nodes[idx].split = k;
        if (!detail::propagate(trial, gs, idx)) continue;
        out.push_back(HyperplaneMove{idx, axis, k, n.axis, n.split});
      }
    }
  }
  return out;
}

inline PartitionTree apply_hyperplane_move(const PartitionTree& t, const GeoSums& gs,
                                           const HyperplaneMove& mv) {
  const TreeNode& n = t.nodes[mv.node];
  if (n.is_leaf() || n.axis != mv.old_axis || n.split != mv.old_split)
    throw std::runtime_error("stale move (tree changed since enumeration)");
  PartitionTree out = t;
  out.nodes[mv.node].axis = mv.axis;
  out.nodes[mv.node].split = mv.split;
  if (!detail::propagate(out, gs, mv.node))
    throw std::runtime_error("stale move (tree changed since enumeration)");
  return out;
}

// Deterministic pre-order rendering, used by golden tests and --debug dumps.
inline std::string dump_tree(const PartitionTree& t, const GeoSums& gs) {
  std::string out;
  std::vector<int> depth = node_depths(t);
  for (int idx : preorder(t)) {
    const TreeNode& n = t.nodes[idx];
    out.append(2 * depth[idx], ' ');
    char buf[128];
    if (n.is_leaf()) {
      std::snprintf(buf, sizeof buf, "leaf cols=[%d,%d] rows=[%d,%d] photos=%lld\n",
                    n.rect.c_lt, n.rect.c_gt, n.rect.l_lo, n.rect.l_hi,
                    gs.region_count(n.rect));
    } else {
      std::snprintf(buf, sizeof buf, "node cols=[%d,%d] rows=[%d,%d] split=%s@%d\n",
                    n.rect.c_lt, n.rect.c_gt, n.rect.l_lo, n.rect.l_hi,
                    n.axis == 0 ? "col" : "row", n.split);
    }
    out += buf;
  }
  return out;
}

}  // namespace capsac
