#pragma once

#include <stdexcept>
#include <vector>

#include <capsac/model.hpp>

namespace capsac {

namespace detail {

// 2D cumulative table over the distinct-coordinate grid. One pass to build,
// O(1) per query afterwards.
template <typename T>
class Prefix2D {
 public:
  Prefix2D() = default;
  Prefix2D(int nc, int nl) : nc_(nc), nl_(nl), pre_((nc + 1) * (nl + 1), T{}) {}

  void add(int col, int row, T v) { pre_[(col + 1) * (nl_ + 1) + (row + 1)] += v; }

  void build() {
    for (int c = 1; c <= nc_; ++c)
      for (int l = 1; l <= nl_; ++l)
        pre_[c * (nl_ + 1) + l] += pre_[(c - 1) * (nl_ + 1) + l] +
                                   pre_[c * (nl_ + 1) + (l - 1)] -
                                   pre_[(c - 1) * (nl_ + 1) + (l - 1)];
  }

  // Sum over columns <= ci and rows <= li; either index may be -1 for "none".
  T cum(int ci, int li) const { return pre_[(ci + 1) * (nl_ + 1) + (li + 1)]; }

  T total() const { return cum(nc_ - 1, nl_ - 1); }

  T left_of(int ci) const { return cum(ci - 1, nl_ - 1); }
  T right_of(int ci) const { return total() - cum(ci, nl_ - 1); }
  T below(int li) const { return cum(nc_ - 1, li - 1); }
  T above(int li) const { return total() - cum(nc_ - 1, li); }

  // Quadrants are strict on both axes, like the strips.
  T upper_right(int ci, int li) const {
    return total() - cum(ci, nl_ - 1) - cum(nc_ - 1, li) + cum(ci, li);
  }
  T upper_left(int ci, int li) const { return cum(ci - 1, nl_ - 1) - cum(ci - 1, li); }
  T lower_left(int ci, int li) const { return cum(ci - 1, li - 1); }
  T lower_right(int ci, int li) const { return cum(nc_ - 1, li - 1) - cum(ci, li - 1); }

  // Inclusive rectangle, assembled from the whole-region total, the four
  // strips outside the borders, and the four corner quadrants added back.
  T rect(const Rect& r) const {
    return total() - left_of(r.c_lt) - right_of(r.c_gt) - below(r.l_lo) - above(r.l_hi) +
           upper_right(r.c_gt, r.l_hi) + upper_left(r.c_lt, r.l_hi) +
           lower_left(r.c_lt, r.l_lo) + lower_right(r.c_gt, r.l_lo);
  }

 private:
  int nc_ = 0, nl_ = 0;
  std::vector<T> pre_;
};

}  // namespace detail

// Precomputed spatial aggregates: processing time, photo count, and
// per-holder data volume, each queryable over any sub-region in O(1).
class GeoSums {
 public:
  explicit GeoSums(const Instance& inst)
      : nc_(static_cast<int>(inst.lngs.size())),
        nl_(static_cast<int>(inst.lats.size())),
        time_(nc_, nl_),
        count_(nc_, nl_),
        data_(inst.drones.size(), detail::Prefix2D<double>(nc_, nl_)) {
    for (const auto& p : inst.photos) {
      time_.add(p.col, p.row, p.lambda_s);
      count_.add(p.col, p.row, 1);
      for (int h : p.holders) data_[h].add(p.col, p.row, p.mu_mb);
    }
    time_.build();
    count_.build();
    for (auto& d : data_) d.build();
  }

  int num_cols() const { return nc_; }
  int num_rows() const { return nl_; }

  double total_time() const { return time_.total(); }
  long long total_count() const { return count_.total(); }

  double left_time(int ci) const { check_col(ci); return time_.left_of(ci); }
  double right_time(int ci) const { check_col(ci); return time_.right_of(ci); }
  double below_time(int li) const { check_row(li); return time_.below(li); }
  double above_time(int li) const { check_row(li); return time_.above(li); }

  long long left_count(int ci) const { check_col(ci); return count_.left_of(ci); }
  long long right_count(int ci) const { check_col(ci); return count_.right_of(ci); }
  long long below_count(int li) const { check_row(li); return count_.below(li); }
  long long above_count(int li) const { check_row(li); return count_.above(li); }

  double upper_right_time(int ci, int li) const { check_cell(ci, li); return time_.upper_right(ci, li); }
  double upper_left_time(int ci, int li) const { check_cell(ci, li); return time_.upper_left(ci, li); }
  double lower_left_time(int ci, int li) const { check_cell(ci, li); return time_.lower_left(ci, li); }
  double lower_right_time(int ci, int li) const { check_cell(ci, li); return time_.lower_right(ci, li); }

  long long upper_right_count(int ci, int li) const { check_cell(ci, li); return count_.upper_right(ci, li); }
  long long upper_left_count(int ci, int li) const { check_cell(ci, li); return count_.upper_left(ci, li); }
  long long lower_left_count(int ci, int li) const { check_cell(ci, li); return count_.lower_left(ci, li); }
  long long lower_right_count(int ci, int li) const { check_cell(ci, li); return count_.lower_right(ci, li); }

  double region_time(const Rect& r) const {
    check_rect(r);
    return time_.rect(r);
  }

  long long region_count(const Rect& r) const {
    check_rect(r);
    return count_.rect(r);
  }

  double region_data(int holder, const Rect& r) const {
    if (holder < 0 || holder >= static_cast<int>(data_.size()))
      throw std::out_of_range("unknown drone index " + std::to_string(holder));
    check_rect(r);
    return data_[holder].rect(r);
  }

  double left_data(int holder, int ci) const { check_holder(holder); check_col(ci); return data_[holder].left_of(ci); }
  double right_data(int holder, int ci) const { check_holder(holder); check_col(ci); return data_[holder].right_of(ci); }

 private:
  void check_col(int ci) const {
    if (ci < 0 || ci >= nc_) throw std::out_of_range("column index out of range");
  }
  void check_row(int li) const {
    if (li < 0 || li >= nl_) throw std::out_of_range("row index out of range");
  }
  void check_cell(int ci, int li) const { check_col(ci); check_row(li); }
  void check_holder(int h) const {
    if (h < 0 || h >= static_cast<int>(data_.size()))
      throw std::out_of_range("unknown drone index " + std::to_string(h));
  }
  void check_rect(const Rect& r) const {
    if (r.c_lt > r.c_gt || r.l_lo > r.l_hi) throw std::invalid_argument("malformed region borders");
    check_cell(r.c_lt, r.l_lo);
    check_cell(r.c_gt, r.l_hi);
  }

  int nc_, nl_;
  detail::Prefix2D<double> time_;
  detail::Prefix2D<long long> count_;
  std::vector<detail::Prefix2D<double>> data_;
};

}  // namespace capsac
