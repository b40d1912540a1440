#ifndef PMC_BOUNDED_SOLVE_HPP
#define PMC_BOUNDED_SOLVE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmc/common.hpp"

namespace pmc {

struct UnboundedPreimageError : Error {
  std::string var;
  explicit UnboundedPreimageError(const std::string& v)
      : Error("variable " + v + " is not bounded by the constraint system"), var(v) {}
};

// Nonnegative integer solutions of a conjunction of linear rows
// sum(c_i * v_i) cmp k, found by interval propagation plus backtracking
// enumeration. All variables range over the naturals.
class BoundedEnumerator {
 public:
  // cmp: 0 = equality, 1 = less-or-equal.
  void add_row(const std::map<std::string, std::int64_t>& coef, int cmp, std::int64_t k) {
    if (cmp == 0) {
      rows_.push_back({coef, k});
      std::map<std::string, std::int64_t> neg;
      for (const auto& [v, c] : coef) neg[v] = -c;
      rows_.push_back({neg, -k});
    } else {
      rows_.push_back({coef, k});
    }
    for (const auto& [v, c] : coef) {
      (void)c;
      ensure_var(v);
    }
  }

  void add_var(const std::string& v) { ensure_var(v); }

  void fix_var(const std::string& v, std::int64_t value) {
    ensure_var(v);
    auto& iv = vars_[index_.at(v)];
    iv.lo = value;
    iv.hi = value;
  }

  void cap_all(std::int64_t cap) { cap_ = cap; }

  // Tightens intervals to a fixpoint. Returns false when infeasibility is
  // detected. Throws UnboundedPreimageError if `require_bounded` and some
  // variable keeps an infinite upper bound.
  bool propagate(bool require_bounded);

  // Enumerates all solutions. The callback returns false to stop early.
  // Returns false when the search was aborted (callback stop or more than
  // `max_solutions` solutions were visited).
  bool enumerate(const std::function<bool(const std::map<std::string, std::int64_t>&)>& cb,
                 std::uint64_t max_solutions = UINT64_MAX);

  const std::vector<std::string>& var_names() const { return names_; }

 private:
  struct Interval {
    std::int64_t lo = 0;
    std::optional<std::int64_t> hi;
  };
  struct Row {
    std::map<std::string, std::int64_t> coef;
    std::int64_t k;
  };

  void ensure_var(const std::string& v) {
    if (index_.count(v)) return;
    index_[v] = vars_.size();
    vars_.push_back({});
    names_.push_back(v);
  }

  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
  }
  static std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b, r = a % b;
    return (r != 0 && ((r < 0) == (b < 0))) ? q + 1 : q;
  }

  bool propagate_rows(std::vector<Interval>& iv) const;
  bool enumerate_rec(std::vector<Interval> iv, std::uint64_t& budget,
                     const std::function<bool(const std::map<std::string, std::int64_t>&)>& cb) const;

  std::vector<Row> rows_;
  std::vector<Interval> vars_;
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::optional<std::int64_t> cap_;
};

inline bool BoundedEnumerator::propagate_rows(std::vector<Interval>& iv) const {
  for (int pass = 0; pass < 256; ++pass) {
    bool changed = false;
    for (const auto& row : rows_) {
      // Minimum achievable value of the row's left side.
      bool min_finite = true;
      std::int64_t total_min = 0;
      for (const auto& [v, c] : row.coef) {
        const Interval& x = iv[index_.at(v)];
        if (c > 0) {
          total_min += c * x.lo;
        } else if (x.hi.has_value()) {
          total_min += c * *x.hi;
        } else {
          min_finite = false;
          break;
        }
      }
      for (const auto& [v, c] : row.coef) {
        Interval& x = iv[index_.at(v)];
        std::int64_t rest;
        if (min_finite) {
          rest = total_min - (c > 0 ? c * x.lo : (x.hi ? c * *x.hi : 0));
        } else {
          // Recompute the rest without this variable; it may still be finite
          // when this variable was the sole unbounded one.
          bool ok = true;
          rest = 0;
          for (const auto& [w, d] : row.coef) {
            if (w == v) continue;
            const Interval& y = iv[index_.at(w)];
            if (d > 0) rest += d * y.lo;
            else if (y.hi) rest += d * *y.hi;
            else { ok = false; break; }
          }
          if (!ok) continue;
        }
        std::int64_t slack = row.k - rest;
        if (c > 0) {
          std::int64_t ub = floor_div(slack, c);
          if (ub < x.lo) return false;
          if (!x.hi || *x.hi > ub) { x.hi = ub; changed = true; }
        } else {
          std::int64_t lb = ceil_div(slack, c);
          if (lb > x.lo) {
            if (x.hi && *x.hi < lb) return false;
            x.lo = lb;
            changed = true;
          }
        }
      }
      if (min_finite && total_min > row.k) return false;
    }
    if (!changed) return true;
  }
  return true;
}

inline bool BoundedEnumerator::propagate(bool require_bounded) {
  if (!propagate_rows(vars_)) return false;
  if (require_bounded) {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (!vars_[i].hi.has_value()) throw UnboundedPreimageError(names_[i]);
  }
  if (cap_) {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].hi && *vars_[i].hi - vars_[i].lo > *cap_)
        throw Error("enumeration range for " + names_[i] + " exceeds the configured bound");
  }
  return true;
}

inline bool BoundedEnumerator::enumerate_rec(
    std::vector<Interval> iv, std::uint64_t& budget,
    const std::function<bool(const std::map<std::string, std::int64_t>&)>& cb) const {
  if (!propagate_rows(iv)) return true;
  // Pick the tightest undetermined variable.
  std::size_t pick = iv.size();
  std::int64_t best = 0;
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (!iv[i].hi.has_value()) throw UnboundedPreimageError(names_[i]);
    std::int64_t width = *iv[i].hi - iv[i].lo;
    if (width > 0 && (pick == iv.size() || width < best)) {
      pick = i;
      best = width;
    }
  }
  if (pick == iv.size()) {
    if (budget == 0) return false;
    --budget;
    std::map<std::string, std::int64_t> sol;
    for (std::size_t i = 0; i < iv.size(); ++i) sol[names_[i]] = iv[i].lo;
    return cb(sol);
  }
  for (std::int64_t v = iv[pick].lo; v <= *iv[pick].hi; ++v) {
    std::vector<Interval> next = iv;
    next[pick].lo = v;
    next[pick].hi = v;
    if (!enumerate_rec(std::move(next), budget, cb)) return false;
  }
  return true;
}

inline bool BoundedEnumerator::enumerate(
    const std::function<bool(const std::map<std::string, std::int64_t>&)>& cb,
    std::uint64_t max_solutions) {
  if (!propagate(true)) return true;
  std::uint64_t budget = max_solutions;
  return enumerate_rec(vars_, budget, cb);
}

}  // namespace pmc

#endif
