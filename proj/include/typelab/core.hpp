#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace typelab {

enum class ErrorCode {
  DuplicatePoint,
  OutOfWindow,
  EmptyInput,
  NegativeTerm,
  TooFewPoints,
  DegenerateDistance,
  IntervalTooShort,
  OverlappingIntervals,
  InsufficientData,
  NotShort,
  WindowMismatch,
  NotSeparated,
  NotUniform,
  EmptyNeighborhood,
  WeightBelowOne,
  BadAlternation,
  ConditionsFailed,
  WeightUnbounded,
  BadL,
  UnknownFamily,
  DegenerateGrid,
  IllConditioned,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NegativeTerm: return "NegativeTerm";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateDistance: return "DegenerateDistance";
    case ErrorCode::IntervalTooShort: return "IntervalTooShort";
    case ErrorCode::OverlappingIntervals: return "OverlappingIntervals";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NotShort: return "NotShort";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::NotSeparated: return "NotSeparated";
    case ErrorCode::NotUniform: return "NotUniform";
    case ErrorCode::EmptyNeighborhood: return "EmptyNeighborhood";
    case ErrorCode::WeightBelowOne: return "WeightBelowOne";
    case ErrorCode::BadAlternation: return "BadAlternation";
    case ErrorCode::ConditionsFailed: return "ConditionsFailed";
    case ErrorCode::WeightUnbounded: return "WeightUnbounded";
    case ErrorCode::BadL: return "BadL";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void add(const CompensatedSum& o) {
    add(o.sum_);
    add(o.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace parallel {

inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> n{0};
  return n;
}

inline void set_threads(unsigned n) { thread_setting().store(n); }

inline unsigned threads() {
  const unsigned n = thread_setting().load();
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

inline bool& nested_flag() {
  thread_local bool inside = false;
  return inside;
}

// Runs f(i) for i in [0, n). Work items must write to disjoint outputs;
// callers reduce in index order so results never depend on the thread count.
template <class F>
void for_each_index(std::size_t n, F&& f) {
  const unsigned t = nested_flag() ? 1u : static_cast<unsigned>(std::min<std::size_t>(threads(), n));
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    nested_flag() = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        f(i);
      } catch (...) {
        if (!failed.exchange(true)) err = std::current_exception();
        return;
      }
    }
  };
  pool.reserve(t);
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace parallel

/// Strictly increasing finite point list inside the window [-T, T].
class RealSequence {
 public:
  RealSequence(std::vector<double> sorted_points, double window, std::string generator = "none")
      : points_(std::move(sorted_points)), window_(window), generator_(std::move(generator)) {
    require(std::isfinite(window_) && window_ > 0, ErrorCode::InvalidArgument, "window must be positive");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      require(std::isfinite(points_[i]) && std::abs(points_[i]) <= window_, ErrorCode::OutOfWindow,
              "point outside window");
      if (i > 0)
        require(points_[i] > points_[i - 1], ErrorCode::DuplicatePoint, "points not strictly increasing");
    }
  }

  static RealSequence empty(double window, std::string generator = "none") {
    return RealSequence({}, window, std::move(generator));
  }

  std::span<const double> points() const { return points_; }
  const std::vector<double>& values() const { return points_; }
  double window() const { return window_; }
  const std::string& generator() const { return generator_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double operator[](std::size_t i) const { return points_[i]; }

  // Number of points in the half-open interval (a, b].
  std::size_t count_in(double a, double b) const {
    if (b <= a) return 0;
    auto lo = std::upper_bound(points_.begin(), points_.end(), a);
    auto hi = std::upper_bound(points_.begin(), points_.end(), b);
    return static_cast<std::size_t>(hi - lo);
  }

  // Index of the first point >= 0 (size() when none); the origin of the n-indexing.
  std::size_t origin_index() const {
    return static_cast<std::size_t>(std::lower_bound(points_.begin(), points_.end(), 0.0) - points_.begin());
  }

  bool operator==(const RealSequence& o) const {
    return points_ == o.points_ && window_ == o.window_ && generator_ == o.generator_;
  }

 private:
  std::vector<double> points_;
  double window_;
  std::string generator_;
};

inline RealSequence validate_sequence(std::vector<double> points, double window, std::string generator = "none") {
  require(!points.empty(), ErrorCode::EmptyInput, "no points");
  require(std::isfinite(window) && window > 0, ErrorCode::InvalidArgument, "window must be positive");
  for (double x : points) {
    require(std::isfinite(x), ErrorCode::InvalidArgument, "non-finite point");
    require(std::abs(x) <= window, ErrorCode::OutOfWindow, "point " + std::to_string(x) + " outside window");
  }
  std::sort(points.begin(), points.end());
  for (std::size_t i = 1; i < points.size(); ++i)
    require(points[i] != points[i - 1], ErrorCode::DuplicatePoint, "duplicate point " + std::to_string(points[i]));
  return RealSequence(std::move(points), window, std::move(generator));
}

/// Half-open interval (left, right].
struct Interval {
  double left = 0.0;
  double right = 1.0;

  Interval() = default;
  Interval(double l, double r) : left(l), right(r) {
    require(std::isfinite(l) && std::isfinite(r) && r > l, ErrorCode::InvalidArgument, "interval needs right > left");
  }
  double length() const { return right - left; }
  bool contains(double x) const { return x > left && x <= right; }
  // Distance from 0 to the closed interval.
  double dist_to_origin() const {
    if (left <= 0.0 && right >= 0.0) return 0.0;
    return left > 0.0 ? left : -right;
  }
  bool operator==(const Interval&) const = default;
};

/// Breakpoints a_0 < a_1 < ... containing 0; intervals (a_k, a_{k+1}].
class Partition {
 public:
  explicit Partition(std::vector<double> breakpoints) : bp_(std::move(breakpoints)) {
    require(bp_.size() >= 2, ErrorCode::InvalidArgument, "partition needs two breakpoints");
    for (std::size_t i = 1; i < bp_.size(); ++i)
      require(bp_[i] > bp_[i - 1], ErrorCode::InvalidArgument, "breakpoints not strictly increasing");
    require(std::binary_search(bp_.begin(), bp_.end(), 0.0), ErrorCode::InvalidArgument, "0 must be a breakpoint");
  }

  const std::vector<double>& breakpoints() const { return bp_; }
  std::size_t size() const { return bp_.size() - 1; }
  Interval interval(std::size_t k) const { return Interval(bp_[k], bp_[k + 1]); }
  std::vector<Interval> intervals() const {
    std::vector<Interval> out;
    out.reserve(size());
    for (std::size_t k = 0; k < size(); ++k) out.push_back(interval(k));
    return out;
  }
  double first() const { return bp_.front(); }
  double last() const { return bp_.back(); }
  bool operator==(const Partition&) const = default;

 private:
  std::vector<double> bp_;
};

struct Atom {
  double position = 0.0;
  double mass = 0.0;      // may underflow to 0 for very light atoms
  double log_mass = 0.0;  // authoritative
  bool operator==(const Atom&) const = default;
};

/// Finite positive measure sum m_k delta_{x_k} on [-T, T].
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Atom> atoms, double window, std::string tag = "none")
      : atoms_(std::move(atoms)), window_(window), tag_(std::move(tag)) {
    require(std::isfinite(window_) && window_ > 0, ErrorCode::InvalidArgument, "window must be positive");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const Atom& a = atoms_[i];
      require(std::isfinite(a.position) && std::abs(a.position) <= window_, ErrorCode::OutOfWindow,
              "atom outside window");
      require(i == 0 || a.position > atoms_[i - 1].position, ErrorCode::DuplicatePoint,
              "atom positions not strictly increasing");
      require(std::isfinite(a.log_mass), ErrorCode::InvalidArgument, "atom mass must be positive and finite");
    }
  }

  static DiscreteMeasure from_masses(const std::vector<double>& positions, const std::vector<double>& masses,
                                     double window, std::string tag = "none") {
    require(positions.size() == masses.size(), ErrorCode::InvalidArgument, "positions/masses size mismatch");
    std::vector<Atom> atoms;
    atoms.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
      require(masses[i] > 0 && std::isfinite(masses[i]), ErrorCode::InvalidArgument, "mass must be positive");
      atoms.push_back({positions[i], masses[i], std::log(masses[i])});
    }
    return sorted(std::move(atoms), window, std::move(tag));
  }

  static DiscreteMeasure from_log_masses(const std::vector<double>& positions, const std::vector<double>& log_masses,
                                         double window, std::string tag = "none") {
    require(positions.size() == log_masses.size(), ErrorCode::InvalidArgument, "positions/masses size mismatch");
    std::vector<Atom> atoms;
    atoms.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
      atoms.push_back({positions[i], std::exp(log_masses[i]), log_masses[i]});
    return sorted(std::move(atoms), window, std::move(tag));
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double window() const { return window_; }
  const std::string& tag() const { return tag_; }

  RealSequence support() const {
    std::vector<double> pts;
    pts.reserve(atoms_.size());
    for (const auto& a : atoms_) pts.push_back(a.position);
    return RealSequence(std::move(pts), window_, tag_);
  }

  std::size_t origin_index() const {
    return static_cast<std::size_t>(
        std::lower_bound(atoms_.begin(), atoms_.end(), 0.0,
                         [](const Atom& a, double x) { return a.position < x; }) -
        atoms_.begin());
  }

  // log of the mass in the index range [lo, hi); -inf when empty.
  double log_mass_range(std::size_t lo, std::size_t hi) const {
    if (lo >= hi) return -std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) mx = std::max(mx, atoms_[i].log_mass);
    CompensatedSum s;
    for (std::size_t i = lo; i < hi; ++i) s.add(std::exp(atoms_[i].log_mass - mx));
    return mx + std::log(s.value());
  }

  std::size_t lower_index(double x) const {
    return static_cast<std::size_t>(
        std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, double v) { return a.position < v; }) -
        atoms_.begin());
  }
  std::size_t upper_index(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(atoms_.begin(), atoms_.end(), x, [](double v, const Atom& a) { return v < a.position; }) -
        atoms_.begin());
  }

  // log mu((a, b]), log mu([a, b]) and log mu((a, b)).
  double log_mass_half_open(double a, double b) const { return log_mass_range(upper_index(a), upper_index(b)); }
  double log_mass_closed(double a, double b) const { return log_mass_range(lower_index(a), upper_index(b)); }
  double log_mass_open(double a, double b) const { return log_mass_range(upper_index(a), lower_index(b)); }

  bool operator==(const DiscreteMeasure& o) const {
    return atoms_ == o.atoms_ && window_ == o.window_ && tag_ == o.tag_;
  }

 private:
  static DiscreteMeasure sorted(std::vector<Atom> atoms, double window, std::string tag) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
    return DiscreteMeasure(std::move(atoms), window, std::move(tag));
  }

  std::vector<Atom> atoms_;
  double window_;
  std::string tag_;
};

/// Piecewise-constant W >= floor >= 1: value[k] on (breakpoint[k], breakpoint[k+1]].
/// Values are held as logarithms so very large weights stay representable.
class WeightTable {
 public:
  WeightTable(std::vector<double> breakpoints, const std::vector<double>& values, double floor = 1.0)
      : WeightTable(std::move(breakpoints), logs_of(values), floor, 0) {}

  static WeightTable from_log(std::vector<double> breakpoints, std::vector<double> log_values, double floor = 1.0) {
    return WeightTable(std::move(breakpoints), std::move(log_values), floor, 0);
  }

  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<double>& log_values() const { return log_values_; }
  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(log_values_.size());
    for (double l : log_values_) v.push_back(std::exp(l));
    return v;
  }
  double floor() const { return floor_; }
  std::size_t size() const { return log_values_.size(); }

  double log_value_at(double x) const {
    if (x <= bp_.front() || x > bp_.back()) return std::log(floor_);
    const auto it = std::lower_bound(bp_.begin(), bp_.end(), x);
    return log_values_[static_cast<std::size_t>(it - bp_.begin()) - 1];
  }
  double value_at(double x) const { return std::exp(log_value_at(x)); }

  // Shape check for a mu-weight: min over the outer 10% of the span >= min over the inner 10%.
  bool grows_outward() const {
    const double ext = std::max(std::abs(bp_.front()), std::abs(bp_.back()));
    double inner = std::numeric_limits<double>::infinity(), outer = inner;
    for (std::size_t k = 0; k < log_values_.size(); ++k) {
      const double c = 0.5 * (bp_[k] + bp_[k + 1]);
      if (std::abs(c) <= 0.1 * ext) inner = std::min(inner, log_values_[k]);
      if (std::abs(c) >= 0.9 * ext) outer = std::min(outer, log_values_[k]);
    }
    if (!std::isfinite(inner) || !std::isfinite(outer)) return true;
    return outer >= inner;
  }

  bool operator==(const WeightTable&) const = default;

 private:
  WeightTable(std::vector<double> breakpoints, std::vector<double> log_values, double floor, int)
      : bp_(std::move(breakpoints)), log_values_(std::move(log_values)), floor_(floor) {
    require(floor_ >= 1.0, ErrorCode::WeightBelowOne, "floor must be >= 1");
    require(bp_.size() >= 2 && log_values_.size() + 1 == bp_.size(), ErrorCode::InvalidArgument,
            "need n+1 breakpoints for n values");
    for (std::size_t i = 1; i < bp_.size(); ++i)
      require(bp_[i] > bp_[i - 1], ErrorCode::InvalidArgument, "breakpoints not strictly increasing");
    for (double v : log_values_) {
      require(!std::isnan(v) && v < std::numeric_limits<double>::infinity(), ErrorCode::InvalidArgument,
              "weight must be finite");
      require(v >= 0.0, ErrorCode::WeightBelowOne, "weight value below 1");
    }
  }

  static std::vector<double> logs_of(const std::vector<double>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
      require(v >= 1.0, ErrorCode::WeightBelowOne, "weight value below 1");
      out.push_back(std::log(v));
    }
    return out;
  }

  std::vector<double> bp_;
  std::vector<double> log_values_;
  double floor_;
};

enum class Classification { Convergent, Divergent, Inconclusive };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Convergent: return "convergent";
    case Classification::Divergent: return "divergent";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct ShellSum {
  int index = 0;
  double sum = 0.0;
  std::size_t terms = 0;
  bool partial = false;  // shell not fully inside the coverage window
};

struct SumVerdict {
  double value_truncated = 0.0;
  double inner_remainder = 0.0;  // terms with |location| < 1
  std::vector<ShellSum> shells;
  Classification classification = Classification::Inconclusive;
  double fit_slope = std::numeric_limits<double>::quiet_NaN();
  double fit_ratio = std::numeric_limits<double>::quiet_NaN();

  bool convergent() const { return classification == Classification::Convergent; }
  bool divergent() const { return classification == Classification::Divergent; }
};

struct ClassifierOptions {
  double convergent_slope = -0.2;
  double divergent_slope = -0.05;
  std::size_t min_shells = 4;
};

/// A nonnegative series term already carrying its weight; location picks the dyadic shell.
struct Contribution {
  double location = 0.0;
  double value = 0.0;
};

inline int shell_of(double location) { return std::ilogb(std::abs(location)); }

// coverage: extent of the truncation window; shells reaching past it are partial.
inline SumVerdict classify_contributions(std::span<const Contribution> terms,
                                         std::optional<double> coverage = std::nullopt,
                                         const ClassifierOptions& opt = {}) {
  SumVerdict v;
  CompensatedSum inner;
  std::vector<std::pair<int, CompensatedSum>> acc;
  std::vector<std::size_t> counts;
  for (const auto& t : terms) {
    require(t.value >= 0.0 && !std::isnan(t.value), ErrorCode::NegativeTerm, "series term must be >= 0");
    require(std::isfinite(t.location), ErrorCode::InvalidArgument, "non-finite location");
    if (std::abs(t.location) < 1.0) {
      inner.add(t.value);
      continue;
    }
    const int j = shell_of(t.location);
    auto it = std::lower_bound(acc.begin(), acc.end(), j, [](const auto& p, int k) { return p.first < k; });
    const auto pos = static_cast<std::size_t>(it - acc.begin());
    if (it == acc.end() || it->first != j) {
      acc.insert(it, {j, CompensatedSum{}});
      counts.insert(counts.begin() + static_cast<std::ptrdiff_t>(pos), 0);
    }
    acc[pos].second.add(t.value);
    ++counts[pos];
  }
  double ext = 0.0;
  if (coverage) {
    ext = *coverage;
  } else {
    for (const auto& t : terms) ext = std::max(ext, std::abs(t.location));
  }
  CompensatedSum total;
  total.add(inner);
  for (std::size_t k = 0; k < acc.size(); ++k) {
    ShellSum s;
    s.index = acc[k].first;
    s.sum = acc[k].second.value();
    s.terms = counts[k];
    s.partial = std::ldexp(1.0, s.index + 1) > ext * (1.0 + 1e-12);
    total.add(acc[k].second);
    v.shells.push_back(s);
  }
  v.inner_remainder = inner.value();
  v.value_truncated = total.value();

  std::vector<const ShellSum*> fit;
  for (const auto& s : v.shells)
    if (!s.partial) fit.push_back(&s);
  if (fit.size() < opt.min_shells) return v;
  const std::size_t m = std::max<std::size_t>(3, (fit.size() + 1) / 2);
  fit.erase(fit.begin(), fit.end() - static_cast<std::ptrdiff_t>(m));

  double min_pos = std::numeric_limits<double>::infinity();
  for (const auto* s : fit)
    if (s->sum > 0) min_pos = std::min(min_pos, s->sum);
  if (!std::isfinite(min_pos)) {
    v.classification = Classification::Convergent;
    v.fit_slope = -std::numeric_limits<double>::infinity();
    v.fit_ratio = 0.0;
    return v;
  }
  const double floor = min_pos * 1e-12;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto* s : fit) {
    const double x = s->index, y = std::log(std::max(s->sum, floor));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(fit.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  v.fit_slope = slope;
  v.fit_ratio = std::exp(slope);
  if (slope <= opt.convergent_slope)
    v.classification = Classification::Convergent;
  else if (slope >= opt.divergent_slope)
    v.classification = Classification::Divergent;
  return v;
}

struct Term {
  double location = 0.0;
  double value = 0.0;
};

/// sum value/(1+location^2) with dyadic-shell classification.
inline SumVerdict poisson_tail_sum(std::span<const Term> terms, std::optional<double> coverage = std::nullopt,
                                   const ClassifierOptions& opt = {}) {
  std::vector<Contribution> c;
  c.reserve(terms.size());
  for (const auto& t : terms) {
    require(t.value >= 0.0 && !std::isnan(t.value), ErrorCode::NegativeTerm, "series term must be >= 0");
    c.push_back({t.location, t.value / (1.0 + t.location * t.location)});
  }
  return classify_contributions(c, coverage, opt);
}

enum class PoissonIndex { Location, Index };

// Terms for a per-point series: location is the point itself or its index n relative to the origin.
inline std::vector<Term> point_terms(const RealSequence& seq, std::span<const double> values,
                                     PoissonIndex mode = PoissonIndex::Location) {
  require(values.size() == seq.size(), ErrorCode::InvalidArgument, "one value per point required");
  std::vector<Term> out;
  out.reserve(seq.size());
  const auto origin = static_cast<std::ptrdiff_t>(seq.origin_index());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const double loc =
        mode == PoissonIndex::Location ? seq[i] : static_cast<double>(static_cast<std::ptrdiff_t>(i) - origin);
    out.push_back({loc, values[i]});
  }
  return out;
}

// Stable atan(b) - atan(a).
inline double atan_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::atan((b - a) / (1.0 + a * b)) + ((1.0 + a * b) < 0.0 ? (b > 0 ? M_PI : -M_PI) : 0.0);
}

// Stable log(1+b^2) - log(1+a^2).
inline double log1p_sq_diff(double a, double b) {
  return std::log1p((b - a) * (b + a) / (1.0 + a * a));
}

// Piece boundaries for exact Poisson integration: [a, b] split at 0 and at +-2^j.
inline void split_dyadic(double a, double b, std::vector<double>& cuts) {
  cuts.clear();
  cuts.push_back(a);
  auto add_side = [&](double lo, double hi, double sign) {
    // lo < hi, both of one sign (or zero); dyadic marks strictly inside
    const double alo = std::min(std::abs(lo), std::abs(hi)), ahi = std::max(std::abs(lo), std::abs(hi));
    std::vector<double> marks;
    double p = 1.0;
    if (alo >= 1.0) p = std::ldexp(1.0, std::ilogb(alo) + 1);
    for (; p < ahi; p *= 2.0)
      if (p > alo) marks.push_back(sign * p);
    if (sign < 0) std::reverse(marks.begin(), marks.end());
    for (double m : marks) cuts.push_back(m);
  };
  if (a < 0.0 && b > 0.0) {
    add_side(a, 0.0, -1.0);
    cuts.push_back(0.0);
    add_side(0.0, b, 1.0);
  } else if (b <= 0.0) {
    add_side(a, b, -1.0);
  } else {
    add_side(a, b, 1.0);
  }
  cuts.push_back(b);
}

}  // namespace typelab
