#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace isingps {

struct Estimate {
  double value = 0.0;
  double err = 0.0;  // standard error of `value`
};

// Single-pass mean/variance accumulator (Welford recurrence). merge() combines
// two accumulators so that workers can reduce independent partial streams.
class RunningStats {
 public:
  void push(double x);
  void merge(const RunningStats& other);

  std::int64_t count() const { return n_; }
  double mean() const;
  double variance() const;  // sample variance (n-1 denominator)
  double stddev() const;
  double stderr_of_mean() const;
  Estimate estimate() const { return {mean(), stderr_of_mean()}; }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Joint accumulator for (numerator, denominator) value pairs; tracks the
// cross moment needed for ratio error propagation.
class BivariateStats {
 public:
  void push(double num, double den);
  void merge(const BivariateStats& other);

  std::int64_t count() const { return n_; }
  double mean_num() const;
  double mean_den() const;
  double variance_num() const;
  double variance_den() const;
  double covariance() const;

 private:
  std::int64_t n_ = 0;
  double mean_n_ = 0.0, mean_d_ = 0.0;
  double m2_n_ = 0.0, m2_d_ = 0.0, c2_ = 0.0;
};

// Delta-method estimate of <num>/<den> with standard error
//   se^2 = (var_n - 2 r cov + r^2 var_d) / (n * mean_d^2).
// Throws DegenerateRatioError when the denominator mean is indistinguishable
// from zero at working precision.
Estimate ratio_estimate(const BivariateStats& acc);

// Log-domain moment accumulator for weights w = exp(log_w) together with
// per-channel weighted values a_k * w. A running maximum keeps every stored
// sum in [0, n], so arbitrarily large log-weights never overflow. merge() is
// exact (both sides are rescaled to the common maximum), which lets samplers
// reduce fixed-size chunks in a deterministic order.
class LogWeightMoments {
 public:
  explicit LogWeightMoments(int channels = 0);

  void push(double log_w, std::span<const double> channel_values = {});
  void merge(const LogWeightMoments& other);

  std::int64_t count() const { return n_; }
  int channels() const { return static_cast<int>(s_aw_.size()); }

  double log_mean_weight() const;            // log( (1/n) sum w )
  Estimate log_mean_weight_estimate() const; // with stderr of the log mean
  Estimate channel_ratio(int k) const;       // <a_k w>/<w>, delta-method error

 private:
  void rescale_to(double new_log_max);

  std::int64_t n_ = 0;
  double log_max_ = 0.0;
  double s_w_ = 0.0;    // sum u,   u = exp(log_w - log_max)
  double s_ww_ = 0.0;   // sum u^2
  std::vector<double> s_aw_;    // sum a u
  std::vector<double> s_a2w2_;  // sum a^2 u^2
  std::vector<double> s_aw2_;   // sum a u^2
};

// Fixed-range uniform-bin histogram; out-of-range samples are tracked in
// underflow/overflow counters.
class Histogram {
 public:
  Histogram(double lo, double hi, int bins);

  void add(double x);
  void merge(const Histogram& other);

  int bins() const { return static_cast<int>(counts_.size()); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double bin_lo(int b) const { return lo_ + width_ * b; }
  double bin_hi(int b) const { return lo_ + width_ * (b + 1); }
  std::int64_t count(int b) const { return counts_[b]; }
  std::int64_t underflow() const { return underflow_; }
  std::int64_t overflow() const { return overflow_; }
  std::int64_t total() const;

 private:
  double lo_, hi_, width_;
  std::vector<std::int64_t> counts_;
  std::int64_t underflow_ = 0;
  std::int64_t overflow_ = 0;
};

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

// Pearson chi^2 of a histogram against an unnormalized density on [lo, hi].
// Expected masses come from per-bin Simpson quadrature, normalized over the
// histogram range; bins are pooled left-to-right until each pooled bin has at
// least `min_expected` expected counts. Underflow/overflow counts fold into
// the edge bins. dof = pooled bins - 1 (no fitted parameters).
ChiSquareResult chi_square_fit(const Histogram& hist,
                               const std::function<double(double)>& density,
                               double min_expected = 10.0);

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// P(X >= statistic) for a chi^2 variable with `dof` degrees of freedom.
double chi_square_p_value(double statistic, int dof);

}  // namespace isingps
