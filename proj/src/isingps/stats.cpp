#include "isingps/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isingps/errors.hpp"

namespace isingps {

void RunningStats::push(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("RunningStats: non-finite value");
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double nt = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * (nb / nt);
  m2_ += other.m2_ + delta * delta * (na * nb / nt);
  n_ += other.n_;
}

double RunningStats::mean() const {
  if (n_ < 1) throw std::logic_error("RunningStats: empty");
  return mean_;
}

double RunningStats::variance() const {
  if (n_ < 2) throw std::logic_error("RunningStats: need >= 2 values for variance");
  return m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::stddev() const { return std::sqrt(std::max(0.0, variance())); }

double RunningStats::stderr_of_mean() const {
  return stddev() / std::sqrt(static_cast<double>(n_));
}

void BivariateStats::push(double num, double den) {
  if (!std::isfinite(num) || !std::isfinite(den))
    throw std::invalid_argument("BivariateStats: non-finite value");
  ++n_;
  const double inv_n = 1.0 / static_cast<double>(n_);
  const double dn = num - mean_n_;
  const double dd = den - mean_d_;
  mean_n_ += dn * inv_n;
  mean_d_ += dd * inv_n;
  m2_n_ += dn * (num - mean_n_);
  m2_d_ += dd * (den - mean_d_);
  c2_ += dn * (den - mean_d_);
}

void BivariateStats::merge(const BivariateStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double nt = na + nb;
  const double dn = other.mean_n_ - mean_n_;
  const double dd = other.mean_d_ - mean_d_;
  mean_n_ += dn * (nb / nt);
  mean_d_ += dd * (nb / nt);
  m2_n_ += other.m2_n_ + dn * dn * (na * nb / nt);
  m2_d_ += other.m2_d_ + dd * dd * (na * nb / nt);
  c2_ += other.c2_ + dn * dd * (na * nb / nt);
  n_ += other.n_;
}

double BivariateStats::mean_num() const {
  if (n_ < 1) throw std::logic_error("BivariateStats: empty");
  return mean_n_;
}

double BivariateStats::mean_den() const {
  if (n_ < 1) throw std::logic_error("BivariateStats: empty");
  return mean_d_;
}

double BivariateStats::variance_num() const {
  if (n_ < 2) throw std::logic_error("BivariateStats: need >= 2 values");
  return m2_n_ / static_cast<double>(n_ - 1);
}

double BivariateStats::variance_den() const {
  if (n_ < 2) throw std::logic_error("BivariateStats: need >= 2 values");
  return m2_d_ / static_cast<double>(n_ - 1);
}

double BivariateStats::covariance() const {
  if (n_ < 2) throw std::logic_error("BivariateStats: need >= 2 values");
  return c2_ / static_cast<double>(n_ - 1);
}

Estimate ratio_estimate(const BivariateStats& acc) {
  if (acc.count() < 2) throw std::logic_error("ratio_estimate: need >= 2 samples");
  const double n = static_cast<double>(acc.count());
  const double dbar = acc.mean_den();
  const double var_d = acc.variance_den();
  // Scale of the denominator stream; a mean 12 orders below it is zero at
  // double precision.
  const double rms_d = std::sqrt(std::max(0.0, var_d * (n - 1.0) / n + dbar * dbar));
  if (dbar == 0.0 || std::abs(dbar) < 1e-12 * rms_d)
    throw DegenerateRatioError("ratio_estimate: denominator mean indistinguishable from zero");

  const double r = acc.mean_num() / dbar;
  const double var_n = acc.variance_num();
  const double cov = acc.covariance();
  const double se2 = (var_n - 2.0 * r * cov + r * r * var_d) / (n * dbar * dbar);
  return {r, std::sqrt(std::max(0.0, se2))};
}

LogWeightMoments::LogWeightMoments(int channels)
    : s_aw_(static_cast<std::size_t>(channels), 0.0),
      s_a2w2_(static_cast<std::size_t>(channels), 0.0),
      s_aw2_(static_cast<std::size_t>(channels), 0.0) {
  if (channels < 0) throw std::invalid_argument("LogWeightMoments: channels < 0");
}

void LogWeightMoments::rescale_to(double new_log_max) {
  if (n_ > 0 && new_log_max != log_max_) {
    const double f = std::exp(log_max_ - new_log_max);
    const double f2 = f * f;
    s_w_ *= f;
    s_ww_ *= f2;
    for (auto& v : s_aw_) v *= f;
    for (auto& v : s_a2w2_) v *= f2;
    for (auto& v : s_aw2_) v *= f2;
  }
  log_max_ = new_log_max;
}

void LogWeightMoments::push(double log_w, std::span<const double> channel_values) {
  if (!std::isfinite(log_w)) throw std::invalid_argument("LogWeightMoments: non-finite log weight");
  if (channel_values.size() != s_aw_.size())
    throw std::invalid_argument("LogWeightMoments: channel count mismatch");
  if (n_ == 0 || log_w > log_max_) rescale_to(log_w);
  const double u = std::exp(log_w - log_max_);
  const double uu = u * u;
  ++n_;
  s_w_ += u;
  s_ww_ += uu;
  for (std::size_t k = 0; k < s_aw_.size(); ++k) {
    const double a = channel_values[k];
    s_aw_[k] += a * u;
    s_a2w2_[k] += a * a * uu;
    s_aw2_[k] += a * uu;
  }
}

void LogWeightMoments::merge(const LogWeightMoments& other) {
  if (other.s_aw_.size() != s_aw_.size())
    throw std::invalid_argument("LogWeightMoments: channel count mismatch");
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double common = std::max(log_max_, other.log_max_);
  rescale_to(common);
  LogWeightMoments tmp = other;
  tmp.rescale_to(common);
  n_ += tmp.n_;
  s_w_ += tmp.s_w_;
  s_ww_ += tmp.s_ww_;
  for (std::size_t k = 0; k < s_aw_.size(); ++k) {
    s_aw_[k] += tmp.s_aw_[k];
    s_a2w2_[k] += tmp.s_a2w2_[k];
    s_aw2_[k] += tmp.s_aw2_[k];
  }
}

double LogWeightMoments::log_mean_weight() const {
  if (n_ < 1) throw std::logic_error("LogWeightMoments: empty");
  return log_max_ + std::log(s_w_ / static_cast<double>(n_));
}

Estimate LogWeightMoments::log_mean_weight_estimate() const {
  const double value = log_mean_weight();
  if (n_ < 2) return {value, 0.0};
  const double n = static_cast<double>(n_);
  const double ubar = s_w_ / n;
  const double var_u = std::max(0.0, (s_ww_ - s_w_ * s_w_ / n) / (n - 1.0));
  // stderr of log(mean w) = stderr(mean w) / mean w; the exp(log_max) scale
  // cancels in the ratio.
  const double err = std::sqrt(var_u / n) / ubar;
  return {value, err};
}

Estimate LogWeightMoments::channel_ratio(int k) const {
  if (k < 0 || k >= channels()) throw std::out_of_range("LogWeightMoments: channel index");
  if (n_ < 2) throw std::logic_error("LogWeightMoments: need >= 2 samples");
  const double n = static_cast<double>(n_);
  const double sw = s_w_;
  const double sa = s_aw_[static_cast<std::size_t>(k)];
  const double r = sa / sw;
  const double dbar = sw / n;
  const double var_d = std::max(0.0, (s_ww_ - sw * sw / n) / (n - 1.0));
  const double var_n =
      std::max(0.0, (s_a2w2_[static_cast<std::size_t>(k)] - sa * sa / n) / (n - 1.0));
  const double cov = (s_aw2_[static_cast<std::size_t>(k)] - sa * sw / n) / (n - 1.0);
  const double se2 = (var_n - 2.0 * r * cov + r * r * var_d) / (n * dbar * dbar);
  return {r, std::sqrt(std::max(0.0, se2))};
}

Histogram::Histogram(double lo, double hi, int bins) : lo_(lo), hi_(hi) {
  if (!(hi > lo) || bins < 1) throw std::invalid_argument("Histogram: bad range or bin count");
  width_ = (hi - lo) / bins;
  counts_.assign(static_cast<std::size_t>(bins), 0);
}

void Histogram::add(double x) {
  if (x < lo_) {
    ++underflow_;
    return;
  }
  if (x >= hi_) {
    ++overflow_;
    return;
  }
  auto b = static_cast<std::size_t>((x - lo_) / width_);
  if (b >= counts_.size()) b = counts_.size() - 1;  // x just below hi after rounding
  ++counts_[b];
}

void Histogram::merge(const Histogram& other) {
  if (other.counts_.size() != counts_.size() || other.lo_ != lo_ || other.hi_ != hi_)
    throw std::invalid_argument("Histogram: incompatible merge");
  for (std::size_t b = 0; b < counts_.size(); ++b) counts_[b] += other.counts_[b];
  underflow_ += other.underflow_;
  overflow_ += other.overflow_;
}

std::int64_t Histogram::total() const {
  std::int64_t t = underflow_ + overflow_;
  for (auto c : counts_) t += c;
  return t;
}

namespace {

// Simpson rule over [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: domain");
  if (x == 0.0) return 1.0;
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // Series for P(a, x), then Q = 1 - P.
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(log_prefactor);
  }
  // Lentz continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(log_prefactor) * h;
}

double chi_square_p_value(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_p_value: dof < 1");
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_fit(const Histogram& hist,
                               const std::function<double(double)>& density,
                               double min_expected) {
  const std::int64_t total = hist.total();
  if (total == 0) throw std::invalid_argument("chi_square_fit: empty histogram");

  const int nb = hist.bins();
  std::vector<double> mass(static_cast<std::size_t>(nb));
  double mass_total = 0.0;
  for (int b = 0; b < nb; ++b) {
    mass[static_cast<std::size_t>(b)] = simpson(density, hist.bin_lo(b), hist.bin_hi(b), 16);
    if (!(mass[static_cast<std::size_t>(b)] >= 0.0))
      throw std::invalid_argument("chi_square_fit: density must be non-negative");
    mass_total += mass[static_cast<std::size_t>(b)];
  }
  if (!(mass_total > 0.0)) throw std::invalid_argument("chi_square_fit: density integrates to zero");

  std::vector<double> observed(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) observed[static_cast<std::size_t>(b)] = static_cast<double>(hist.count(b));
  observed.front() += static_cast<double>(hist.underflow());
  observed.back() += static_cast<double>(hist.overflow());

  // Pool bins left-to-right until each pooled bin carries enough expectation.
  std::vector<double> pooled_obs, pooled_exp;
  double acc_o = 0.0, acc_e = 0.0;
  for (int b = 0; b < nb; ++b) {
    acc_o += observed[static_cast<std::size_t>(b)];
    acc_e += static_cast<double>(total) * mass[static_cast<std::size_t>(b)] / mass_total;
    if (acc_e >= min_expected) {
      pooled_obs.push_back(acc_o);
      pooled_exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (pooled_obs.empty()) {
      pooled_obs.push_back(acc_o);
      pooled_exp.push_back(acc_e);
    } else {
      pooled_obs.back() += acc_o;
      pooled_exp.back() += acc_e;
    }
  }
  if (pooled_obs.size() < 2)
    throw std::invalid_argument("chi_square_fit: fewer than two bins after pooling");

  double chi2 = 0.0;
  for (std::size_t b = 0; b < pooled_obs.size(); ++b) {
    const double d = pooled_obs[b] - pooled_exp[b];
    chi2 += d * d / pooled_exp[b];
  }
  const int dof = static_cast<int>(pooled_obs.size()) - 1;
  return {chi2, dof, chi_square_p_value(chi2, dof)};
}

}  // namespace isingps
