#pragma once
// Summation and test statistics used by the estimators and checks.
#include <cstddef>
#include <functional>
#include <vector>

namespace skewflow {

// Kahan-compensated accumulator; reductions over paths use this in fixed
// index order so summaries are bit-identical across runs and worker counts.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;     // unbiased sample variance
  double stderr_ = 0.0; // sqrt(var/n)
  size_t n = 0;
};

MeanVar mean_var(const std::vector<double>& xs);

// Streaming mean/variance (Welford) for single-pass Monte Carlo reductions.
class Welford {
 public:
  void add(double x) {
    ++n_;
    const double d = x - m_;
    m_ += d / double(n_);
    s_ += d * (x - m_);
  }
  size_t count() const { return n_; }
  double mean() const { return m_; }
  double variance() const { return n_ > 1 ? s_ / double(n_ - 1) : 0.0; }
  double stderror() const;

 private:
  size_t n_ = 0;
  double m_ = 0.0, s_ = 0.0;
};

double normal_cdf(double z);

// regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// chi-square upper tail P(X > x) with k degrees of freedom
double chi2_sf(double x, double k);

struct ChiSquareResult {
  double statistic = 0.0;
  size_t dof = 0;
  double p_value = 1.0;
};
// counts vs expected probabilities (sum to 1); expected count = n*p
ChiSquareResult chi_square_test(const std::vector<size_t>& counts,
                                const std::vector<double>& probs);

struct KsResult {
  double statistic = 0.0;  // sup |F_n - F|
  double p_value = 1.0;    // asymptotic Kolmogorov tail
};
// samples need not be sorted; cdf is the hypothesized distribution
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace skewflow
