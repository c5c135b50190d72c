#include "skewflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skewflow {

MeanVar mean_var(const std::vector<double>& xs) {
  MeanVar mv;
  mv.n = xs.size();
  if (mv.n == 0) return mv;
  KahanSum s;
  for (double x : xs) s.add(x);
  mv.mean = s.value() / double(mv.n);
  if (mv.n > 1) {
    KahanSum q;
    for (double x : xs) q.add((x - mv.mean) * (x - mv.mean));
    mv.var = q.value() / double(mv.n - 1);
    mv.stderr_ = std::sqrt(mv.var / double(mv.n));
  }
  return mv;
}

double Welford::stderror() const {
  return n_ > 1 ? std::sqrt(variance() / double(n_)) : 0.0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

// Series and continued-fraction forms of the regularized incomplete gamma.
static double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

static double gamma_q_cf(double a, double x) {
  const double eps = 1e-15, fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(double x, double k) { return gamma_q(0.5 * k, 0.5 * x); }

ChiSquareResult chi_square_test(const std::vector<size_t>& counts,
                                const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.empty())
    throw std::invalid_argument("chi_square_test: size mismatch");
  size_t n = 0;
  for (size_t c : counts) n += c;
  ChiSquareResult r;
  r.dof = counts.size() - 1;
  KahanSum s;
  for (size_t i = 0; i < counts.size(); ++i) {
    const double e = double(n) * probs[i];
    if (e <= 0.0) throw std::invalid_argument("chi_square_test: zero expected count");
    const double d = double(counts[i]) - e;
    s.add(d * d / e);
  }
  r.statistic = s.value();
  r.p_value = chi2_sf(r.statistic, double(r.dof));
  return r;
}

static double kolmogorov_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs(double(i + 1) / n - f));
    d = std::max(d, std::fabs(f - double(i) / n));
  }
  KsResult r;
  r.statistic = d;
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 points");
  const double n = double(x.size());
  KahanSum sx, sy, sxx, sxy, syy;
  for (size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
    sxx.add(x[i] * x[i]);
    sxy.add(x[i] * y[i]);
    syy.add(y[i] * y[i]);
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  const double cov = sxy.value() / n - mx * my;
  const double vx = sxx.value() / n - mx * mx;
  const double vy = syy.value() / n - my * my;
  LineFit f;
  f.slope = cov / vx;
  f.intercept = my - f.slope * mx;
  f.r2 = (vy > 0.0) ? (cov * cov) / (vx * vy) : 1.0;
  return f;
}

}  // namespace skewflow
