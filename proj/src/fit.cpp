#include "critlab/fit.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "critlab/error.hpp"

namespace critlab {

Extrapolation extrapolate(std::span<const double> seq) {
  const std::size_t K = seq.size();
  if (K < 4) throw Error(ErrorCode::invalid_argument, "extrapolation needs at least 4 levels");
  const double inf = std::numeric_limits<double>::infinity();
  Extrapolation e;
  for (double s : seq)
    if (!std::isfinite(s)) {
      e.finite = false;
      e.gamma = -inf;
      e.limit = s;
      return e;
    }

  double scale = 0.0;
  for (double s : seq) scale = std::max(scale, std::abs(s));
  std::vector<double> lx, ly;
  for (std::size_t N = K - 3; N < K; ++N) {  // increments s_{N+1} - s_N, N = K-3..K-1
    const double d = std::abs(seq[N] - seq[N - 1]);
    if (d > 1e-15 * scale) {
      lx.push_back(std::log(static_cast<double>(N)));
      ly.push_back(std::log(d));
    }
  }
  if (lx.size() < 2) {
    e.gamma = inf;
    e.limit = seq[K - 1];
    return e;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  e.gamma = -slope - 1.0;
  if (e.gamma <= 0.0) {
    e.finite = false;
    e.limit = seq[K - 1] < seq[K - 2] ? -inf : inf;
    return e;
  }

  // least squares for [1, N^-gamma] over N = K-2..K
  double a11 = 0.0, a12 = 0.0, a22 = 0.0, r1 = 0.0, r2 = 0.0;
  for (std::size_t N = K - 2; N <= K; ++N) {
    const double x = std::pow(static_cast<double>(N), -e.gamma);
    const double y = seq[N - 1];
    a11 += 1.0;
    a12 += x;
    a22 += x * x;
    r1 += y;
    r2 += x * y;
  }
  const double det = a11 * a22 - a12 * a12;
  e.limit = (a22 * r1 - a12 * r2) / det;
  e.c = (a11 * r2 - a12 * r1) / det;
  double ss = 0.0;
  for (std::size_t N = K - 2; N <= K; ++N) {
    const double f = e.limit + e.c * std::pow(static_cast<double>(N), -e.gamma);
    ss += (f - seq[N - 1]) * (f - seq[N - 1]);
  }
  e.residual = std::sqrt(ss / 3.0);
  return e;
}

Extrapolation terminal_value(std::span<const double> seq) {
  if (seq.empty()) throw Error(ErrorCode::invalid_argument, "empty level sequence");
  Extrapolation e;
  e.terminal = true;
  e.limit = seq.back();
  e.finite = std::isfinite(e.limit);
  e.gamma = std::numeric_limits<double>::infinity();
  return e;
}

}  // namespace critlab
