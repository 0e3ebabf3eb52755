// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "spherclt/errors.hpp"

namespace spherclt {
namespace {

// 15-point Kronrod rule on [-1, 1]; the 7 Gauss nodes are the odd-indexed
// abscissae. Standard QUADPACK dqk15 constants.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double value;
  double error;
  double resabs;
};

struct Panel {
  double error;
  double value;
  double lo;
  double hi;
  bool operator<(const Panel& other) const { return error < other.error; }
};

PanelResult kronrod15(const std::function<double(double)>& f, double lo,
                      double hi, long& evaluations) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  double fv[15];
  const double fc = f(center);
  evaluations += 15;
  fv[7] = fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    fv[i] = f(center - dx);
    fv[14 - i] = f(center + dx);
  }
  for (int i = 0; i < 15; ++i) {
    if (!std::isfinite(fv[i])) {
      throw DomainError("integrate: non-finite integrand value");
    }
  }

  double resk = kWgk[7] * fc;
  double resabs = std::abs(resk);
  for (int i = 0; i < 7; ++i) {
    resk += kWgk[i] * (fv[i] + fv[14 - i]);
    resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  }
  double resg = kWg[3] * fc;
  for (int i = 0; i < 3; ++i) {
    resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  }

  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int i = 0; i < 7; ++i) {
    resasc +=
        kWgk[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
  }

  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  return {value, err, resabs};
}

QuadratureResult adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double tol,
                          const QuadratureOptions& options) {
  long evaluations = 0;
  std::priority_queue<Panel> queue;
  const PanelResult first = kronrod15(f, lo, hi, evaluations);
  queue.push({first.error, first.value, lo, hi});
  double total_value = first.value;
  double total_error = first.error;
  int intervals = 1;

  while (total_error > tol && intervals < options.max_intervals) {
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval at floating-point resolution; cannot refine further.
      queue.push({0.0, worst.value, worst.lo, worst.hi});
      total_error -= worst.error;
      continue;
    }
    const PanelResult left = kronrod15(f, worst.lo, mid, evaluations);
    const PanelResult right = kronrod15(f, mid, worst.hi, evaluations);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push({left.error, left.value, worst.lo, mid});
    queue.push({right.error, right.value, mid, worst.hi});
    ++intervals;
  }

  if (total_error > tol) {
    throw ConvergenceFailure("integrate: interval budget exhausted",
                             total_value, total_error);
  }
  return {total_value, total_error, evaluations};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, double tol,
                           const QuadratureOptions& options) {
  if (!(tol > 0.0)) {
    throw InvalidInput("integrate: tol must be positive");
  }
  if (std::isnan(lo) || std::isnan(hi) || std::isinf(lo)) {
    throw InvalidInput("integrate: bad interval");
  }
  if (std::isinf(hi)) {
    // s = lo - log(u) maps (0, 1] onto [lo, +inf); ds = -du/u.
    auto mapped = [&f, lo](double u) { return f(lo - std::log(u)) / u; };
    return adaptive(mapped, 0.0, 1.0, tol, options);
  }
  if (!(lo < hi)) {
    if (lo == hi) return {0.0, 0.0, 0};
    throw InvalidInput("integrate: lo must not exceed hi");
  }
  return adaptive(f, lo, hi, tol, options);
}

}  // namespace spherclt
