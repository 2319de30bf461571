// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file dfo.hpp
 * @brief Deterministic derivative-free minimizers for circuit parameters.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ssvqd/error.hpp"

namespace ssvqd {

using Objective = std::function<double(std::span<const double>)>;

enum class ThetaMethod { simplex, sinusoidal, bfgs };

inline ThetaMethod parse_theta_method(const std::string& name) {
  if (name == "simplex" || name == "nelder-mead") return ThetaMethod::simplex;
  if (name == "sinusoidal" || name == "coordinate") return ThetaMethod::sinusoidal;
  if (name == "bfgs" || name == "quasi-newton") return ThetaMethod::bfgs;
  throw ConfigError("unknown theta optimizer '" + name + "' (expected simplex, sinusoidal or bfgs)");
}

inline std::string to_string(ThetaMethod m) {
  switch (m) {
    case ThetaMethod::simplex: return "simplex";
    case ThetaMethod::sinusoidal: return "sinusoidal";
    case ThetaMethod::bfgs: return "bfgs";
  }
  return "unknown";
}

struct MinimizeOptions {
  int max_evaluations = 2000;  ///< per start
  double ftol = 1e-10;         ///< stop once a restart, sweep or step improves by less than this
  double initial_step = 0.1;   ///< simplex edge length
  double fd_step = 1e-5;       ///< central-difference step of the quasi-Newton method
  int restarts = 0;            ///< extra starts drawn uniformly from [-pi, pi)^n
  std::uint64_t seed = 0;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool budget_exhausted = false;
  std::vector<double> history;  ///< best value after each accepted iteration
};

namespace detail {

class CountedObjective {
 public:
  CountedObjective(const Objective& f, int budget) : f_(f), budget_(budget) {}
  double operator()(std::span<const double> x) {
    ++count_;
    return f_(x);
  }
  int count() const noexcept { return count_; }
  int remaining() const noexcept { return budget_ - count_; }

 private:
  const Objective& f_;
  int budget_;
  int count_ = 0;
};

}  // namespace detail

/**
 * Nelder-Mead with dimension-adapted coefficients (reflection 1, expansion
 * 1 + 2/n, contraction 3/4 - 1/(2n), shrink 1 - 1/n). When the simplex
 * collapses it is rebuilt around the best vertex; the run stops once a
 * rebuild gains less than ftol or the budget is spent.
 */
inline MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0, const MinimizeOptions& opt = {}) {
  const std::size_t n = x0.size();
  detail::CountedObjective fc(f, opt.max_evaluations);
  MinimizeResult res;
  res.x = x0;
  if (n == 0 || opt.max_evaluations < 1) {
    res.value = fc(x0);
    res.evaluations = fc.count();
    return res;
  }
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 0.5 / dn;
  const double delta = n > 1 ? 1.0 - 1.0 / dn : 0.5;

  std::vector<std::vector<double>> simplex(n + 1);
  std::vector<double> fv(n + 1);
  double best_before_restart = std::numeric_limits<double>::infinity();
  std::vector<double> start = x0;
  res.value = fc(start);
  res.x = start;
  res.history.push_back(res.value);

  auto record = [&](const std::vector<double>& x, double v) {
    if (v < res.value) {
      res.value = v;
      res.x = x;
    }
  };

  while (fc.remaining() > 0) {
    simplex[0] = res.x;
    fv[0] = res.value;
    best_before_restart = res.value;
    for (std::size_t i = 0; i < n && fc.remaining() > 0; ++i) {
      simplex[i + 1] = res.x;
      simplex[i + 1][i] += opt.initial_step;
      fv[i + 1] = fc(simplex[i + 1]);
    }
    if (fc.remaining() <= 0) {
      for (std::size_t i = 0; i <= n; ++i) record(simplex[i], fv[i]);
      break;
    }
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (fc.remaining() > 0) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      {
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
          s2[i] = std::move(simplex[order[i]]);
          f2[i] = fv[order[i]];
        }
        simplex.swap(s2);
        fv.swap(f2);
      }
      record(simplex[0], fv[0]);
      res.history.push_back(res.value);

      double size = 0.0;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t d = 0; d < n; ++d) size = std::max(size, std::abs(simplex[i][d] - simplex[0][d]));
      if (fv[n] - fv[0] <= opt.ftol * 0.1 && size < 1e-6) break;
      if (size < 1e-10) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / dn;
      for (std::size_t d = 0; d < n; ++d) xr[d] = centroid[d] + alpha * (centroid[d] - simplex[n][d]);
      const double fr = fc(xr);
      if (fr < fv[0]) {
        if (fc.remaining() <= 0) {
          simplex[n] = xr;
          fv[n] = fr;
          break;
        }
        for (std::size_t d = 0; d < n; ++d) xe[d] = centroid[d] + beta * (xr[d] - centroid[d]);
        const double fe = fc(xe);
        if (fe < fr) {
          simplex[n] = xe;
          fv[n] = fe;
        } else {
          simplex[n] = xr;
          fv[n] = fr;
        }
        continue;
      }
      if (fr < fv[n - 1]) {
        simplex[n] = xr;
        fv[n] = fr;
        continue;
      }
      if (fc.remaining() <= 0) break;
      const bool outside = fr < fv[n];
      for (std::size_t d = 0; d < n; ++d)
        xc[d] = outside ? centroid[d] + gamma * (xr[d] - centroid[d]) : centroid[d] + gamma * (simplex[n][d] - centroid[d]);
      const double fcv = fc(xc);
      if (fcv < std::min(fr, fv[n])) {
        simplex[n] = xc;
        fv[n] = fcv;
        continue;
      }
      for (std::size_t i = 1; i <= n && fc.remaining() > 0; ++i) {
        for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[0][d] + delta * (simplex[i][d] - simplex[0][d]);
        fv[i] = fc(simplex[i]);
      }
    }
    for (std::size_t i = 0; i <= n; ++i) record(simplex[i], fv[i]);
    if (res.history.back() != res.value) res.history.push_back(res.value);
    if (best_before_restart - res.value < opt.ftol) break;
  }
  res.evaluations = fc.count();
  res.budget_exhausted = fc.remaining() <= 0;
  return res;
}

/// Coefficients of c0 + c1 cos t + s1 sin t + c2 cos 2t + s2 sin 2t.
struct TrigQuadratic {
  double c0 = 0, c1 = 0, s1 = 0, c2 = 0, s2 = 0;

  double operator()(double t) const {
    return c0 + c1 * std::cos(t) + s1 * std::sin(t) + c2 * std::cos(2 * t) + s2 * std::sin(2 * t);
  }

  /// Exact interpolation from samples at t_k = 2 pi k / 5, k = 0..4.
  static TrigQuadratic fit(const std::array<double, 5>& f) {
    TrigQuadratic q;
    for (int k = 0; k < 5; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 5.0;
      q.c0 += f[static_cast<std::size_t>(k)] / 5.0;
      q.c1 += 0.4 * f[static_cast<std::size_t>(k)] * std::cos(t);
      q.s1 += 0.4 * f[static_cast<std::size_t>(k)] * std::sin(t);
      q.c2 += 0.4 * f[static_cast<std::size_t>(k)] * std::cos(2 * t);
      q.s2 += 0.4 * f[static_cast<std::size_t>(k)] * std::sin(2 * t);
    }
    return q;
  }

  /// Global minimizer on (-pi, pi] by a grid scan refined with Newton steps.
  double argmin() const {
    constexpr int kGrid = 256;
    double best_t = 0.0;
    double best_v = (*this)(0.0);
    for (int g = 1; g < kGrid; ++g) {
      const double t = -std::numbers::pi + 2.0 * std::numbers::pi * g / kGrid;
      const double v = (*this)(t);
      if (v < best_v) {
        best_v = v;
        best_t = t;
      }
    }
    double t = best_t;
    for (int it = 0; it < 30; ++it) {
      const double d1 = -c1 * std::sin(t) + s1 * std::cos(t) - 2 * c2 * std::sin(2 * t) + 2 * s2 * std::cos(2 * t);
      const double d2 = -c1 * std::cos(t) - s1 * std::sin(t) - 4 * c2 * std::cos(2 * t) - 4 * s2 * std::sin(2 * t);
      if (d2 <= 0) break;
      const double step = d1 / d2;
      t -= step;
      if (std::abs(step) < 1e-14) break;
    }
    return (*this)(t) <= best_v ? t : best_t;
  }
};

/**
 * Sequential coordinate minimization for objectives that are a trigonometric
 * polynomial of degree two in every single parameter (expectation values and
 * squared overlaps of a product of plane-rotation factors). Each coordinate
 * update spends four samples plus one confirmation; a move is accepted only
 * if the confirmed value is lower, so the accepted sequence is monotone.
 */
inline MinimizeResult sequential_sinusoidal(const Objective& f, std::vector<double> x0, const MinimizeOptions& opt = {}) {
  detail::CountedObjective fc(f, opt.max_evaluations);
  MinimizeResult res;
  res.x = std::move(x0);
  res.value = fc(res.x);
  res.history.push_back(res.value);
  const std::size_t n = res.x.size();
  if (n == 0) {
    res.evaluations = fc.count();
    return res;
  }
  bool exhausted = false;
  while (!exhausted) {
    const double sweep_start = res.value;
    for (std::size_t i = 0; i < n; ++i) {
      if (fc.remaining() < 5) {
        exhausted = true;
        break;
      }
      const double xi = res.x[i];
      std::array<double, 5> samples{};
      samples[0] = res.value;
      std::vector<double> trial = res.x;
      for (int k = 1; k < 5; ++k) {
        trial[i] = xi + 2.0 * std::numbers::pi * k / 5.0;
        samples[static_cast<std::size_t>(k)] = fc(trial);
      }
      const TrigQuadratic q = TrigQuadratic::fit(samples);
      double t = q.argmin();
      trial[i] = std::remainder(xi + t, 2.0 * std::numbers::pi);
      const double v = fc(trial);
      if (v < res.value) {
        res.value = v;
        res.x = trial;
        res.history.push_back(v);
      }
    }
    if (sweep_start - res.value < opt.ftol) break;
  }
  res.evaluations = fc.count();
  res.budget_exhausted = exhausted;
  return res;
}

/**
 * BFGS on central-difference gradients with Armijo backtracking. Uses only
 * objective values; each gradient costs 2n evaluations.
 */
inline MinimizeResult quasi_newton(const Objective& f, std::vector<double> x0, const MinimizeOptions& opt = {}) {
  detail::CountedObjective fc(f, opt.max_evaluations);
  const Eigen::Index n = static_cast<Eigen::Index>(x0.size());
  MinimizeResult res;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  auto eval = [&](const Eigen::VectorXd& y) { return fc(std::span<const double>(y.data(), static_cast<std::size_t>(y.size()))); };
  auto gradient = [&](Eigen::VectorXd y) {
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = y[i];
      y[i] = xi + opt.fd_step;
      const double fp = eval(y);
      y[i] = xi - opt.fd_step;
      const double fm = eval(y);
      y[i] = xi;
      g[i] = (fp - fm) / (2.0 * opt.fd_step);
    }
    return g;
  };
  double fx = eval(x);
  res.history.push_back(fx);
  const int reserve = 2 * static_cast<int>(n) + 1;
  if (n > 0 && fc.remaining() > reserve) {
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g = gradient(x);
    while (fc.remaining() > reserve && g.norm() > 1e-10) {
      Eigen::VectorXd p = -hinv * g;
      if (p.dot(g) >= 0) {
        hinv.setIdentity();
        p = -g;
      }
      double step = 1.0;
      bool accepted = false;
      Eigen::VectorXd xn;
      double fn = fx;
      while (fc.remaining() > reserve && step > 1e-12) {
        xn = x + step * p;
        fn = eval(xn);
        if (fn <= fx + 1e-4 * step * p.dot(g)) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted || fc.remaining() <= reserve) {
        if (accepted && fn < fx) {
          x = xn;
          fx = fn;
          res.history.push_back(fx);
        }
        break;
      }
      const Eigen::VectorXd gn = gradient(xn);
      const Eigen::VectorXd sv = xn - x;
      const Eigen::VectorXd yv = gn - g;
      const double sy = sv.dot(yv);
      if (sy > 1e-14) {
        const double rho = 1.0 / sy;
        const Eigen::VectorXd hy = hinv * yv;
        hinv += ((1.0 + rho * yv.dot(hy)) * rho) * sv * sv.transpose() - rho * (hy * sv.transpose() + sv * hy.transpose());
      }
      const double gain = fx - fn;
      x = xn;
      fx = fn;
      g = gn;
      res.history.push_back(fx);
      if (gain < opt.ftol) break;
    }
  }
  res.x.assign(x.data(), x.data() + n);
  res.value = fx;
  res.evaluations = fc.count();
  res.budget_exhausted = fc.remaining() <= reserve;
  return res;
}

/// Run `method` from x0 and from opt.restarts seeded random points; keep the best.
inline MinimizeResult minimize(ThetaMethod method, const Objective& f, std::vector<double> x0,
                               const MinimizeOptions& opt = {}) {
  auto run = [&](std::vector<double> x) {
    switch (method) {
      case ThetaMethod::simplex: return nelder_mead(f, std::move(x), opt);
      case ThetaMethod::sinusoidal: return sequential_sinusoidal(f, std::move(x), opt);
      case ThetaMethod::bfgs: return quasi_newton(f, std::move(x), opt);
    }
    return nelder_mead(f, std::move(x), opt);
  };
  const std::size_t n = x0.size();
  MinimizeResult best = run(std::move(x0));
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int r = 0; r < opt.restarts; ++r) {
    std::vector<double> x(n);
    for (auto& v : x) v = angle(rng);
    MinimizeResult cand = run(std::move(x));
    const int total = best.evaluations + cand.evaluations;
    const bool exhausted = best.budget_exhausted || cand.budget_exhausted;
    if (cand.value < best.value) {
      std::vector<double> merged = best.history;
      for (double v : cand.history)
        if (v < merged.back()) merged.push_back(v);
      cand.history = std::move(merged);
      best = std::move(cand);
    }
    best.evaluations = total;
    best.budget_exhausted = exhausted;
  }
  return best;
}

}  // namespace ssvqd
