#include "horst/fwi/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "horst/common/error.hpp"

namespace horst::fwi {

bool LbfgsMemory::push(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  const double sy = s.dot(y);
  if (!(sy > 0.0)) return false;
  pairs_.push_back({s, y, sy});
  while (int(pairs_.size()) > m_) pairs_.pop_front();
  return true;
}

Eigen::VectorXd LbfgsMemory::direction(const Eigen::VectorXd& g) const {
  if (pairs_.empty()) {
    const double gi = g.lpNorm<Eigen::Infinity>();
    if (!(gi > 0.0)) return Eigen::VectorXd::Zero(g.size());
    return (-init_step_ / gi) * g;
  }
  const int k = int(pairs_.size());
  Eigen::VectorXd q = g;
  std::vector<double> alpha(std::size_t(k), 0.0);
  for (int i = k - 1; i >= 0; --i) {
    const Pair& p = pairs_[std::size_t(i)];
    alpha[std::size_t(i)] = p.s.dot(q) / p.sy;
    q -= alpha[std::size_t(i)] * p.y;
  }
  const Pair& newest = pairs_.back();
  const double gamma = newest.sy / newest.y.squaredNorm();
  Eigen::VectorXd r = gamma * q;
  for (int i = 0; i < k; ++i) {
    const Pair& p = pairs_[std::size_t(i)];
    const double beta = p.y.dot(r) / p.sy;
    r += (alpha[std::size_t(i)] - beta) * p.s;
  }
  return -r;
}

namespace {

// cubic minimizer over [a_lo, a_hi] from values and slopes at both ends,
// safeguarded into the interior of the bracket
double cubic_step(double a_lo, double j_lo, double d_lo, double a_hi,
                  double j_hi, double d_hi) {
  const double lo = std::min(a_lo, a_hi);
  const double hi = std::max(a_lo, a_hi);
  const double mid = 0.5 * (lo + hi);
  if (!(hi > lo)) return mid;
  const double d1 = d_lo + d_hi - 3.0 * (j_lo - j_hi) / (a_lo - a_hi);
  const double disc = d1 * d1 - d_lo * d_hi;
  if (!(disc >= 0.0)) return mid;
  const double sgn = a_hi >= a_lo ? 1.0 : -1.0;
  const double d2 = sgn * std::sqrt(disc);
  const double den = d_hi - d_lo + 2.0 * d2;
  if (den == 0.0) return mid;
  double a = a_hi - (a_hi - a_lo) * (d_hi + d2 - d1) / den;
  if (!std::isfinite(a)) return mid;
  const double margin = 0.1 * (hi - lo);
  return std::clamp(a, lo + margin, hi - margin);
}

} // namespace

LineSearchResult wolfe_line_search(
    const std::function<double(double, double*)>& phi, double j0, double dphi0,
    const WolfeOptions& opt) {
  if (!(dphi0 < 0.0))
    throw NumericError("line search requires a descent direction");

  LineSearchResult res;
  double best_a = 0.0, best_j = j0, best_d = 0.0;
  double last_a = -1.0, last_j = 0.0, last_d = 0.0;
  const auto eval = [&](double a) {
    double d = 0.0;
    const double j = phi(a, &d);
    ++res.n_eval;
    last_a = a;
    last_j = j;
    last_d = d;
    if (j < best_j) {
      best_a = a;
      best_j = j;
      best_d = d;
    }
    return std::pair<double, double>(j, d);
  };
  const auto sufficient = [&](double a, double j) {
    return j <= j0 + opt.c1 * a * dphi0;
  };
  const auto curvature = [&](double d) {
    return std::abs(d) <= -opt.c2 * dphi0;
  };
  const auto accept = [&](double a, double j, double d) {
    res.alpha = a;
    res.J = j;
    res.dphi = d;
    res.wolfe_ok = true;
    return res;
  };

  // zoom phase: shrink a bracket known to contain a Wolfe point
  const auto zoom = [&](double a_lo, double j_lo, double d_lo, double a_hi,
                        double j_hi, double d_hi) -> bool {
    while (res.n_eval < opt.max_eval) {
      if (std::abs(a_hi - a_lo) <=
          1e-12 * std::max(1.0, std::max(std::abs(a_lo), std::abs(a_hi))))
        return false;
      const double a = cubic_step(a_lo, j_lo, d_lo, a_hi, j_hi, d_hi);
      const auto [j, d] = eval(a);
      if (!sufficient(a, j) || j >= j_lo) {
        a_hi = a;
        j_hi = j;
        d_hi = d;
      } else {
        if (curvature(d)) {
          accept(a, j, d);
          return true;
        }
        if (d * (a_hi - a_lo) >= 0.0) {
          a_hi = a_lo;
          j_hi = j_lo;
          d_hi = d_lo;
        }
        a_lo = a;
        j_lo = j;
        d_lo = d;
      }
    }
    return false;
  };

  // bracketing phase
  double a_prev = 0.0, j_prev = j0, d_prev = dphi0;
  double a = std::min(opt.alpha0, opt.alpha_max);
  bool first = true;
  bool done = false;
  while (res.n_eval < opt.max_eval) {
    const auto [j, d] = eval(a);
    if (!sufficient(a, j) || (!first && j >= j_prev)) {
      done = zoom(a_prev, j_prev, d_prev, a, j, d);
      break;
    }
    if (curvature(d)) {
      accept(a, j, d);
      done = true;
      break;
    }
    if (d >= 0.0) {
      done = zoom(a, j, d, a_prev, j_prev, d_prev);
      break;
    }
    if (a >= opt.alpha_max) break;
    a_prev = a;
    j_prev = j;
    d_prev = d;
    a = std::min(2.0 * a, opt.alpha_max);
    first = false;
  }
  if (done) return res;

  // no Wolfe point within budget: fall back to the best strict decrease
  res.warned = true;
  if (best_j < j0 && best_a > 0.0) {
    if (last_a != best_a) {
      // re-evaluate so the caller's cached state matches the result
      double d = 0.0;
      const double j = phi(best_a, &d);
      ++res.n_eval;
      best_j = j;
      best_d = d;
    }
    res.alpha = best_a;
    res.J = best_j;
    res.dphi = best_d;
    res.wolfe_ok = sufficient(best_a, best_j) && curvature(best_d);
    return res;
  }
  res.alpha = 0.0;
  res.J = j0;
  return res;
}

} // namespace horst::fwi
