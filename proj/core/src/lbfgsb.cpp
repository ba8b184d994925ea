// Copyright 2026 The Storyline Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Limited-memory BFGS-B in compact form, after Byrd, Lu, Nocedal and Zhu
// (1995) with the Morales-Nocedal (2011) projected subspace step.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "storyline/error.hpp"
#include "storyline/optimizer.hpp"

namespace storyline {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void OptimizerConfig::validate() const {
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(gradient_step > 0.0)) throw ConfigError("gradient_step must be > 0");
  if (!(convergence_tolerance > 0.0)) {
    throw ConfigError("convergence_tolerance must be > 0");
  }
  if (!(relative_reduction_tolerance >= 0.0)) {
    throw ConfigError("relative_reduction_tolerance must be >= 0");
  }
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (memory_pairs < 1) throw ConfigError("memory_pairs must be >= 1");
  if (max_line_search_steps < 1) {
    throw ConfigError("max_line_search_steps must be >= 1");
  }
}

void Box::project(std::span<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], lower[i], upper[i]);
  }
}

std::string_view to_string(MinimizeStatus status) {
  switch (status) {
    case MinimizeStatus::kConverged: return "converged";
    case MinimizeStatus::kMaxIterations: return "max_iterations";
    case MinimizeStatus::kSmallReduction: return "small_reduction";
    case MinimizeStatus::kLineSearchFailed: return "line_search_failed";
    case MinimizeStatus::kNonFinite: return "non_finite";
  }
  return "unknown";
}

std::vector<double> central_difference_gradient(const ObjectiveFunction& f,
                                                std::span<const double> x,
                                                const Box& box, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double hi = std::min(x[i] + h, box.upper[i]);
    const double lo = std::max(x[i] - h, box.lower[i]);
    if (!(hi > lo)) continue;
    probe[i] = hi;
    const double f_hi = f(probe);
    probe[i] = lo;
    const double f_lo = f(probe);
    probe[i] = x[i];
    g[i] = (f_hi - f_lo) / (hi - lo);
  }
  return g;
}

double projected_gradient_norm(std::span<const double> x,
                               std::span<const double> g, const Box& box) {
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (gi < 0.0) {
      gi = std::max(x[i] - box.upper[i], gi);
    } else {
      gi = std::min(x[i] - box.lower[i], gi);
    }
    norm = std::max(norm, std::abs(gi));
  }
  return norm;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Compact representation B = theta I - W M W^T of the limited-memory
// BFGS matrix built from the stored (s, y) pairs.
class LbfgsMemory {
 public:
  explicit LbfgsMemory(std::size_t capacity) : capacity_(capacity) {}

  std::size_t pairs() const { return s_.size(); }
  double theta() const { return theta_; }
  const MatrixXd& w() const { return w_; }
  const MatrixXd& m() const { return m_; }

  void clear() {
    s_.clear();
    y_.clear();
    theta_ = 1.0;
    w_.resize(0, 0);
    m_.resize(0, 0);
  }

  // Returns false (and stores nothing) when the curvature condition fails.
  bool update(const VectorXd& s, const VectorXd& y) {
    const double sy = s.dot(y);
    const double yy = y.squaredNorm();
    if (!(sy > kEps * yy) || !(sy > 0.0)) return false;
    if (s_.size() == capacity_) {
      s_.pop_front();
      y_.pop_front();
    }
    s_.push_back(s);
    y_.push_back(y);
    theta_ = yy / sy;
    rebuild();
    return true;
  }

 private:
  void rebuild() {
    const Eigen::Index n = s_.front().size();
    const Eigen::Index k = Eigen::Index(s_.size());
    MatrixXd S(n, k), Y(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      S.col(j) = s_[j];
      Y.col(j) = y_[j];
    }
    w_.resize(n, 2 * k);
    w_.leftCols(k) = Y;
    w_.rightCols(k) = theta_ * S;

    const MatrixXd sy = S.transpose() * Y;
    MatrixXd inv = MatrixXd::Zero(2 * k, 2 * k);
    for (Eigen::Index i = 0; i < k; ++i) inv(i, i) = -sy(i, i);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        inv(k + i, j) = sy(i, j);  // L
        inv(j, k + i) = sy(i, j);  // L^T
      }
    }
    inv.bottomRightCorner(k, k) = theta_ * (S.transpose() * S);
    m_ = inv.fullPivLu().inverse();
  }

  std::size_t capacity_;
  std::deque<VectorXd> s_, y_;
  double theta_ = 1.0;
  MatrixXd w_, m_;
};

struct CauchyPoint {
  VectorXd x;
  VectorXd c;  // W^T (x_cauchy - x)
};

// Piecewise search along the projected steepest-descent path for the first
// local minimizer of the quadratic model.
CauchyPoint generalized_cauchy_point(const VectorXd& x, const VectorXd& g,
                                     const Box& box, const LbfgsMemory& mem) {
  const Eigen::Index n = x.size();
  const double theta = mem.theta();
  const MatrixXd& W = mem.w();
  const MatrixXd& M = mem.m();
  const Eigen::Index cols = W.cols();

  CauchyPoint out{x, VectorXd::Zero(cols)};
  VectorXd d = VectorXd::Zero(n);
  std::vector<std::pair<double, Eigen::Index>> breaks;
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = kInf;
    if (g[i] < 0.0 && std::isfinite(box.upper[i])) {
      t = (x[i] - box.upper[i]) / g[i];
    } else if (g[i] > 0.0 && std::isfinite(box.lower[i])) {
      t = (x[i] - box.lower[i]) / g[i];
    }
    if (t > 0.0 && g[i] != 0.0) {
      d[i] = -g[i];
      if (std::isfinite(t)) breaks.emplace_back(t, i);
    }
  }
  std::sort(breaks.begin(), breaks.end());

  VectorXd p = cols > 0 ? VectorXd(W.transpose() * d) : VectorXd();
  VectorXd c = VectorXd::Zero(cols);
  double fp = -d.squaredNorm();
  if (fp >= 0.0) return out;
  double fpp = -theta * fp - (cols > 0 ? p.dot(M * p) : 0.0);
  const double fpp0 = -theta * fp;
  fpp = std::max(fpp, kEps * fpp0);
  double dt_min = -fp / fpp;
  double t_old = 0.0;

  for (const auto& [t, b] : breaks) {
    const double dt = t - t_old;
    if (dt_min < dt) break;
    const double xb = d[b] > 0.0 ? box.upper[b] : box.lower[b];
    const double zb = xb - x[b];
    const double gb = g[b];
    out.x[b] = xb;
    if (cols > 0) c += dt * p;
    double wmc = 0.0, wmp = 0.0, wmw = 0.0;
    if (cols > 0) {
      const VectorXd wb = W.row(b).transpose();
      const VectorXd mwb = M * wb;
      wmc = mwb.dot(c);
      wmp = mwb.dot(p);
      wmw = mwb.dot(wb);
      p += gb * wb;
    }
    fp += dt * fpp + gb * gb + theta * gb * zb - gb * wmc;
    fpp -= theta * gb * gb + 2.0 * gb * wmp + gb * gb * wmw;
    fpp = std::max(fpp, kEps * fpp0);
    d[b] = 0.0;
    t_old = t;
    if (fp >= 0.0) {
      dt_min = 0.0;
      break;
    }
    dt_min = -fp / fpp;
  }

  dt_min = std::max(dt_min, 0.0);
  const double t_final = t_old + dt_min;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d[i] != 0.0) out.x[i] = x[i] + t_final * d[i];
  }
  box.project(std::span<double>(out.x.data(), std::size_t(n)));
  if (cols > 0) c += dt_min * p;
  out.c = c;
  return out;
}

// Minimizes the quadratic model over the variables left free at the Cauchy
// point; returns the trial point x_bar.
VectorXd subspace_minimization(const VectorXd& x, const VectorXd& g,
                               const CauchyPoint& cp, const Box& box,
                               const LbfgsMemory& mem) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cp.x[i] > box.lower[i] && cp.x[i] < box.upper[i]) free.push_back(i);
  }
  if (free.empty()) return cp.x;

  const double theta = mem.theta();
  const MatrixXd& W = mem.w();
  const MatrixXd& M = mem.m();
  const Eigen::Index cols = W.cols();
  const Eigen::Index nf = Eigen::Index(free.size());

  VectorXd full_r = g + theta * (cp.x - x);
  if (cols > 0) full_r -= W * (M * cp.c);
  VectorXd r(nf);
  MatrixXd wz(nf, cols);
  for (Eigen::Index k = 0; k < nf; ++k) {
    r[k] = full_r[free[k]];
    if (cols > 0) wz.row(k) = W.row(free[k]);
  }

  VectorXd du = -r / theta;
  if (cols > 0) {
    VectorXd v = M * (wz.transpose() * r);
    const MatrixXd N = MatrixXd::Identity(cols, cols) -
                       (M * (wz.transpose() * wz)) / theta;
    v = N.fullPivLu().solve(v);
    du -= (wz * v) / (theta * theta);
  }

  // Projected step first; fall back to the truncated step when the
  // projection does not give a descent direction.
  VectorXd projected = cp.x;
  for (Eigen::Index k = 0; k < nf; ++k) {
    const auto i = free[k];
    projected[i] = std::clamp(cp.x[i] + du[k], box.lower[i], box.upper[i]);
  }
  if ((projected - x).dot(g) < 0.0) return projected;

  double alpha = 1.0;
  for (Eigen::Index k = 0; k < nf; ++k) {
    const auto i = free[k];
    if (du[k] > 0.0) {
      alpha = std::min(alpha, (box.upper[i] - cp.x[i]) / du[k]);
    } else if (du[k] < 0.0) {
      alpha = std::min(alpha, (box.lower[i] - cp.x[i]) / du[k]);
    }
  }
  VectorXd out = cp.x;
  for (Eigen::Index k = 0; k < nf; ++k) out[free[k]] += alpha * du[k];
  return out;
}

}  // namespace

MinimizeResult minimize(const ObjectiveFunction& objective, const Box& box,
                        std::vector<double> init, const OptimizerConfig& config,
                        const GradientFunction& gradient) {
  config.validate();
  const std::size_t n = init.size();
  if (box.lower.size() != n || box.upper.size() != n) {
    throw Error("box dimension does not match the initial point");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (box.lower[i] > box.upper[i]) throw Error("box has lower > upper");
  }
  box.project(init);

  MinimizeResult result;
  auto eval = [&](std::span<const double> x) {
    ++result.evaluations;
    return objective(x);
  };
  auto grad = [&](const VectorXd& x) {
    std::span<const double> xs(x.data(), n);
    VectorXd g(static_cast<Eigen::Index>(n));
    if (gradient) {
      gradient(xs, std::span<double>(g.data(), n));
    } else {
      const auto fd =
          central_difference_gradient(eval, xs, box, config.gradient_step);
      for (std::size_t i = 0; i < n; ++i) g[Eigen::Index(i)] = fd[i];
    }
    return g;
  };

  VectorXd x = Eigen::Map<const VectorXd>(init.data(), Eigen::Index(n));
  double f = eval(std::span<const double>(x.data(), n));
  auto finish = [&](MinimizeStatus status, const VectorXd& g) {
    result.x.assign(x.data(), x.data() + n);
    result.value = f;
    result.status = status;
    result.projected_gradient_norm = projected_gradient_norm(
        result.x, std::span<const double>(g.data(), n), box);
    return result;
  };
  if (!std::isfinite(f)) {
    return finish(MinimizeStatus::kNonFinite, VectorXd::Zero(Eigen::Index(n)));
  }
  if (n == 0) return finish(MinimizeStatus::kConverged, VectorXd());

  VectorXd g = grad(x);
  LbfgsMemory memory(std::size_t(config.memory_pairs));

  while (result.iterations < config.max_iterations) {
    if (projected_gradient_norm(std::span<const double>(x.data(), n),
                                std::span<const double>(g.data(), n),
                                box) < config.convergence_tolerance) {
      return finish(MinimizeStatus::kConverged, g);
    }

    const CauchyPoint cp = generalized_cauchy_point(x, g, box, memory);
    const VectorXd x_bar = subspace_minimization(x, g, cp, box, memory);
    const VectorXd d = x_bar - x;
    const double gd = g.dot(d);
    if (!(gd < 0.0)) {
      if (memory.pairs() > 0) {
        memory.clear();
        continue;
      }
      return finish(MinimizeStatus::kLineSearchFailed, g);
    }

    // Backtracking with safeguarded quadratic interpolation on the
    // feasible segment x + t d, t in (0, 1].
    double t = 1.0;
    if (result.iterations == 0 && memory.pairs() == 0) {
      t = std::min(1.0, 1.0 / d.norm());
    }
    VectorXd x_new;
    double f_new = kInf;
    bool accepted = false;
    for (int step = 0; step < config.max_line_search_steps; ++step) {
      x_new = x + t * d;
      box.project(std::span<double>(x_new.data(), n));
      f_new = eval(std::span<const double>(x_new.data(), n));
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * t * gd) {
        accepted = true;
        break;
      }
      double t_next = 0.5 * t;
      if (std::isfinite(f_new)) {
        const double denom = 2.0 * (f_new - f - gd * t);
        if (denom > 0.0) {
          t_next = std::clamp(-gd * t * t / denom, 0.1 * t, 0.5 * t);
        }
      }
      t = t_next;
    }
    if (!accepted) {
      if (memory.pairs() > 0) {
        memory.clear();
        continue;
      }
      return finish(MinimizeStatus::kLineSearchFailed, g);
    }

    ++result.iterations;
    const VectorXd g_new = grad(x_new);
    memory.update(x_new - x, g_new - g);
    const double f_old = f;
    x = x_new;
    f = f_new;
    g = g_new;
    if (config.relative_reduction_tolerance > 0.0 &&
        (f_old - f) <= config.relative_reduction_tolerance *
                           std::max({std::abs(f_old), std::abs(f), 1.0})) {
      return finish(MinimizeStatus::kSmallReduction, g);
    }
  }
  const bool converged =
      projected_gradient_norm(std::span<const double>(x.data(), n),
                              std::span<const double>(g.data(), n),
                              box) < config.convergence_tolerance;
  return finish(
      converged ? MinimizeStatus::kConverged : MinimizeStatus::kMaxIterations,
      g);
}

}  // namespace storyline
