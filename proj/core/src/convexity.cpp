#include "dve/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dve/errors.hpp"

namespace dve {
namespace {

double pow43(double x) { return std::pow(x, 4.0 / 3.0); }

// Generic backtracking gradient ascent; Objective supplies value and
// gradient over d x d matrices.
template <class Value, class Grad>
double ascend(Eigen::MatrixXd F, const Value& value, const Grad& grad,
              int max_iter, Eigen::MatrixXd* argmax) {
  double v = value(F);
  double alpha = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd g = grad(F);
    const double gn2 = g.squaredNorm();
    if (gn2 < 1e-20 * (1.0 + v * v)) break;
    alpha = std::min(alpha * 2.0, 1e3);
    bool moved = false;
    while (alpha > 1e-14) {
      const Eigen::MatrixXd trial = F + alpha * g;
      const double tv = value(trial);
      if (tv > v + 1e-4 * alpha * gn2) {
        F = trial;
        v = tv;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  if (argmax) *argmax = F;
  return v;
}

// Keep the best k seeds by objective value.
struct SeedPool {
  explicit SeedPool(int capacity) : capacity_(capacity) {}
  void offer(const Eigen::MatrixXd& F, double v) {
    if (!std::isfinite(v)) return;
    entries_.emplace_back(v, F);
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    if (static_cast<int>(entries_.size()) > capacity_) entries_.pop_back();
  }
  std::vector<std::pair<double, Eigen::MatrixXd>> entries_;
  int capacity_;
};

}  // namespace

double svk_objective(const SvkDualPoint& point, const SvkParams& params,
                     const Eigen::MatrixXd& F) {
  const double c_h = params.shear + 0.5 * params.lame;
  const Eigen::MatrixXd P = svk_stress(F, params);
  const double ftf2 = (F.transpose() * F).squaredNorm();
  return point.A.cwiseProduct(F).sum() + point.B.cwiseProduct(P).sum() -
         0.5 * c_h * ftf2;
}

Eigen::MatrixXd svk_a_tilde(const SvkDualPoint& point,
                            const SvkParams& params) {
  const double d = static_cast<double>(params.dim);
  const double m = 2.0 * params.shear + params.lame;
  return (point.A - (params.shear + 0.5 * params.lame * d) * point.B) / m;
}

SvkBoundConstants svk_bound_constants(const SvkParams& params) {
  if (!params.valid()) {
    throw ConfigError("svk_params", "svk_bound_constants: invalid parameters");
  }
  const double d = static_cast<double>(params.dim);
  SvkBoundConstants c;
  c.m = 2.0 * params.shear + params.lame;
  c.w = (params.shear + 0.5 * std::abs(params.lame)) / c.m;
  c.gamma_low = (params.lame >= 0.0)
                    ? (params.shear + 0.5 * params.lame) / c.m
                    : (params.shear + 0.5 * params.lame * d) / c.m;
  c.t1 = 27.0 / (512.0 * c.w * c.w * c.w);
  c.t2 = 8.0 * d / (9.0 * std::pow(c.gamma_low, 3.0));

  // Case 1: F = |A~|^{-2/3} A~ yields at least (3/8)|A~|^{4/3} once the
  // cubic term is absorbed by the regime condition.
  c.kappa[0] = (3.0 / 16.0) * std::min(1.0, std::pow(c.t1, -4.0 / 3.0));
  // Case 2: F = 3^{-1/2} |B|^{-1/2} |A~|^{-1/2} A~ yields C2 * S with
  // S = |A~|^{3/2} |B|^{-1/2}.
  const double c2 = 1.0 / std::sqrt(3.0) - c.w / (3.0 * std::sqrt(3.0)) -
                    (1.0 / 36.0) / std::sqrt(c.t1);
  if (!(c2 > 0.0) || !(c.t2 > c.t1)) {
    throw ConfigError("svk_params",
                      "svk_bound_constants: witness constants degenerate");
  }
  c.kappa[1] =
      0.5 * c2 * std::min(std::pow(c.t2, -1.0 / 6.0), std::pow(c.t2, -1.5));
  // Case 3: F = 3 gamma_B B; half of the quartic ray gain absorbs the A~
  // cross term inside the regime.
  c.kappa[2] = (27.0 / (16.0 * d)) * std::pow(c.gamma_low, 4.0) *
               std::min(1.0, std::pow(c.t2, 4.0 / 3.0));
  c.kappa_min = std::min({c.kappa[0], c.kappa[1], c.kappa[2]});

  // Fold |A~| back to |A| and trade |B|^{4/3} for |B|^4 by Young's
  // inequality to reach c (|a|^{4/3} + |A|^{4/3} + |B|^4) - 1/c.
  const double mu0 = (params.shear + 0.5 * params.lame * d) / c.m;
  const double alpha_a = std::pow(2.0, -1.0 / 3.0) * std::pow(c.m, -4.0 / 3.0);
  const double eps = 1.5 / pow43(mu0);
  const double offset =
      c.m * c.kappa_min * pow43(mu0) * (2.0 / 3.0) / std::sqrt(eps);
  const double c_cand =
      std::min({0.75, c.m * c.kappa_min * alpha_a, 0.5 * c.m * c.kappa_min});
  c.c_global = offset > 0.0 ? std::min(c_cand, 1.0 / offset) : c_cand;
  return c;
}

int svk_witness_case(const SvkDualPoint& point, const SvkParams& params) {
  const SvkBoundConstants c = svk_bound_constants(params);
  const double na = svk_a_tilde(point, params).norm();
  const double b3 = std::pow(point.B.norm(), 3.0);
  if (b3 <= c.t1 * na) return 1;
  if (b3 >= c.t2 * na) return 3;
  return 2;
}

namespace {

Eigen::MatrixXd witness_matrix(const SvkDualPoint& point,
                               const SvkParams& params, int case_id) {
  const Eigen::MatrixXd at = svk_a_tilde(point, params);
  const double na = at.norm();
  const double nb = point.B.norm();
  switch (case_id) {
    case 1:
      if (na == 0.0) return Eigen::MatrixXd::Zero(params.dim, params.dim);
      return std::pow(na, -2.0 / 3.0) * at;
    case 2:
      return (1.0 / std::sqrt(3.0)) * std::pow(nb, -0.5) * std::pow(na, -0.5) *
             at;
    case 3: {
      if (nb == 0.0) return Eigen::MatrixXd::Zero(params.dim, params.dim);
      const double m = 2.0 * params.shear + params.lame;
      const double q = (point.B.transpose() * point.B).squaredNorm();
      const double gamma =
          (params.shear * q + 0.5 * params.lame * std::pow(nb, 4.0)) / (m * q);
      return 3.0 * gamma * point.B;
    }
    default:
      throw RegimeMismatchError("svk witness: case id must be 1, 2 or 3");
  }
}

}  // namespace

double svk_witness_value(const SvkDualPoint& point, const SvkParams& params,
                         int case_id) {
  if (svk_witness_case(point, params) != case_id) {
    throw RegimeMismatchError(
        "svk_witness_value: point lies outside the requested regime");
  }
  const Eigen::MatrixXd F = witness_matrix(point, params, case_id);
  const double m = 2.0 * params.shear + params.lame;
  return svk_objective(point, params, F) / m;
}

double svk_witness_bound(const SvkDualPoint& point, const SvkParams& params) {
  const SvkBoundConstants c = svk_bound_constants(params);
  const int id = svk_witness_case(point, params);
  const double na = svk_a_tilde(point, params).norm();
  const double nb = point.B.norm();
  return 0.75 * pow43(point.a.norm()) +
         c.m * c.kappa[id - 1] * (pow43(na) + std::pow(nb, 4.0));
}

double svk_lower_bound(const SvkDualPoint& point, const SvkParams& params) {
  const SvkBoundConstants c = svk_bound_constants(params);
  return c.c_global * (pow43(point.a.norm()) + pow43(point.A.norm()) +
                       std::pow(point.B.norm(), 4.0)) -
         1.0 / c.c_global;
}

double g_svk(const SvkDualPoint& point, const SvkParams& params,
             const SupOptions& options, Eigen::MatrixXd* argmax) {
  if (!params.valid()) {
    throw ConfigError("svk_params", "g_svk: invalid parameters");
  }
  const int d = params.dim;
  const double c_h = params.shear + 0.5 * params.lame;
  const double scale_b = 2.0 * c_h;

  const auto value = [&](const Eigen::MatrixXd& F) {
    return svk_objective(point, params, F);
  };
  const auto grad = [&](const Eigen::MatrixXd& F) {
    const Eigen::MatrixXd ftf = F.transpose() * F;
    const double bf = point.B.cwiseProduct(F).sum();
    Eigen::MatrixXd g = point.A;
    g += params.shear * (point.B * ftf + F * point.B.transpose() * F +
                         F * F.transpose() * point.B);
    g += 0.5 * params.lame * (2.0 * F * bf + F.squaredNorm() * point.B);
    g -= (params.shear + 0.5 * params.lame * d) * point.B;
    g -= scale_b * (F * ftf);
    return g;
  };

  SeedPool pool(options.ascent_starts);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(d, d);
  pool.offer(zero, value(zero));
  for (int id = 1; id <= 3; ++id) {
    const Eigen::MatrixXd at = svk_a_tilde(point, params);
    if ((id != 3 && at.norm() == 0.0) || (id != 1 && point.B.norm() == 0.0)) {
      continue;
    }
    const Eigen::MatrixXd w = witness_matrix(point, params, id);
    pool.offer(w, value(w));
    pool.offer(-w, value(-w));
  }
  if (point.B.norm() > 0.0) {
    const Eigen::MatrixXd f3 = 3.0 * point.B;
    pool.offer(f3, value(f3));
  }
  if (d == 2) {
    const int n = options.grid_points;
    const double hw = options.grid_halfwidth;
    Eigen::MatrixXd F(2, 2);
    for (int i0 = 0; i0 < n; ++i0) {
      F(0, 0) = -hw + 2.0 * hw * i0 / (n - 1);
      for (int i1 = 0; i1 < n; ++i1) {
        F(0, 1) = -hw + 2.0 * hw * i1 / (n - 1);
        for (int i2 = 0; i2 < n; ++i2) {
          F(1, 0) = -hw + 2.0 * hw * i2 / (n - 1);
          for (int i3 = 0; i3 < n; ++i3) {
            F(1, 1) = -hw + 2.0 * hw * i3 / (n - 1);
            pool.offer(F, value(F));
          }
        }
      }
    }
  } else {
    // Structured seeds along the data directions at several radii.
    std::vector<Eigen::MatrixXd> dirs = {Eigen::MatrixXd::Identity(d, d)};
    if (point.A.norm() > 0.0) dirs.push_back(point.A / point.A.norm());
    if (point.B.norm() > 0.0) dirs.push_back(point.B / point.B.norm());
    const Eigen::MatrixXd at = svk_a_tilde(point, params);
    if (at.norm() > 0.0) dirs.push_back(at / at.norm());
    for (const auto& dir : dirs) {
      for (double t : {-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0}) {
        pool.offer(t * dir, value(t * dir));
      }
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_f = zero;
  for (const auto& [v0, f0] : pool.entries_) {
    Eigen::MatrixXd fm;
    const double v = ascend(f0, value, grad, options.ascent_max_iter, &fm);
    if (v > best) {
      best = v;
      best_f = fm;
    }
  }
  if (argmax) *argmax = best_f;
  return 0.75 * pow43(point.a.norm()) + best;
}

double svk_h_sup(const SvkDualPoint& point, const SvkParams& params,
                 const SupOptions& options) {
  const double m = 2.0 * params.shear + params.lame;
  return (g_svk(point, params, options) - 0.75 * pow43(point.a.norm())) / m;
}

double neo_objective(const NeoHookeanDualPoint& point,
                     const Eigen::Matrix2d& F) {
  const double beta = cofactor(point.B).cwiseProduct(F).sum();
  return (point.A + point.B).cwiseProduct(F).sum() +
         point.s * F.determinant() + 0.75 * pow43(std::abs(beta)) -
         0.5 * F.squaredNorm();
}

double g_neo_hookean(const NeoHookeanDualPoint& point,
                     const SupOptions& options, Eigen::Matrix2d* argmax) {
  if (std::abs(point.s) > 1.0) {
    // Follow the unbounded ray (t Id for s > 1, t diag(1, -1) for s < -1)
    // until the objective confirms the blow-up.
    Eigen::Matrix2d dir = Eigen::Matrix2d::Identity();
    if (point.s < 0.0) dir(1, 1) = -1.0;
    double t = 1.0;
    for (int k = 0; k < 80; ++k) {
      if (neo_objective(point, t * dir) > 1e12) {
        if (argmax) *argmax = t * dir;
        return std::numeric_limits<double>::infinity();
      }
      t *= 2.0;
    }
    throw SolveError("g_neo_hookean: unbounded ray failed to certify +inf");
  }

  const auto value = [&](const Eigen::MatrixXd& F) {
    return neo_objective(point, F);
  };
  const Eigen::Matrix2d cof_b = cofactor(point.B);
  const auto grad = [&](const Eigen::MatrixXd& F) {
    const double beta = cof_b.cwiseProduct(F).sum();
    Eigen::MatrixXd g = point.A + point.B;
    g += point.s * cofactor(F);
    if (beta != 0.0) {
      g += std::cbrt(beta) * cof_b;  // d/dF (3/4)|beta|^{4/3}
    }
    g -= F;
    return g;
  };

  SeedPool pool(options.ascent_starts);
  const Eigen::Matrix2d zero = Eigen::Matrix2d::Zero();
  pool.offer(zero, value(zero));
  const Eigen::Matrix2d w1 = 0.5 * (point.A + point.B);
  pool.offer(w1, value(w1));
  const double nb = point.B.norm();
  if (nb > 0.0) {
    const Eigen::Matrix2d w2 = -(nb / std::sqrt(8.0)) * cofactor(point.B);
    pool.offer(w2, value(w2));
    pool.offer(-w2, value(-w2));
  }
  const int n = options.grid_points;
  const double hw = options.grid_halfwidth;
  Eigen::MatrixXd F(2, 2);
  for (int i0 = 0; i0 < n; ++i0) {
    F(0, 0) = -hw + 2.0 * hw * i0 / (n - 1);
    for (int i1 = 0; i1 < n; ++i1) {
      F(0, 1) = -hw + 2.0 * hw * i1 / (n - 1);
      for (int i2 = 0; i2 < n; ++i2) {
        F(1, 0) = -hw + 2.0 * hw * i2 / (n - 1);
        for (int i3 = 0; i3 < n; ++i3) {
          F(1, 1) = -hw + 2.0 * hw * i3 / (n - 1);
          pool.offer(F, value(F));
        }
      }
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_f = zero;
  for (const auto& [v0, f0] : pool.entries_) {
    Eigen::MatrixXd fm;
    const double v = ascend(f0, value, grad, options.ascent_max_iter, &fm);
    if (v > best) {
      best = v;
      best_f = fm;
    }
  }
  if (argmax) *argmax = best_f;
  return 0.5 * point.a.squaredNorm() - point.s + best;
}

double neo_lower_bound(const NeoHookeanDualPoint& point) {
  // Witness constants: 1/1024 covers both regimes (|B|^2 small or large
  // against |A + B|) and the 1/2 |a|^2 term.
  const double c = 1.0 / 1024.0;
  return c * (point.a.squaredNorm() + (point.A + point.B).squaredNorm() +
              std::pow(point.B.norm(), 4.0)) -
         1.0;
}

double neo_upper_bound(const NeoHookeanDualPoint& point) {
  const double s = std::abs(point.s);
  if (!(s < 1.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return point.a.squaredNorm() +
         (point.A + point.B).squaredNorm() / (1.0 - s) +
         std::pow(point.B.norm(), 4.0) / ((1.0 - s) * (1.0 - s)) + 1.0;
}

}  // namespace dve
