// Copyright 2026 The onepass-rlhf Authors.
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

#include "onepass/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <vector>

#include "Eigen/Dense"
#include "fmt/format.h"
#include "fmt/ostream.h"
#include "onepass/baselines.h"
#include "onepass/core_math.h"
#include "onepass/diagnostics.h"
#include "onepass/environment.h"
#include "onepass/experiment.h"
#include "onepass/onepass_estimator.h"
#include "onepass/scenarios.h"

namespace onepass {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd Gaussian(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

// Uniform in the ball of the given radius.
VectorXd InBall(Rng& rng, int d, double radius) {
  VectorXd v = Gaussian(rng, d);
  v.normalize();
  return radius * std::pow(UniformUnit(rng), 1.0 / d) * v;
}

MatrixXd RandomSpd(Rng& rng, int d, double shift) {
  MatrixXd g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = Gaussian(rng, d);
  return g * g.transpose() / d + shift * MatrixXd::Identity(d, d);
}

double RelFrobenius(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

double Median(std::vector<double> v) { return ComputeQuartiles(std::move(v)).median; }

void FaultyShermanMorrison(MatrixXd& inv, const VectorXd& z, double w) {
  const VectorXd u = inv * z;
  inv.noalias() -= (w / (1.0 + w * z.dot(u))) * u * u.transpose();
  inv(0, inv.cols() - 1) += 1e-6 * inv.norm();
}

CheckResult Check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

// core_math

CheckResult SigmoidSymmetry() {
  Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double w = -30.0 + 60.0 * UniformUnit(rng);
    const SigmoidValues p = SigmoidFamily(w);
    const SigmoidValues n = SigmoidFamily(-w);
    worst = std::max({worst, std::abs(p.sigma + n.sigma - 1.0),
                      std::abs(p.dsigma - n.dsigma)});
  }
  return Check("sigmoid_symmetry", worst <= 1e-12,
               fmt::format("max deviation {:.3g}", worst));
}

CheckResult ShermanMorrisonAgreement(bool faulty) {
  Rng rng(12);
  double worst = 0.0;
  for (int d : {1, 5, 20}) {
    MatrixXd a = MatrixXd::Identity(d, d);
    MatrixXd inv = MatrixXd::Identity(d, d);
    for (int i = 0; i < 1000; ++i) {
      const VectorXd z = Gaussian(rng, d) / std::sqrt(static_cast<double>(d));
      const double w = UniformUnit(rng);
      a.noalias() += w * z * z.transpose();
      if (faulty) {
        FaultyShermanMorrison(inv, z, w);
      } else {
        ShermanMorrisonInPlace(inv, z, w);
      }
    }
    worst = std::max(worst, RelFrobenius(inv, MatrixXd(a.inverse())));
  }
  return Check("sherman_morrison_vs_direct", worst <= 1e-8,
               fmt::format("max rel frobenius {:.3g}", worst));
}

CheckResult CgAgreement() {
  Rng rng(13);
  double worst = 0.0;
  for (int d = 1; d <= 20; ++d) {
    const MatrixXd a = RandomSpd(rng, d, 0.5);
    const VectorXd b = Gaussian(rng, d);
    const CgResult r = CgSolve([&](const VectorXd& p) { return VectorXd(a * p); },
                               b, d, 0.0);
    const VectorXd direct = a.llt().solve(b);
    worst = std::max(worst, (r.solution - direct).norm() / direct.norm());
  }
  return Check("cg_vs_direct", worst <= 1e-6,
               fmt::format("max rel error {:.3g}", worst));
}

CheckResult KappaOrdering() {
  Rng rng(14);
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    const double b = 0.2 + 2.0 * UniformUnit(rng);
    const double l = 0.2 + 2.0 * UniformUnit(rng);
    std::vector<ZThetaPair> data;
    for (int i = 0; i < 10; ++i) {
      data.push_back({InBall(rng, 4, 2.0 * l), InBall(rng, 4, b)});
    }
    // Aligned extreme pair.
    VectorXd e = VectorXd::Unit(4, 0);
    data.push_back({2.0 * l * e, b * e});
    ok = KappaEmpirical(data) <= KappaBound(b, l) * (1.0 + 1e-12);
  }
  return Check("kappa_empirical_le_bound", ok, "");
}

CheckResult BtSampleDeterminism() {
  Rng a(15);
  Rng b(15);
  bool same = true;
  for (int i = 0; i < 1000; ++i) {
    const double ra = std::sin(i);
    const double rb = std::cos(i);
    same = same && BtSample(ra, rb, a) == BtSample(ra, rb, b);
  }
  return Check("bt_sample_deterministic", same, "");
}

// estimator_onepass

// Random-design stream with BT labels from a parameter on the sphere.
struct Stream {
  Rng rng;
  VectorXd theta_star;
  double bound_l;

  Stream(uint64_t seed, int d, double b, double l)
      : rng(seed), theta_star(b * Gaussian(rng, d).normalized()), bound_l(l) {}

  PreferenceSample Next() {
    PreferenceSample s;
    s.z = InBall(rng, static_cast<int>(theta_star.size()), 2.0 * bound_l);
    s.y = BtSample(s.z.dot(theta_star), 0.0, rng);
    return s;
  }
};

CheckResult OmdBallFeasible() {
  OnePassConfig config = OnePassConfig::WithDefaults(5, 1.0, 1.0);
  config.lambda = 0.5;  // small regularizer so the ball constraint binds
  config.eta = 5.0;
  OnePassEstimator est(config);
  Stream stream(16, 5, 1.0, 1.0);
  double worst = 0.0;
  int projected = 0;
  for (int i = 0; i < 2000; ++i) {
    projected += est.Step(stream.Next()).projected ? 1 : 0;
    worst = std::max(worst, est.theta().norm());
  }
  return Check("omd_ball_feasible", worst <= 1.0 + 1e-9,
               fmt::format("max norm {:.12f}, {} projections", worst, projected));
}

CheckResult OmdInverseAgreement() {
  OnePassConfig config = OnePassConfig::WithDefaults(20, 1.0, 1.0);
  config.lambda = 1.0;
  OnePassEstimator est(config);
  Stream stream(17, 20, 1.0, 1.0);
  for (int i = 0; i < 10000; ++i) est.Step(stream.Next());
  const double err = RelFrobenius(est.local_norm().inv(),
                                  MatrixXd(est.local_norm().mat().inverse()));
  return Check("omd_inverse_vs_direct", err <= 1e-7,
               fmt::format("rel frobenius {:.3g}", err));
}

CheckResult ProjectionKkt() {
  Rng rng(18);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 8;
    const MatrixXd m = RandomSpd(rng, d, 0.1);
    const double b = 0.5 + UniformUnit(rng);
    const VectorXd tp = (b * (1.5 + 3.0 * UniformUnit(rng))) *
                        Gaussian(rng, d).normalized();
    const BallQuadraticSolution s = ProjectLocalNormBall(tp, m, b);
    const double residual = (m * (s.x - tp) + s.nu * s.x).norm();
    const double scale = 1e-6 * (1.0 + tp.norm() * m.norm());
    worst = std::max(worst, residual / scale);
    if (!s.active || s.nu < 0.0 || std::abs(s.x.norm() - b) > 1e-9 * b) {
      worst = std::max(worst, 2.0);
    }
  }
  const MatrixXd m = Eigen::Vector2d(4.0, 1.0).asDiagonal();
  const BallQuadraticSolution ex =
      ProjectLocalNormBall(Eigen::Vector2d(2.0, 2.0), m, 1.0);
  // Independent oracle: bisection on ||(8/(4+nu), 2/(1+nu))|| = 1.
  double lo = 0.0;
  double hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::hypot(8.0 / (4.0 + mid), 2.0 / (1.0 + mid)) > 1.0 ? lo : hi) = mid;
  }
  const double nu = 0.5 * (lo + hi);
  const bool example = std::abs(ex.nu - nu) <= 1e-6 &&
                       std::abs(ex.x(0) - 8.0 / (4.0 + nu)) <= 1e-6 &&
                       std::abs(ex.x(1) - 2.0 / (1.0 + nu)) <= 1e-6;
  return Check("projection_kkt", worst <= 1.0 && example,
               fmt::format("worst residual/tolerance {:.3g}, example nu {:.6f}",
                           worst, ex.nu));
}

CheckResult LossFiniteDifferences() {
  Rng rng(19);
  constexpr double kStep = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 6;
    const VectorXd theta = InBall(rng, d, 1.0);
    const VectorXd z = InBall(rng, d, 2.0);
    const int y = trial % 2;
    const LossDerivatives at = ComputeLossDerivatives(theta, z, y);
    VectorXd fd_grad(d);
    MatrixXd fd_hess(d, d);
    for (int i = 0; i < d; ++i) {
      VectorXd e = VectorXd::Zero(d);
      e(i) = kStep;
      const LossDerivatives up = ComputeLossDerivatives(theta + e, z, y);
      const LossDerivatives dn = ComputeLossDerivatives(theta - e, z, y);
      fd_grad(i) = (up.loss - dn.loss) / (2.0 * kStep);
      fd_hess.col(i) = (up.grad - dn.grad) / (2.0 * kStep);
    }
    const MatrixXd hess = at.hess_weight * z * z.transpose();
    const double gscale = std::max(at.grad.norm(), 1e-3);
    const double hscale = std::max(hess.norm(), 1e-3);
    worst = std::max({worst, (fd_grad - at.grad).norm() / gscale,
                      (fd_hess - hess).norm() / hscale});
  }
  return Check("loss_derivatives_fd", worst <= 1e-6,
               fmt::format("max rel error {:.3g}", worst));
}

CheckResult HessianDomination() {
  const OnePassConfig config = OnePassConfig::WithDefaults(5, 1.0, 1.0);
  const double kappa = KappaBound(1.0, 1.0);
  OnePassEstimator est(config);
  Stream stream(20, 5, 1.0, 1.0);
  MatrixXd v = config.lambda * kappa * MatrixXd::Identity(5, 5);
  double worst_dom = std::numeric_limits<double>::infinity();
  double worst_reg = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= 2000; ++t) {
    const PreferenceSample s = stream.Next();
    est.Step(s);
    v.noalias() += s.z * s.z.transpose();
    if (t == 1 || t == 100 || t == 1000 || t == 2000) {
      const MatrixXd& h = est.local_norm().mat();
      worst_dom = std::min(worst_dom, NormDominationCheck(h, v, kappa));
      worst_reg = std::min(
          worst_reg,
          MinEigenvalue(h - config.lambda * MatrixXd::Identity(5, 5)));
    }
  }
  return Check("hessian_domination", worst_dom >= -1e-8 && worst_reg >= -1e-8,
               fmt::format("min eig H - V/kappa {:.3g}, H - lambda I {:.3g}",
                           worst_dom, worst_reg));
}

CheckResult OmdConsistency() {
  std::vector<double> early;
  std::vector<double> late;
  for (int seed = 0; seed < 20; ++seed) {
    EnvironmentGen gen;
    gen.seed = SplitMix64(1000 + seed);
    const Environment env = MakeEnvironment(gen);
    OnePassEstimator est(OnePassConfig::WithDefaults(5, 1.0, 1.0));
    Rng rng(SplitMix64(2000 + seed));
    for (int t = 1; t <= 8000; ++t) {
      const ContextPair p = env.SampleBehavior(rng);
      const int y = BtSample(env.Reward(p.context, p.a),
                             env.Reward(p.context, p.a_prime), rng);
      est.Step({p.context, p.a, p.a_prime,
                env.features().Difference(p.context, p.a, p.a_prime), y});
      if (t == 1000) early.push_back((est.theta() - env.truth().theta_star).norm());
    }
    late.push_back((est.theta() - env.truth().theta_star).norm());
  }
  const double m1 = Median(early);
  const double m8 = Median(late);
  return Check("omd_consistency", m8 < m1,
               fmt::format("median error T=1000 {:.4f}, T=8000 {:.4f}", m1, m8));
}

CheckResult OmdStateConstant() {
  OnePassEstimator est(OnePassConfig::WithDefaults(4, 1.0, 1.0));
  Stream stream(21, 4, 1.0, 1.0);
  auto footprint = [&] {
    return est.theta().size() + est.theta_sum().size() +
           est.local_norm().mat().size() + est.local_norm().inv().size();
  };
  est.Step(stream.Next());
  const auto early = footprint();
  for (int i = 0; i < 5000; ++i) est.Step(stream.Next());
  return Check("omd_state_constant", footprint() == early,
               fmt::format("{} doubles of state", early));
}

// estimator_baselines

MatrixXd StreamFeatures(Stream& s, int n, VectorXd& ys) {
  MatrixXd zs(s.theta_star.size(), n);
  ys.resize(n);
  for (int i = 0; i < n; ++i) {
    const PreferenceSample p = s.Next();
    zs.col(i) = p.z;
    ys(i) = p.y;
  }
  return zs;
}

CheckResult MleOrderInvariance() {
  Stream stream(22, 3, 1.0, 1.0);
  VectorXd ys;
  const MatrixXd zs = StreamFeatures(stream, 300, ys);
  const double tol = 1e-9;
  const LogisticFitResult a =
      FitLogisticInBall(zs, ys, VectorXd::Zero(3), 1.0, tol, 100);
  std::vector<int> order(300);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(23);
  std::shuffle(order.begin(), order.end(), rng);
  MatrixXd zp(3, 300);
  VectorXd yp(300);
  for (int i = 0; i < 300; ++i) {
    zp.col(i) = zs.col(order[i]);
    yp(i) = ys(order[i]);
  }
  const LogisticFitResult b =
      FitLogisticInBall(zp, yp, VectorXd::Zero(3), 1.0, tol, 100);
  const double gap = (a.theta - b.theta).norm();
  return Check("mle_order_invariance", gap <= 10.0 * tol,
               fmt::format("gap {:.3g}", gap));
}

CheckResult MleScalarOracle() {
  Rng rng(24);
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 200 && cases < 50; ++trial) {
    const int n = 5 + trial % 20;
    MatrixXd zs(1, n);
    VectorXd ys(n);
    for (int i = 0; i < n; ++i) {
      zs(0, i) = -2.0 + 4.0 * UniformUnit(rng);
      ys(i) = UniformUnit(rng) < 0.6 ? 1.0 : 0.0;
    }
    const double bound = 3.0;
    auto deriv = [&](double th) {
      double g = 0.0;
      for (int i = 0; i < n; ++i) g += (Sigmoid(zs(0, i) * th) - ys(i)) * zs(0, i);
      return g;
    };
    // Grid for the sign change, then bisection.
    double lo = -bound;
    double hi = bound;
    bool found = false;
    for (int k = 0; k < 600; ++k) {
      const double a = -bound + 2.0 * bound * k / 600.0;
      const double b = -bound + 2.0 * bound * (k + 1) / 600.0;
      if (deriv(a) < 0.0 && deriv(b) >= 0.0) {
        lo = a;
        hi = b;
        found = true;
        break;
      }
    }
    if (!found) continue;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (deriv(mid) < 0.0 ? lo : hi) = mid;
    }
    const LogisticFitResult fit =
        FitLogisticInBall(zs, ys, VectorXd::Zero(1), bound, 1e-12, 100);
    worst = std::max(worst, std::abs(fit.theta(0) - 0.5 * (lo + hi)));
    ++cases;
  }
  return Check("mle_scalar_oracle", cases >= 20 && worst <= 1e-6,
               fmt::format("{} interior cases, max error {:.3g}", cases, worst));
}

CheckResult ImplicitAnchoring() {
  ImplicitOmdConfig config;
  config.base = OnePassConfig::WithDefaults(4, 1.0, 1.0);
  config.base.lambda = 1.0;
  config.base.eta = 1e-9;
  ImplicitOmdEstimator est(config);
  Stream stream(25, 4, 1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const VectorXd before = est.theta();
    est.Step(stream.Next());
    worst = std::max(worst, (est.theta() - before).norm());
  }
  return Check("implicit_anchoring", worst <= 1e-6,
               fmt::format("max move {:.3g}", worst));
}

double MedianNanos(const std::function<void()>& fn, int reps) {
  std::vector<double> ns;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    ns.push_back(std::chrono::duration<double, std::nano>(stop - start).count());
  }
  return Median(ns);
}

CheckResult BaselineCostScaling() {
  MleConfig mle;
  mle.base = OnePassConfig::WithDefaults(5, 1.0, 1.0);
  MleEstimator small(mle);
  MleEstimator large(mle);
  Stream stream(26, 5, 1.0, 1.0);
  for (int i = 0; i < 4000; ++i) {
    const PreferenceSample s = stream.Next();
    if (i < 200) small.Step(s);
    large.Step(s);
  }
  const VectorXd zero = VectorXd::Zero(5);
  const double t_small = MedianNanos([&] { small.Refit(zero, 1e-8); }, 7);
  const double t_large = MedianNanos([&] { large.Refit(zero, 1e-8); }, 7);

  ImplicitOmdConfig implicit;
  implicit.base = mle.base;
  ImplicitOmdEstimator est(implicit);
  RunRecord record;
  for (int t = 1; t <= 6000; ++t) {
    const PreferenceSample s = stream.Next();
    const auto start = std::chrono::steady_clock::now();
    est.Step(s);
    const auto stop = std::chrono::steady_clock::now();
    RunRow row;
    row.t = t;
    row.wall_nanos =
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
    record.rows.push_back(row);
  }
  const TimingProfile p = ComputeTimingProfile(record, {600, 1200}, {5400, 6000});
  const double mle_ratio = t_large / t_small;
  return Check("baseline_cost_scaling", mle_ratio >= 3.0 && p.ratio <= 3.0,
               fmt::format("mle refit 4000/200 ratio {:.2f}, implicit late/early "
                           "{:.2f}",
                           mle_ratio, p.ratio));
}

// scenarios

RunOptions Options(uint64_t seed, int horizon) {
  RunOptions options;
  options.seed = seed;
  options.horizon = horizon;
  return options;
}

Environment DefaultEnvironment(uint64_t seed) {
  EnvironmentGen gen;
  gen.seed = seed;
  return MakeEnvironment(gen);
}

CheckResult ScenarioRecordInvariants() {
  bool monotone = true;
  double worst_z = 0.0;
  for (int seed = 0; seed < 3; ++seed) {
    const Environment env = DefaultEnvironment(SplitMix64(300 + seed));
    const OnePassConfig config = OnePassConfig::WithDefaults(5, 1.0, 1.0);
    OnePassEstimator deploy_est(config);
    const RunRecord deploy = RunDeploy(env, deploy_est, Options(seed, 500));
    double prev = 0.0;
    for (const RunRow& row : deploy.rows) {
      monotone = monotone && *row.cum_regret >= prev;
      prev = *row.cum_regret;
    }
    OnePassEstimator passive_est(config);
    OnePassEstimator active_est(config);
    RunOptions greedy = Options(seed, 300);
    greedy.policy_mode = PolicyMode::kGreedyPerContext;
    const RunRecord passive = RunPassive(env, passive_est, greedy).record;
    const RunRecord active = RunActive(env, active_est, greedy).record;
    for (const RunRecord* r : {&deploy, &passive, &active}) {
      for (const VectorXd& z : RecordedDifferences(*r, env)) {
        worst_z = std::max(worst_z, z.norm());
      }
    }
  }
  return Check("scenario_record_invariants", monotone && worst_z <= 2.0 + 1e-12,
               fmt::format("regret monotone {}, max |z| {:.6f}", monotone,
                           worst_z));
}

CheckResult EnumerateDominatesGreedy() {
  Rng rng(27);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    EnvironmentGen gen;
    gen.dim = 3;
    gen.num_contexts = 2 + trial % 2;
    gen.num_actions = 2 + (trial / 2) % 2;
    gen.seed = SplitMix64(400 + trial);
    const Environment env = MakeEnvironment(gen);
    const VectorXd theta = InBall(rng, 3, 1.0);
    const MatrixXd norm_inv = RandomSpd(rng, 3, 0.05);
    const double beta = 2.0 * UniformUnit(rng);
    const Policy e = PessimisticPolicy(theta, norm_inv, beta, env,
                                       PolicyMode::kEnumerate);
    const Policy g = PessimisticPolicy(theta, norm_inv, beta, env,
                                       PolicyMode::kGreedyPerContext);
    worst = std::max(worst, PessimisticValue(g, theta, norm_inv, beta, env) -
                                PessimisticValue(e, theta, norm_inv, beta, env));
  }
  return Check("enumerate_ge_greedy", worst <= 1e-12,
               fmt::format("max greedy excess {:.3g}", worst));
}

CheckResult MostUncertainIncremental() {
  EnvironmentGen gen;
  gen.dim = 10;
  gen.seed = SplitMix64(500);
  const Environment env = MakeEnvironment(gen);
  OnePassConfig config = OnePassConfig::WithDefaults(10, 1.0, 1.0);
  config.lambda = 1.0;
  OnePassEstimator est(config);
  Rng rng(28);
  double worst_inv = 0.0;
  double worst_gap = 0.0;
  for (int t = 0; t < 300; ++t) {
    const MatrixXd fresh = est.local_norm().mat().inverse();
    worst_inv = std::max(worst_inv, RelFrobenius(est.NormInverse(), fresh));
    const ContextPair p = SelectMostUncertain(env.features(), est.NormInverse());
    double best = 0.0;
    const FeatureTable& f = env.features();
    for (int x = 0; x < f.num_contexts; ++x) {
      for (int a = 0; a < f.num_actions; ++a) {
        for (int b = a + 1; b < f.num_actions; ++b) {
          const VectorXd z = f.Difference(x, a, b);
          best = std::max(best, std::sqrt(z.dot(fresh * z)));
        }
      }
    }
    const VectorXd z = f.Difference(p.context, p.a, p.a_prime);
    worst_gap = std::max(worst_gap, best - std::sqrt(z.dot(fresh * z)));
    const int y = BtSample(env.Reward(p.context, p.a),
                           env.Reward(p.context, p.a_prime), rng);
    est.Step({p.context, p.a, p.a_prime, z, y});
  }
  return Check("most_uncertain_incremental",
               worst_inv <= 1e-8 && worst_gap <= 1e-9,
               fmt::format("inverse rel error {:.3g}, selection gap {:.3g}",
                           worst_inv, worst_gap));
}

CheckResult ActiveSubOptTrend() {
  std::vector<double> short_run;
  std::vector<double> long_run;
  for (int seed = 0; seed < 20; ++seed) {
    const Environment env = DefaultEnvironment(SplitMix64(600 + seed));
    const OnePassConfig config = OnePassConfig::WithDefaults(5, 1.0, 1.0);
    OnePassEstimator a(config);
    OnePassEstimator b(config);
    short_run.push_back(RunActive(env, a, Options(seed, 1000)).record.summary.final_subopt);
    long_run.push_back(RunActive(env, b, Options(seed, 4000)).record.summary.final_subopt);
  }
  const double m1 = Median(short_run);
  const double m4 = Median(long_run);
  return Check("active_subopt_decreases", m4 < m1,
               fmt::format("median SubOpt T=1000 {:.4g}, T=4000 {:.4g}", m1, m4));
}

CheckResult DeployRegretTrend() {
  std::vector<double> reg1;
  std::vector<double> reg4;
  for (int seed = 0; seed < 20; ++seed) {
    const Environment env = DefaultEnvironment(SplitMix64(700 + seed));
    OnePassEstimator est(OnePassConfig::WithDefaults(5, 1.0, 1.0));
    const RunRecord r = RunDeploy(env, est, Options(seed, 4000));
    reg1.push_back(*r.rows[999].cum_regret);
    reg4.push_back(*r.rows[3999].cum_regret);
  }
  const double ratio = Median(reg4) / Median(reg1);
  return Check("deploy_regret_sublinear", ratio <= 3.0,
               fmt::format("Reg_4000 / Reg_1000 = {:.3f}", ratio));
}

// diagnostics

CheckResult PotentialIncremental() {
  Rng rng(29);
  double worst = 0.0;
  for (int d : {2, 5, 10}) {
    std::vector<VectorXd> zs;
    for (int i = 0; i < 500; ++i) zs.push_back(InBall(rng, d, 2.0));
    const double lambda = 0.5;
    const PotentialResult inc = EllipticPotentialCheck(zs, lambda, 2.0);
    MatrixXd v = lambda * MatrixXd::Identity(d, d);
    double lhs = 0.0;
    for (const VectorXd& z : zs) {
      lhs += z.dot(v.inverse() * z);
      v.noalias() += z * z.transpose();
    }
    worst = std::max(worst, std::abs(inc.lhs - lhs) / std::max(1.0, lhs));
  }
  return Check("potential_incremental_vs_scratch", worst <= 1e-8,
               fmt::format("max rel gap {:.3g}", worst));
}

CheckResult CoverageMonotone() {
  const Environment env = DefaultEnvironment(SplitMix64(800));
  OnePassConfig config = OnePassConfig::WithDefaults(5, 1.0, 1.0);
  config.c_beta = 0.05;
  OnePassEstimator est(config);
  const RunRecord base = RunDeploy(env, est, Options(1, 1000));
  bool seen_ok = false;
  bool monotone = true;
  std::string trace;
  for (double scale = 0.25; scale <= 2048.0; scale *= 2.0) {
    RunRecord scaled = base;
    for (RunRow& row : scaled.rows) row.beta *= scale;
    const bool ok = CoverageCheck(scaled).ok;
    monotone = monotone && (!seen_ok || ok);
    seen_ok = seen_ok || ok;
    trace += ok ? '1' : '0';
  }
  return Check("coverage_monotone_in_scale", monotone,
               fmt::format("ok pattern over scales {}", trace));
}

CheckResult DominationDefinitional() {
  const double kappa = KappaBound(1.0, 1.0);
  const double lambda = DefaultLambda(5, 1.0, 1.0, DefaultEta(1.0, 1.0));
  const MatrixXd h = lambda * MatrixXd::Identity(5, 5);
  const MatrixXd v = lambda * kappa * MatrixXd::Identity(5, 5);
  const double value = NormDominationCheck(h, v, kappa);
  return Check("domination_zero_at_start", value == 0.0,
               fmt::format("min eig {:.3g}", value));
}

// harness

CheckResult ConfigRoundTrip() {
  ExperimentConfig c;
  c.scenario = Scenario::kActive;
  c.estimator = EstimatorKind::kHvpCg;
  c.dim = 7;
  c.eta = 2.0;
  c.c_beta = 0.3;
  c.delta = 0.05;
  c.seed_list = {3, 1, 4};
  c.damping = DampingFn::kLog;
  c.policy_mode = PolicyMode::kGreedyPerContext;
  c.Resolve();
  const ExperimentConfig back = ParseConfigText(FormatConfig(c));
  return Check("config_round_trip", back == c, "");
}

CheckResult AggregatePermutation() {
  Rng rng(30);
  std::vector<double> v;
  for (int i = 0; i < 21; ++i) v.push_back(Gaussian(rng, 1)(0));
  const Quartiles a = ComputeQuartiles(v);
  bool same = true;
  for (int k = 0; k < 20; ++k) {
    std::shuffle(v.begin(), v.end(), rng);
    const Quartiles b = ComputeQuartiles(v);
    same = same && a.q1 == b.q1 && a.median == b.median && a.q3 == b.q3;
  }
  return Check("aggregate_permutation_invariant", same, "");
}

}  // namespace

std::vector<CheckResult> RunVerification(const VerifyOptions& options) {
  std::vector<std::function<CheckResult()>> checks = {
      SigmoidSymmetry,
      [&] { return ShermanMorrisonAgreement(options.inject_sherman_morrison_fault); },
      CgAgreement,
      KappaOrdering,
      BtSampleDeterminism,
      OmdBallFeasible,
      OmdInverseAgreement,
      ProjectionKkt,
      LossFiniteDifferences,
      HessianDomination,
      OmdStateConstant,
      MleOrderInvariance,
      MleScalarOracle,
      ImplicitAnchoring,
      ScenarioRecordInvariants,
      EnumerateDominatesGreedy,
      MostUncertainIncremental,
      PotentialIncremental,
      CoverageMonotone,
      DominationDefinitional,
      ConfigRoundTrip,
      AggregatePermutation,
  };
  if (!options.quick) {
    checks.insert(checks.end(), {OmdConsistency, BaselineCostScaling,
                                 ActiveSubOptTrend, DeployRegretTrend});
  }
  std::vector<CheckResult> results;
  for (const auto& check : checks) {
    try {
      results.push_back(check());
    } catch (const std::exception& e) {
      results.push_back({"(exception)", false, e.what()});
    }
  }
  return results;
}

int Verify(std::ostream& out, const VerifyOptions& options) {
  int failed = 0;
  for (const CheckResult& r : RunVerification(options)) {
    failed += r.passed ? 0 : 1;
    fmt::print(out, "{} {}{}{}\n", r.passed ? "PASS" : "FAIL", r.name,
               r.detail.empty() ? "" : ": ", r.detail);
  }
  fmt::print(out, "{} checks failed\n", failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace onepass
