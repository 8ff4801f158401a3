#include "mfos/diff.hpp"

namespace mfos {

namespace {

constexpr int kPermB[4] = {0, 2, 1, 3};

double sigmoid_prime(double x) {
  const double s = sigmoid(x);
  return s * (1 - s);
}

// d p0 / d(own cooperation prob) for each seat, and the per-state transition
// row derivatives. Row s of P depends on exactly one conditional of each
// agent, so dP/d(prob) collapses to a single row vector.
Eigen::Vector4d dp0_da(double pb0) { return {pb0, 1 - pb0, -pb0, -(1 - pb0)}; }
Eigen::Vector4d dp0_db(double pa0) { return {pa0, -pa0, 1 - pa0, -(1 - pa0)}; }

struct ChainCtx {
  JointChain c;
  Eigen::PartialPivLU<Eigen::Matrix4d> lu;  // of M = I - gP
  double g = 0;
  Eigen::Vector4d pa_cond, pb_cond;  // cooperation probs per global state
  Eigen::Vector4d x;                 // M^{-T} p0
};

ChainCtx make_ctx(const GameSpec& game, const PolicyParams& policy_a,
                  const PolicyParams& policy_b) {
  ChainCtx ctx;
  ctx.c = joint_chain(game, policy_a, policy_b);
  ctx.g = game.inner_discount;
  for (int s = 0; s < 4; ++s) {
    ctx.pa_cond[s] = sigmoid(policy_a[1 + s]);
    ctx.pb_cond[s] = sigmoid(policy_b[1 + kPermB[s]]);
  }
  ctx.lu.compute(Eigen::Matrix4d::Identity() - ctx.g * ctx.c.P);
  ctx.x = ctx.lu.transpose().solve(ctx.c.p0);
  return ctx;
}

// dP(s,:) per unit of the acting agent's cooperation prob in state s
Eigen::Vector4d drow_da(const ChainCtx& ctx, int s) {
  const double pb = ctx.pb_cond[s];
  return {pb, 1 - pb, -pb, -(1 - pb)};
}
Eigen::Vector4d drow_db(const ChainCtx& ctx, int s) {
  const double pa = ctx.pa_cond[s];
  return {pa, -pa, 1 - pa, -(1 - pa)};
}

Gradient one_shot_grad(const GameSpec& game, const PolicyParams& policy_a,
                       const PolicyParams& policy_b, Agent value_of, Agent wrt) {
  const double pa = sigmoid(policy_a[0]), pb = sigmoid(policy_b[0]);
  const Eigen::Matrix2d& R = value_of == Agent::kA ? game.payoff_a : game.payoff_b;
  // v = sum_ij qa_i qb_j R(own_i, opp_j) with own = value_of's action
  const Eigen::Vector2d q_own =
      value_of == Agent::kA ? Eigen::Vector2d(pa, 1 - pa) : Eigen::Vector2d(pb, 1 - pb);
  const Eigen::Vector2d q_opp =
      value_of == Agent::kA ? Eigen::Vector2d(pb, 1 - pb) : Eigen::Vector2d(pa, 1 - pa);
  Gradient grad(1);
  if (wrt == value_of) {
    grad[0] = (R.row(0) - R.row(1)).dot(q_opp);
  } else {
    grad[0] = q_own.dot(R.col(0) - R.col(1));
  }
  const double logit = wrt == Agent::kA ? policy_a[0] : policy_b[0];
  grad[0] *= sigmoid_prime(logit);
  return grad;
}

}  // namespace

Gradient value_grad(const GameSpec& game, const PolicyParams& policy_a,
                    const PolicyParams& policy_b, Agent value_of, Agent wrt) {
  if (game.horizon == HorizonMode::kOneShot) {
    // validate lengths through the chain builder
    joint_chain(game, policy_a, policy_b);
    return one_shot_grad(game, policy_a, policy_b, value_of, wrt);
  }
  const ChainCtx ctx = make_ctx(game, policy_a, policy_b);
  const Eigen::Vector4d& r = value_of == Agent::kA ? ctx.c.r_a : ctx.c.r_b;
  const Eigen::Vector4d y = ctx.lu.solve(r);
  const double scale = 1 - ctx.g;
  Gradient grad(5);
  if (wrt == Agent::kA) {
    grad[0] = scale * sigmoid_prime(policy_a[0]) * dp0_da(sigmoid(policy_b[0])).dot(y);
    for (int s = 0; s < 4; ++s) {
      grad[1 + s] = scale * ctx.g * sigmoid_prime(policy_a[1 + s]) * ctx.x[s] *
                    drow_da(ctx, s).dot(y);
    }
  } else {
    grad[0] = scale * sigmoid_prime(policy_b[0]) * dp0_db(sigmoid(policy_a[0])).dot(y);
    for (int s = 0; s < 4; ++s) {
      // b's conditional kPermB[s] acts in global state s
      grad[1 + kPermB[s]] = scale * ctx.g * sigmoid_prime(policy_b[1 + kPermB[s]]) *
                            ctx.x[s] * drow_db(ctx, s).dot(y);
    }
  }
  return grad;
}

CrossHessian value_cross_hessian(const GameSpec& game, const PolicyParams& policy_a,
                                 const PolicyParams& policy_b, Agent value_of) {
  if (game.horizon == HorizonMode::kOneShot) {
    joint_chain(game, policy_a, policy_b);
    const Eigen::Matrix2d& R = value_of == Agent::kA ? game.payoff_a : game.payoff_b;
    const double curv = R(0, 0) - R(0, 1) - R(1, 0) + R(1, 1);
    CrossHessian h(1, 1);
    h(0, 0) = curv * sigmoid_prime(policy_a[0]) * sigmoid_prime(policy_b[0]);
    return h;
  }
  const ChainCtx ctx = make_ctx(game, policy_a, policy_b);
  const Eigen::Vector4d& r = value_of == Agent::kA ? ctx.c.r_a : ctx.c.r_b;
  const Eigen::Vector4d y = ctx.lu.solve(r);
  const double g = ctx.g, scale = 1 - g;
  const double spa0 = sigmoid_prime(policy_a[0]), spb0 = sigmoid_prime(policy_b[0]);
  const Eigen::Vector4d cross_sign(1, -1, -1, 1);  // d^2 of a product distribution row

  // Per b-logit perturbations of y = M^{-1} r and x = M^{-T} p0:
  //   dy = g M^{-1} dP y,   dx = M^{-T} (dp0 + g dP' x)
  std::array<Eigen::Vector4d, 5> dy_b, dx_b;
  dy_b[0].setZero();
  dx_b[0] = spb0 * ctx.lu.transpose().solve(Eigen::Vector4d(dp0_db(sigmoid(policy_a[0]))));
  for (int s = 0; s < 4; ++s) {
    const int j = 1 + kPermB[s];
    const double sp = sigmoid_prime(policy_b[j]);
    const Eigen::Vector4d row = drow_db(ctx, s);
    Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
    rhs[s] = g * sp * row.dot(y);
    dy_b[j] = ctx.lu.solve(rhs);
    dx_b[j] = ctx.lu.transpose().solve(Eigen::Vector4d(g * sp * ctx.x[s] * row));
  }

  CrossHessian h(5, 5);
  for (int j = 0; j < 5; ++j) {
    // u = a initial logit: v-term = (1-g)(dp0_du . y); differentiate in b
    double d2p0_term = j == 0 ? spa0 * spb0 * cross_sign.dot(y) : 0.0;
    h(0, j) = scale * (d2p0_term + spa0 * dp0_da(sigmoid(policy_b[0])).dot(dy_b[j]));
    for (int s = 0; s < 4; ++s) {
      // u = a conditional for state s: v-term = (1-g) g x[s] (drow_a . y)
      const double spa = sigmoid_prime(policy_a[1 + s]);
      const Eigen::Vector4d row_a = drow_da(ctx, s);
      double term = dx_b[j][s] * row_a.dot(y) + ctx.x[s] * row_a.dot(dy_b[j]);
      if (j == 1 + kPermB[s]) {
        term += ctx.x[s] * sigmoid_prime(policy_b[j]) * cross_sign.dot(y);
      }
      h(1 + s, j) = scale * g * spa * term;
    }
  }
  return h;
}

Gradient fd_grad(const GameSpec& game, const PolicyParams& policy_a,
                 const PolicyParams& policy_b, Agent value_of, Agent wrt, double h) {
  if (h <= 0) throw std::invalid_argument("fd_grad: h must be positive");
  PolicyParams p = wrt == Agent::kA ? policy_a : policy_b;
  Gradient grad(p.size());
  for (int i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    auto eval = [&](double v) {
      p[i] = v;
      const ValuePair vp = wrt == Agent::kA ? game_value(game, p, policy_b)
                                            : game_value(game, policy_a, p);
      return vp.of(value_of);
    };
    grad[i] = (eval(keep + h) - eval(keep - h)) / (2 * h);
    p[i] = keep;
  }
  return grad;
}

}  // namespace mfos
