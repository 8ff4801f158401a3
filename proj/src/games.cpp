#include "mfos/games.hpp"

#include <array>
#include <stdexcept>

namespace mfos {

GameSpec GameSpec::by_name(const std::string& name) {
  GameSpec g;
  g.name = name;
  if (name == "ipd") {
    g.payoff_a << -1, -3, 0, -2;
    g.payoff_b = g.payoff_a;
    g.inner_discount = 0.96;
    g.horizon = HorizonMode::kIteratedMemoryOne;
    g.lr_a = g.lr_b = 1.0;
  } else if (name == "imp") {
    // agent a wants to match, agent b to mismatch; zero-sum
    g.payoff_a << 1, -1, -1, 1;
    g.payoff_b << -1, 1, 1, -1;
    g.inner_discount = 0.96;
    g.horizon = HorizonMode::kIteratedMemoryOne;
    g.lr_a = g.lr_b = 0.1;
  } else if (name == "chicken") {
    g.payoff_a << 0, -1, 1, -100;
    g.payoff_b = g.payoff_a;
    g.horizon = HorizonMode::kOneShot;
    g.lr_a = g.lr_b = 1.0;
  } else {
    throw std::invalid_argument("unknown game '" + name + "' (valid: ipd, imp, chicken)");
  }
  return g;
}

Eigen::VectorXd policy_probs(const PolicyParams& logits) {
  return logits.unaryExpr([](double x) { return sigmoid(x); });
}

PolicyParams init_policy(const GameSpec& game, Rng& rng) {
  PolicyParams logits(game.policy_len());
  for (int i = 0; i < logits.size(); ++i) logits[i] = rng.normal();
  return logits;
}

namespace {

void check_lengths(const GameSpec& game, const PolicyParams& policy_a,
                   const PolicyParams& policy_b) {
  const int n = game.policy_len();
  if (policy_a.size() != n || policy_b.size() != n) {
    throw std::invalid_argument("policy length mismatch: game '" + game.name + "' needs " +
                                std::to_string(n) + " logits, got " +
                                std::to_string(policy_a.size()) + " and " +
                                std::to_string(policy_b.size()));
  }
}

// Conditional-state permutation for agent b: global state s = (a_prev, b_prev)
// seen from b's side is (b_prev, a_prev).
constexpr int kPermB[4] = {0, 2, 1, 3};

}  // namespace

JointChain joint_chain(const GameSpec& game, const PolicyParams& policy_a,
                       const PolicyParams& policy_b) {
  check_lengths(game, policy_a, policy_b);
  JointChain c;
  const double pa0 = sigmoid(policy_a[0]);
  const double pb0 = sigmoid(policy_b[0]);
  c.p0 << pa0 * pb0, pa0 * (1 - pb0), (1 - pa0) * pb0, (1 - pa0) * (1 - pb0);
  for (int s = 0; s < 4; ++s) {
    const int a_act = s >> 1, b_act = s & 1;
    c.r_a[s] = game.payoff_a(a_act, b_act);
    c.r_b[s] = game.payoff_b(b_act, a_act);
    if (game.horizon == HorizonMode::kIteratedMemoryOne) {
      const double pa = sigmoid(policy_a[1 + s]);
      const double pb = sigmoid(policy_b[1 + kPermB[s]]);
      c.P(s, 0) = pa * pb;
      c.P(s, 1) = pa * (1 - pb);
      c.P(s, 2) = (1 - pa) * pb;
      c.P(s, 3) = (1 - pa) * (1 - pb);
    }
  }
  if (game.horizon == HorizonMode::kOneShot) c.P.setZero();
  return c;
}

ValuePair game_value(const GameSpec& game, const PolicyParams& policy_a,
                     const PolicyParams& policy_b) {
  const JointChain c = joint_chain(game, policy_a, policy_b);
  ValuePair v;
  if (game.horizon == HorizonMode::kOneShot) {
    v.v_a = c.p0.dot(c.r_a);
    v.v_b = c.p0.dot(c.r_b);
    return v;
  }
  const double g = game.inner_discount;
  const Eigen::Matrix4d M = Eigen::Matrix4d::Identity() - g * c.P;
  Eigen::PartialPivLU<Eigen::Matrix4d> lu(M);
  const Eigen::Vector4d x = lu.transpose().solve(c.p0);  // x = M^{-T} p0
  v.v_a = (1 - g) * x.dot(c.r_a);
  v.v_b = (1 - g) * x.dot(c.r_b);
  return v;
}

Eigen::Vector4d discounted_visitation(const GameSpec& game, const PolicyParams& policy_a,
                                      const PolicyParams& policy_b) {
  const JointChain c = joint_chain(game, policy_a, policy_b);
  if (game.horizon == HorizonMode::kOneShot) return c.p0;
  const double g = game.inner_discount;
  const Eigen::Matrix4d M = Eigen::Matrix4d::Identity() - g * c.P;
  return (1 - g) * Eigen::PartialPivLU<Eigen::Matrix4d>(M).transpose().solve(c.p0);
}

PolicyParams deterministic_policy(const GameSpec& game, const std::array<int, 5>& coop) {
  PolicyParams p(game.policy_len());
  for (int i = 0; i < p.size(); ++i) p[i] = coop[i] ? 40.0 : -40.0;
  return p;
}

PolicyParams always_defect(const GameSpec& game) {
  return deterministic_policy(game, {0, 0, 0, 0, 0});
}

PolicyParams always_cooperate(const GameSpec& game) {
  return deterministic_policy(game, {1, 1, 1, 1, 1});
}

PolicyParams tit_for_tat(const GameSpec& game) {
  if (game.horizon != HorizonMode::kIteratedMemoryOne) {
    throw std::invalid_argument("tit_for_tat needs an iterated game");
  }
  return deterministic_policy(game, {1, 1, 0, 1, 0});
}

}  // namespace mfos
