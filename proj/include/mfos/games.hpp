#ifndef MFOS_GAMES_HPP
#define MFOS_GAMES_HPP

#include <Eigen/Dense>
#include <string>

#include "mfos/rng.hpp"

namespace mfos {

enum class Agent { kA, kB };

inline Agent other(Agent s) { return s == Agent::kA ? Agent::kB : Agent::kA; }

enum class HorizonMode { kIteratedMemoryOne, kOneShot };

// Policy logits. Sigmoid gives per-state cooperation probabilities.
// Iterated games use 5 entries ordered [initial, CC, CD, DC, DD] where the
// conditioning states are (my previous action, their previous action) from
// the owner's perspective. One-shot games use a single entry.
using PolicyParams = Eigen::VectorXd;

struct ValuePair {
  double v_a = 0.0;
  double v_b = 0.0;
  double of(Agent s) const { return s == Agent::kA ? v_a : v_b; }
};

// A two-player matrix game plus the inner-learning knobs attached to it.
// Payoff matrices are indexed by (own action, opponent action), action 0
// meaning cooperate.
struct GameSpec {
  std::string name;
  Eigen::Matrix2d payoff_a;
  Eigen::Matrix2d payoff_b;
  double inner_discount = 0.96;  // unused in one-shot mode
  HorizonMode horizon = HorizonMode::kIteratedMemoryOne;
  double lr_a = 1.0;
  double lr_b = 1.0;

  int policy_len() const { return horizon == HorizonMode::kOneShot ? 1 : 5; }

  double payoff(Agent s, int own_act, int opp_act) const {
    return s == Agent::kA ? payoff_a(own_act, opp_act) : payoff_b(own_act, opp_act);
  }

  double lr(Agent s) const { return s == Agent::kA ? lr_a : lr_b; }

  double min_payoff() const {
    return std::min(payoff_a.minCoeff(), payoff_b.minCoeff());
  }
  double max_payoff() const {
    return std::max(payoff_a.maxCoeff(), payoff_b.maxCoeff());
  }

  // Known games: "ipd", "imp", "chicken". Throws std::invalid_argument for
  // anything else, listing the valid names.
  static GameSpec by_name(const std::string& name);
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd policy_probs(const PolicyParams& logits);

// Independent standard-normal logits; probabilities are sigmoid of the draws.
PolicyParams init_policy(const GameSpec& game, Rng& rng);

// The induced chain over joint actions (CC, CD, DC, DD), always in agent a's
// frame. Agent b's conditionals are re-indexed accordingly. r_a/r_b are the
// per-state payoff vectors.
struct JointChain {
  Eigen::Vector4d p0;    // initial joint-action distribution
  Eigen::Matrix4d P;     // row s -> distribution over next joint action
  Eigen::Vector4d r_a;
  Eigen::Vector4d r_b;
};

JointChain joint_chain(const GameSpec& game, const PolicyParams& policy_a,
                       const PolicyParams& policy_b);

// Exact expected returns, normalized to per-step units:
//   iterated: v_i = (1-g) p0' (I - g P)^{-1} r_i
//   one-shot: bilinear expected payoff
ValuePair game_value(const GameSpec& game, const PolicyParams& policy_a,
                     const PolicyParams& policy_b);

// Discounted state-visitation distribution (1-g) p0' (I - g P)^{-1} for
// iterated games; the joint action distribution itself for one-shot games.
Eigen::Vector4d discounted_visitation(const GameSpec& game, const PolicyParams& policy_a,
                                      const PolicyParams& policy_b);

// Saturated-logit stand-ins for deterministic strategies (|logit| = 40 pushes
// sigmoid past double rounding).
PolicyParams deterministic_policy(const GameSpec& game, const std::array<int, 5>& coop);
PolicyParams always_defect(const GameSpec& game);
PolicyParams always_cooperate(const GameSpec& game);
PolicyParams tit_for_tat(const GameSpec& game);  // iterated games only

}  // namespace mfos

#endif
