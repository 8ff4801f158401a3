#ifndef MFOS_LEARNERS_HPP
#define MFOS_LEARNERS_HPP

#include <string>
#include <vector>

#include "mfos/diff.hpp"
#include "mfos/games.hpp"

namespace mfos {

enum class LearnerAlgo { kNaive, kLola, kMmaml, kLabr };

std::string to_string(LearnerAlgo a);
LearnerAlgo learner_from_string(const std::string& name);

// One exact gradient-ascent step on own value, opponent treated as static.
// `seat` says which side of the game `own` occupies.
PolicyParams nl_step(const GameSpec& game, const PolicyParams& own, const PolicyParams& opp,
                     double alpha, Agent seat);

// Which parameters the opponent's anticipated step differentiates. The
// conventional reading is the opponent's own parameters; the alternate
// own-parameter variant is kept for ablation.
enum class LolaDeltaGrad { kOpponentParams, kOwnParams };

// Look-ahead step through the opponent's anticipated naive update:
//   own + a_own * d/d(own) v_own(own, opp + delta(own, opp)),
// delta = a_opp * grad_opp v_opp. The total derivative carries the
// second-order term through delta (cross Hessian), with the shifted-point
// gradients exact.
PolicyParams lola_step(const GameSpec& game, const PolicyParams& own, const PolicyParams& opp,
                       double alpha_own, double alpha_opp, Agent seat,
                       LolaDeltaGrad delta_grad = LolaDeltaGrad::kOpponentParams);

struct MmamlConfig {
  int meta_steps = 100;
  double adam_lr = 0.05;
  int batch = 32;
  int iters = 300;
  double fd_step = 1e-3;
};

// Learned initial logits: maximizes the batch-mean per-step return of
// meta_steps of naive-vs-naive dynamics over random opponent inits, by
// central finite differences over the initial coordinates and Adam ascent.
// `objective_trace`, when given, records the batch-mean objective per iter.
Eigen::VectorXd mmaml_train(const GameSpec& game, const MmamlConfig& cfg, Agent seat, Rng& rng,
                            std::vector<double>* objective_trace = nullptr);

// Trained initializer with provenance, serialized as versioned JSON.
struct MmamlInit {
  std::string game;
  uint64_t seed = 0;
  MmamlConfig config;
  Eigen::VectorXd logits;

  void save(const std::string& path) const;
  static MmamlInit load(const std::string& path);
};

// Best response to a fixed announced policy: fresh standard-normal init, then
// `steps` exact gradient-ascent steps on own value. `announced_seat` is the
// seat the announced policy occupies; the returned policy sits opposite.
PolicyParams labr_respond(const GameSpec& game, const PolicyParams& announced,
                          Agent announced_seat, int steps, double alpha, Rng& rng);

// Simultaneous learner-vs-learner dynamics from given initial policies.
// policies[t] is the pair after t updates; values[t] its exact value.
struct DynamicsTrace {
  std::vector<PolicyParams> policy_a, policy_b;
  std::vector<ValuePair> values;

  // per-step means over pairs 1..T (the post-update episodes)
  ValuePair mean_return() const;
};

// `labr_rng` feeds LABR's per-step best-response inits; when absent a fixed
// game-derived stream is used.
DynamicsTrace run_learner_dynamics(const GameSpec& game, LearnerAlgo algo_a, LearnerAlgo algo_b,
                                   const PolicyParams& init_a, const PolicyParams& init_b,
                                   int steps, Rng* labr_rng = nullptr);

}  // namespace mfos

#endif
