#ifndef MFOS_META_HPP
#define MFOS_META_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfos/games.hpp"
#include "mfos/learners.hpp"

namespace mfos {

// One-hidden-layer Gaussian meta-policy. Input is the concatenation of both
// agents' policy probabilities; output is the mean of the next own policy's
// logits, with a state-independent learned log-std. The optional
// initial_policy replaces the random draw for the own seat at episode start.
// PPO additionally carries a one-hidden-layer critic.
struct MetaPolicyParams {
  std::string game;
  int obs_dim = 0, act_dim = 0, hidden = 256;
  Eigen::MatrixXd w1, w2;  // hidden x obs, act x hidden
  Eigen::VectorXd b1, b2;
  Eigen::VectorXd log_std;  // act, initialized to 0
  std::optional<Eigen::VectorXd> initial_policy;

  bool has_critic = false;
  Eigen::MatrixXd cw1;  // hidden x obs
  Eigen::VectorXd cb1, cw2;
  double cb2 = 0;

  static MetaPolicyParams make(const GameSpec& g, int hidden, bool critic, bool learn_init);
  static MetaPolicyParams random_init(const GameSpec& g, int hidden, bool critic,
                                      bool learn_init, Rng& rng);

  // Flat packing, layout: w1, b1, w2, b2, [initial_policy], [log_std], [critic].
  int packed_size(bool with_log_std, bool with_critic) const;
  Eigen::VectorXd pack(bool with_log_std, bool with_critic) const;
  void unpack(const Eigen::VectorXd& flat, bool with_log_std, bool with_critic);

  // actor mean for a batch of observations (rows)
  Eigen::MatrixXd actor_mean(const Eigen::MatrixXd& obs) const;
  Eigen::VectorXd critic_value(const Eigen::MatrixXd& obs) const;

  void save(const std::string& path, const nlohmann::json& provenance) const;
  static MetaPolicyParams load(const std::string& path, nlohmann::json* provenance = nullptr);
};

// Stochastic mode samples each output coordinate from N(mean, exp(log_std));
// deterministic mode returns the mean. Aborts on non-finite activations.
Eigen::VectorXd meta_policy_act(const MetaPolicyParams& params, const Eigen::VectorXd& obs,
                                Rng& rng, bool deterministic);

struct OpponentSpec {
  LearnerAlgo algo = LearnerAlgo::kNaive;
  Eigen::VectorXd mmaml_init;  // required for kMmaml
  int labr_steps = 1000;

  static OpponentSpec naive() { return {}; }
  static OpponentSpec lola() { return {LearnerAlgo::kLola, {}, 1000}; }
  static OpponentSpec mmaml(Eigen::VectorXd init) {
    return {LearnerAlgo::kMmaml, std::move(init), 1000};
  }
  static OpponentSpec labr(int steps = 1000) { return {LearnerAlgo::kLabr, {}, steps}; }
};

// Lockstep batch of meta-episodes of the shaping meta-game. The meta-agent
// owns the agent-a seat. step() receives the meta-agent's next policies, then
// updates the opponents from the pair that was just played (LABR instead
// best-responds to the incoming policies), plays the new pair, and returns
// its exact values as rewards. Observations are [own probs ++ opp probs].
class BatchShapingEnv {
 public:
  BatchShapingEnv(GameSpec game, OpponentSpec opponent, int batch);

  // Draws initial policy pairs (own seat from own_init when given).
  Eigen::MatrixXd reset(Rng rng, const Eigen::VectorXd* own_init = nullptr);
  // Explicit-state reset for tests and trace replay.
  Eigen::MatrixXd reset_to(const Eigen::MatrixXd& own_logits, const Eigen::MatrixXd& opp_logits,
                           Rng rng);

  struct Step {
    Eigen::MatrixXd obs;
    Eigen::VectorXd reward_own, reward_opp;
  };
  Step step(const Eigen::MatrixXd& actions);

  Eigen::MatrixXd observations() const;
  ValuePair current_value(int slot) const;
  const Eigen::MatrixXd& own_logits() const { return own_; }
  const Eigen::MatrixXd& opp_logits() const { return opp_; }
  int batch() const { return batch_; }
  const GameSpec& game() const { return game_; }

 private:
  GameSpec game_;
  OpponentSpec opponent_;
  int batch_;
  Eigen::MatrixXd own_, opp_;  // batch x len logits
  Rng rng_{0};
};

// Mirrored two-seat variant for meta-self-play; seat 0 is agent a.
class SelfPlayBatchEnv {
 public:
  SelfPlayBatchEnv(GameSpec game, int batch);

  struct Obs {
    Eigen::MatrixXd seat0, seat1;
  };
  Obs reset(Rng rng, const Eigen::VectorXd* init0 = nullptr,
            const Eigen::VectorXd* init1 = nullptr);
  Obs reset_to(const Eigen::MatrixXd& seat0_logits, const Eigen::MatrixXd& seat1_logits);

  struct Step {
    Obs obs;
    Eigen::VectorXd reward0, reward1;
  };
  Step step(const Eigen::MatrixXd& actions0, const Eigen::MatrixXd& actions1);

  const Eigen::MatrixXd& seat0_logits() const { return seat0_; }
  const Eigen::MatrixXd& seat1_logits() const { return seat1_; }
  int batch() const { return batch_; }

 private:
  GameSpec game_;
  int batch_;
  Eigen::MatrixXd seat0_, seat1_;
};

// One batch of meta-trajectories: per meta-step observation, sampled action
// and inner return, plus the optional learned-initial pseudo-step.
struct MetaRolloutBatch {
  std::vector<Eigen::MatrixXd> obs;      // T of batch x obs_dim
  std::vector<Eigen::MatrixXd> actions;  // T of batch x act_dim
  std::vector<Eigen::VectorXd> logp;     // T of batch
  Eigen::MatrixXd rewards_own, rewards_opp;  // batch x T

  bool has_init_step = false;
  Eigen::MatrixXd init_actions;  // batch x act_dim
  Eigen::VectorXd init_logp;     // batch
  Eigen::VectorXd init_reward_own, init_reward_opp;  // value of the initial pair

  Eigen::MatrixXd final_own_probs, final_opp_probs;  // batch x len

  double mean_own_return() const { return rewards_own.mean(); }
  double mean_opp_return() const { return rewards_opp.mean(); }
};

MetaRolloutBatch meta_rollout(const MetaPolicyParams& params, const OpponentSpec& opponent,
                              const GameSpec& game, int meta_steps, int batch, Rng rng,
                              bool deterministic);

// Probability (as a function of training progress in [0,1]) of pairing the
// meta-agent with a naive learner instead of a mirrored copy of itself.
// Linear from 1 to 0 over the first anneal_end fraction, then 0.
struct SelfPlaySchedule {
  double anneal_end = 0.8;
  double lambda(double progress) const {
    if (progress >= anneal_end) return 0.0;
    return 1.0 - progress / anneal_end;
  }
};

struct GaConfig {
  int population = 2048;
  int batch = 128;
  int generations = 1000;
  int elites = 1;
  int truncation = 32;
  double sigma = 2.0;
  int meta_steps = 100;
  int hidden = 256;
  bool learn_initial_policy = false;
  int validation_batch = 64;
};

struct GaTrace {
  std::vector<double> elite_train_fitness;
  std::vector<double> elite_validation_fitness;
};

// Mutation-only truncation GA with elites and per-generation common random
// numbers; individuals act deterministically.
MetaPolicyParams ga_train(const GameSpec& game, const OpponentSpec& opponent,
                          const GaConfig& cfg, Rng rng, GaTrace* trace = nullptr);

struct PpoConfig {
  int updates = 1000;
  int batch = 4096;
  int meta_steps = 100;
  int epochs = 4;
  int hidden = 256;
  double lr = 2e-4;
  double gamma_outer = 0.99;
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  bool learn_initial_policy = false;
};

struct PpoTrace {
  std::vector<double> mean_return;
};

MetaPolicyParams ppo_train(const GameSpec& game, const OpponentSpec& opponent,
                           const PpoConfig& cfg, Rng rng, PpoTrace* trace = nullptr);

enum class MetaOptimizer { kGa, kPpo };

std::string to_string(MetaOptimizer o);
MetaOptimizer optimizer_from_string(const std::string& s);

// Lambda-annealed meta-self-play on a single shared meta-policy: each rollout
// independently pairs it with a fresh naive learner (probability lambda) or
// with a mirrored copy of itself; both seats' experiences train the shared
// parameters.
MetaPolicyParams selfplay_train(const GameSpec& game, MetaOptimizer optimizer,
                                const GaConfig& ga_cfg, const PpoConfig& ppo_cfg,
                                const SelfPlaySchedule& schedule, Rng rng,
                                GaTrace* ga_trace = nullptr, PpoTrace* ppo_trace = nullptr);

// --- PPO internals exposed for gradient verification ---

struct PpoRows {
  Eigen::MatrixXd obs;      // n x obs_dim
  Eigen::MatrixXd actions;  // n x act_dim
  Eigen::VectorXd logp_old;
  Eigen::VectorXd returns;            // normalized discounted returns
  std::vector<char> is_init_row;      // rows whose action mean is initial_policy
};

// Clipped-surrogate PPO loss (policy + value + entropy) with exact
// hand-derived gradients; returns the scalar loss. `grads`, when given, is
// filled in the same flat layout as pack(with_log_std, with_critic=true).
double ppo_loss_and_grads(const MetaPolicyParams& params, const PpoRows& rows,
                          const PpoConfig& cfg, Eigen::VectorXd* grads);

}  // namespace mfos

#endif
