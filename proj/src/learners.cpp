#include "mfos/learners.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace mfos {

std::string to_string(LearnerAlgo a) {
  switch (a) {
    case LearnerAlgo::kNaive: return "nl";
    case LearnerAlgo::kLola: return "lola";
    case LearnerAlgo::kMmaml: return "mmaml";
    case LearnerAlgo::kLabr: return "labr";
  }
  return "?";
}

LearnerAlgo learner_from_string(const std::string& name) {
  if (name == "nl") return LearnerAlgo::kNaive;
  if (name == "lola") return LearnerAlgo::kLola;
  if (name == "mmaml") return LearnerAlgo::kMmaml;
  if (name == "labr") return LearnerAlgo::kLabr;
  throw std::invalid_argument("unknown learner '" + name + "' (valid: nl, lola, mmaml, labr)");
}

PolicyParams nl_step(const GameSpec& game, const PolicyParams& own, const PolicyParams& opp,
                     double alpha, Agent seat) {
  if (alpha <= 0) throw std::invalid_argument("nl_step: alpha must be positive");
  const Gradient g = seat == Agent::kA ? value_grad(game, own, opp, Agent::kA, Agent::kA)
                                       : value_grad(game, opp, own, Agent::kB, Agent::kB);
  return own + alpha * g;
}

namespace {

// Composite objective for the look-ahead step: own |-> v_own(own, opp + delta).
double lookahead_value(const GameSpec& game, const PolicyParams& own, const PolicyParams& opp,
                       double alpha_opp, Agent seat, LolaDeltaGrad delta_grad) {
  const Agent opp_seat = other(seat);
  Gradient dg;
  if (delta_grad == LolaDeltaGrad::kOpponentParams) {
    dg = seat == Agent::kA ? value_grad(game, own, opp, Agent::kB, Agent::kB)
                           : value_grad(game, opp, own, Agent::kA, Agent::kA);
  } else {
    dg = seat == Agent::kA ? value_grad(game, own, opp, Agent::kB, Agent::kA)
                           : value_grad(game, opp, own, Agent::kA, Agent::kB);
  }
  const PolicyParams shifted = opp + alpha_opp * dg;
  const ValuePair v = seat == Agent::kA ? game_value(game, own, shifted)
                                        : game_value(game, shifted, own);
  return v.of(seat);
}

}  // namespace

PolicyParams lola_step(const GameSpec& game, const PolicyParams& own, const PolicyParams& opp,
                       double alpha_own, double alpha_opp, Agent seat,
                       LolaDeltaGrad delta_grad) {
  if (alpha_own <= 0 || alpha_opp <= 0) {
    throw std::invalid_argument("lola_step: learning rates must be positive");
  }
  if (delta_grad == LolaDeltaGrad::kOwnParams) {
    // Ablation variant: delta differentiates the opponent's value by *own*
    // params, so the total derivative needs an own-own second derivative the
    // analytic core does not carry. Differentiate the composite map directly.
    const double h = 1e-5;
    PolicyParams p = own;
    Gradient g(own.size());
    for (int i = 0; i < own.size(); ++i) {
      const double keep = p[i];
      p[i] = keep + h;
      const double up = lookahead_value(game, p, opp, alpha_opp, seat, delta_grad);
      p[i] = keep - h;
      const double dn = lookahead_value(game, p, opp, alpha_opp, seat, delta_grad);
      p[i] = keep;
      g[i] = (up - dn) / (2 * h);
    }
    return own + alpha_own * g;
  }

  // delta = alpha_opp * grad_opp v_opp, the naive step the opponent would take
  const Gradient opp_grad = seat == Agent::kA ? value_grad(game, own, opp, Agent::kB, Agent::kB)
                                              : value_grad(game, opp, own, Agent::kA, Agent::kA);
  const PolicyParams shifted = opp + alpha_opp * opp_grad;

  Gradient direct, through_opp;
  CrossHessian dd_own_opp;  // d^2 v_opp / d own d opp at the unshifted point
  if (seat == Agent::kA) {
    direct = value_grad(game, own, shifted, Agent::kA, Agent::kA);
    through_opp = value_grad(game, own, shifted, Agent::kA, Agent::kB);
    dd_own_opp = value_cross_hessian(game, own, opp, Agent::kB);
  } else {
    direct = value_grad(game, shifted, own, Agent::kB, Agent::kB);
    through_opp = value_grad(game, shifted, own, Agent::kB, Agent::kA);
    dd_own_opp = value_cross_hessian(game, opp, own, Agent::kA).transpose();
  }
  const Gradient total = direct + alpha_opp * (dd_own_opp * through_opp);
  return own + alpha_own * total;
}

Eigen::VectorXd mmaml_train(const GameSpec& game, const MmamlConfig& cfg, Agent seat, Rng& rng,
                            std::vector<double>* objective_trace) {
  if (cfg.meta_steps < 1) throw std::invalid_argument("mmaml_train: meta_steps must be >= 1");
  const int n = game.policy_len();
  Rng init_rng = rng.split("mmaml-init");
  Eigen::VectorXd phi0 = init_policy(game, init_rng);

  auto traj_return = [&](const Eigen::VectorXd& init, const PolicyParams& opp_init) {
    const DynamicsTrace tr =
        seat == Agent::kA
            ? run_learner_dynamics(game, LearnerAlgo::kNaive, LearnerAlgo::kNaive, init,
                                   opp_init, cfg.meta_steps)
            : run_learner_dynamics(game, LearnerAlgo::kNaive, LearnerAlgo::kNaive, opp_init,
                                   init, cfg.meta_steps);
    const double r = tr.mean_return().of(seat);
    if (!std::isfinite(r)) {
      throw std::runtime_error("mmaml_train: non-finite trajectory return for game '" +
                               game.name + "'");
    }
    return r;
  };

  Eigen::VectorXd m = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Rng batch_root = rng.split("mmaml-batches");
  for (int iter = 0; iter < cfg.iters; ++iter) {
    Rng iter_rng = batch_root.split(static_cast<uint64_t>(iter));
    std::vector<PolicyParams> opps(cfg.batch);
    for (int b = 0; b < cfg.batch; ++b) {
      Rng r = iter_rng.split(static_cast<uint64_t>(b));
      opps[b] = init_policy(game, r);
    }
    auto batch_mean = [&](const Eigen::VectorXd& init) {
      double acc = 0;
      for (const auto& opp : opps) acc += traj_return(init, opp);
      return acc / cfg.batch;
    };
    if (objective_trace) objective_trace->push_back(batch_mean(phi0));
    Eigen::VectorXd grad(n);
    Eigen::VectorXd probe = phi0;
    for (int i = 0; i < n; ++i) {
      const double keep = probe[i];
      probe[i] = keep + cfg.fd_step;
      const double up = batch_mean(probe);
      probe[i] = keep - cfg.fd_step;
      const double dn = batch_mean(probe);
      probe[i] = keep;
      grad[i] = (up - dn) / (2 * cfg.fd_step);
    }
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad.cwiseProduct(grad);
    const double c1 = 1 - std::pow(b1, iter + 1), c2 = 1 - std::pow(b2, iter + 1);
    phi0 += cfg.adam_lr *
            ((m / c1).array() / ((v / c2).array().sqrt() + eps)).matrix();
  }
  return phi0;
}

PolicyParams labr_respond(const GameSpec& game, const PolicyParams& announced,
                          Agent announced_seat, int steps, double alpha, Rng& rng) {
  PolicyParams resp = init_policy(game, rng);
  const Agent seat = other(announced_seat);
  for (int k = 0; k < steps; ++k) resp = nl_step(game, resp, announced, alpha, seat);
  return resp;
}

ValuePair DynamicsTrace::mean_return() const {
  ValuePair acc;
  const size_t t_max = values.size();
  for (size_t t = 1; t < t_max; ++t) {
    acc.v_a += values[t].v_a;
    acc.v_b += values[t].v_b;
  }
  const double n = static_cast<double>(t_max > 1 ? t_max - 1 : 1);
  acc.v_a /= n;
  acc.v_b /= n;
  return acc;
}

DynamicsTrace run_learner_dynamics(const GameSpec& game, LearnerAlgo algo_a, LearnerAlgo algo_b,
                                   const PolicyParams& init_a, const PolicyParams& init_b,
                                   int steps, Rng* labr_rng_in) {
  if (algo_a == LearnerAlgo::kLabr && algo_b == LearnerAlgo::kLabr) {
    throw std::invalid_argument("run_learner_dynamics: labr vs labr is circular");
  }
  DynamicsTrace tr;
  tr.policy_a.reserve(steps + 1);
  tr.policy_b.reserve(steps + 1);
  tr.values.reserve(steps + 1);
  PolicyParams pa = init_a, pb = init_b;
  tr.policy_a.push_back(pa);
  tr.policy_b.push_back(pb);
  tr.values.push_back(game_value(game, pa, pb));

  // LABR inside these dynamics responds to the opponent's freshly updated
  // policy; it needs per-step randomness for its best-response inits.
  Rng labr_rng = labr_rng_in ? *labr_rng_in : Rng(fnv1a64(game.name) ^ 0x1abfull);

  auto update = [&](LearnerAlgo algo, const PolicyParams& own, const PolicyParams& opp,
                    Agent seat) -> PolicyParams {
    switch (algo) {
      case LearnerAlgo::kNaive:
      case LearnerAlgo::kMmaml:  // mmaml differs only in initialization
        return nl_step(game, own, opp, game.lr(seat), seat);
      case LearnerAlgo::kLola:
        return lola_step(game, own, opp, game.lr(seat), game.lr(other(seat)), seat);
      case LearnerAlgo::kLabr:
        break;  // handled after the simultaneous updates
    }
    return own;
  };

  for (int t = 0; t < steps; ++t) {
    PolicyParams na = update(algo_a, pa, pb, Agent::kA);
    PolicyParams nb = update(algo_b, pb, pa, Agent::kB);
    if (algo_a == LearnerAlgo::kLabr) {
      Rng r = labr_rng.split(static_cast<uint64_t>(t));
      na = labr_respond(game, nb, Agent::kB, 1000, game.lr_a, r);
    }
    if (algo_b == LearnerAlgo::kLabr) {
      Rng r = labr_rng.split(static_cast<uint64_t>(t) | 0x8000000000000000ull);
      nb = labr_respond(game, na, Agent::kA, 1000, game.lr_b, r);
    }
    pa = std::move(na);
    pb = std::move(nb);
    tr.policy_a.push_back(pa);
    tr.policy_b.push_back(pb);
    tr.values.push_back(game_value(game, pa, pb));
  }
  return tr;
}

void MmamlInit::save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "mfoslab.mmaml_init.v1";
  j["game"] = game;
  j["seed"] = seed;
  j["config"] = {{"meta_steps", config.meta_steps}, {"adam_lr", config.adam_lr},
                 {"batch", config.batch},           {"iters", config.iters},
                 {"fd_step", config.fd_step}};
  j["logits"] = std::vector<double>(logits.data(), logits.data() + logits.size());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

MmamlInit MmamlInit::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "mfoslab.mmaml_init.v1") {
    throw std::runtime_error(path + ": not an mmaml initializer file");
  }
  MmamlInit mi;
  mi.game = j.at("game").get<std::string>();
  mi.seed = j.at("seed").get<uint64_t>();
  mi.config.meta_steps = j.at("config").at("meta_steps").get<int>();
  mi.config.adam_lr = j.at("config").at("adam_lr").get<double>();
  mi.config.batch = j.at("config").at("batch").get<int>();
  mi.config.iters = j.at("config").at("iters").get<int>();
  mi.config.fd_step = j.at("config").at("fd_step").get<double>();
  const auto vec = j.at("logits").get<std::vector<double>>();
  mi.logits = Eigen::Map<const Eigen::VectorXd>(vec.data(), vec.size());
  return mi;
}

}  // namespace mfos
