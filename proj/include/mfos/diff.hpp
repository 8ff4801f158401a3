#ifndef MFOS_DIFF_HPP
#define MFOS_DIFF_HPP

#include "mfos/games.hpp"

namespace mfos {

using Gradient = Eigen::VectorXd;
using CrossHessian = Eigen::MatrixXd;

// Exact derivative of the selected agent's normalized value with respect to
// the selected agent's logits. Iterated mode differentiates the resolvent,
//   d(I-gP)^{-1} = g (I-gP)^{-1} dP (I-gP)^{-1},
// with the sigmoid Jacobian folded in; one-shot mode differentiates the
// bilinear form.
Gradient value_grad(const GameSpec& game, const PolicyParams& policy_a,
                    const PolicyParams& policy_b, Agent value_of, Agent wrt);

// Exact mixed second derivative d^2 v / d(logits_a) d(logits_b) of the
// selected agent's value, shape len_a x len_b.
CrossHessian value_cross_hessian(const GameSpec& game, const PolicyParams& policy_a,
                                 const PolicyParams& policy_b, Agent value_of);

// Central-difference oracle, per coordinate (v(l+h) - v(l-h)) / 2h.
Gradient fd_grad(const GameSpec& game, const PolicyParams& policy_a,
                 const PolicyParams& policy_b, Agent value_of, Agent wrt, double h = 1e-4);

}  // namespace mfos

#endif
