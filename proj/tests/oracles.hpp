#pragma once

// Independent reference implementations used only by the test suite. They
// share no contraction code with the library: the Heisenberg oracle works in
// the unfolded 2^L state space, and the direct B_k oracle contracts the
// folded gate with pairing states instead of running the Kraus channel.

#include <vector>

#include "otoc/folded.hpp"
#include "otoc/gate.hpp"

namespace otoc_test {

// OTOC tr[sa(t) sb sa(t) sb] / 2^L for a q=2 brickwork circuit, by dense
// Heisenberg evolution of sa on an L-site chain that covers the causal cone
// (L = t + max(x,t) + 1, sa at site t, sb at site t + x). Rows are layers of
// the same gate on bonds of alternating offset; row 0 starts at bond offset 0
// when row0_even is true, else at offset 1.
double heisenberg_otoc(const otoc::Gate& g, const otoc::Matrix& sigma_alpha,
                       const otoc::Matrix& sigma_beta, int x, int t,
                       bool row0_even);

// B_k by direct contraction of the folded gate: close its legs with the bare
// pairing states to form the q^4 x q^4 hopping matrix, then take the k-th
// power between a circle and a square, normalized by q^{k+1}.
double bk_direct(const otoc::Gate& g, int k);

}  // namespace otoc_test
