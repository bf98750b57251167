#include "expforge/divergence.hpp"

#include "expforge/errors.hpp"

namespace expforge {

double entropy(const Distribution& q) { return kernel::entropy(q.probs()); }

double entropy_cond(const ConditionalFamily& g, const Distribution& state_dist) {
    if (state_dist.size() != g.num_states()) throw InputError("state distribution size does not match family");
    double h = 0.0;
    for (std::size_t s = 0; s < g.num_states(); ++s) {
        if (state_dist[s] > 0.0) h += state_dist[s] * kernel::entropy(g.row(s).probs());
    }
    return h;
}

double kl_divergence(const Distribution& q, const Distribution& g) {
    if (q.size() != g.size()) throw InputError("distributions have different sizes");
    return kernel::kl_divergence(q.probs(), g.probs());
}

double kl_divergence_cond(const ConditionalFamily& g, const ConditionalFamily& gm,
                          const Distribution& state_dist) {
    if (g.num_states() != gm.num_states() || g.alphabet_size() != gm.alphabet_size() ||
        state_dist.size() != g.num_states())
        throw InputError("conditional divergence dimensions disagree");
    return kernel::kl_divergence_cond(g.matrix(), gm.matrix(), state_dist.probs());
}

}  // namespace expforge
