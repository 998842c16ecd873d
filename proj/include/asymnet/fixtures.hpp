#pragma once

#include <string>
#include <vector>

#include "asymnet/core.hpp"
#include "asymnet/io.hpp"
#include "asymnet/multinet.hpp"
#include "asymnet/simnet.hpp"

/// The secured-building models: a guard tells workers, executives, visitors
/// and spies apart from gender (g), badge (b) and limousine (l) clues.
namespace asymnet::fixtures {

/// h in {worker, visitor, spy} with h -> g, h -> b, g -> b.
DiscreteNetwork building_network();

/// The same distribution as a multinet over {visitor, spy} and {worker}.
Multinet building_multinet();

/// Four hypotheses {spy, visitor, worker, executive} plus the limousine clue,
/// as a multinet over {spy, visitor} and {worker, executive}.
Multinet limousine_multinet();

/// The same distribution as a similarity network over the chain cover
/// {spy, visitor}, {visitor, worker}, {worker, executive}.
SimilarityNetwork limousine_simnet();

/// Chain cover over {spy, visitor, worker, executive} whose local networks
/// hold only h, with p(spy | {s,v}) = a, p(visitor | {v,w}) = b, p(worker | {w,e}) = c.
SimilarityNetwork chain_cover_simnet(double a, double b, double c);

/// Two people approaching: h1 -> h2, per-person gender and badge clues, and
/// a conversation node c that only pairs of workers produce.
DiscreteNetwork pair_network();

/// pair_network as a generalized similarity network over the cover
/// {(s,s),(v,s),(s,v),(v,v)}, {(v,v),(w,v),(v,w),(w,w)}, {(s,s),(s,w),(w,s)}.
SimilarityNetwork pair_simnet();

/// A-priori factors r1 (economy) and r2 (military report) -> h -> clues f1, f2, f3.
DiscreteNetwork staged_network();

/// The r1, r2 -> h part of staged_network.
DiscreteNetwork staged_prior_network();

/// The h -> f1, f2, f3 part as a multinet over {visitor, spy} and {worker},
/// with priors equal to staged_prior_network's unconditioned marginal.
Multinet staged_clue_multinet();

/// Names accepted by document() and the CLI's `fixture` command.
std::vector<std::string> names();

/// The named model wrapped as a document. Unknown names throw ContractViolation.
ModelDocument document(const std::string& name);

}  // namespace asymnet::fixtures
