#pragma once

// Collapses a refinement chain onto its most concrete machine: concrete
// events and state, ancestor variables as shadow entries, every invariant
// of the chain, and the witnessed abstract parameters of each event.

#include "ebv/eb_ast.hpp"

namespace ebv::eb {

FlatMachine flatten(const EbModel& model, const std::string& machine);

}  // namespace ebv::eb
