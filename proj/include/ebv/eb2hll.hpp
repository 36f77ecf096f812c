#pragma once

// Translation of a flattened state machine into the dataflow IR.
//
// The emitted model has three namespaces:
//   <machine>            the scheduled system: one GRD_<event> / SEL_<event>
//                        pair per event and an I()/X() definition pair per
//                        variable (first enabled event wins, stutter if none)
//   <machine>_contracts  the environment interface: symbolic constants with
//                        their axioms, uninterpreted blocks for external
//                        functions with contracts extracted from the axioms,
//                        and one free input stream per event parameter with
//                        its typing guards as assumed constraints
//   <machine>_verif      shadow streams for abstract-level variables and
//                        witnessed parameters, gluing/witness constraints
//                        binding them to the concrete state, and the proof
//                        obligations (typing, safety, well-definedness,
//                        deadlock-freeness)
//
// Sets are represented by their characteristic arrays: a variable v ⊆ S
// becomes a bool array indexed by the element space of S (carrier ordinals,
// or value - lo for bounded integer elements).  Relations get one dimension
// per component.  Enumerated carriers (a partition axiom of singleton
// constants) pin their constants to ordinal values.

#include <string>
#include <utility>
#include <vector>

#include "ebv/eb_ast.hpp"
#include "ebv/hll_ast.hpp"

namespace ebv {

struct TranslationConfig {
  // storage width used for variables typed over unbounded INT / NAT
  int int_width = 8;
  // Obligation: every integer assignment gets a proof obligation that the
  // value fits the declared range (storage wrap is then provably absent).
  // Wrap: no fit obligations; assignments wrap into the storage window.
  enum class Overflow { Obligation, Wrap } overflow = Overflow::Obligation;
  // echoed into the manifest
  std::string source;
};

// One event parameter turned into a free input stream.
struct ParamInput {
  std::string stream;
  std::string event;
  std::string param;
};

struct Translation {
  hll::HllModel model;  // elaborated
  std::string machine;
  std::string ns_system, ns_contracts, ns_verification;
  int id_system = -1, id_contracts = -1, id_verification = -1;

  std::string manifest;  // key: value interface description, stable order
  std::vector<ParamInput> params;
  std::vector<std::string> external_events;  // excluded from equivalence scope
  std::vector<std::string> warnings;

  // (filename, content): the three namespace files plus the manifest
  std::vector<std::pair<std::string, std::string>> files() const;
};

Translation translate(const eb::FlatMachine& fm, const TranslationConfig& cfg);

}  // namespace ebv
