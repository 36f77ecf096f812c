#include "ebv/eb_flatten.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ebv::eb {

const FlatVariable* FlatMachine::find_variable(const std::string& n) const {
  for (auto& v : variables)
    if (v.name == n) return &v;
  return nullptr;
}
const FlatEventChain* FlatMachine::find_chain(const std::string& leaf_event) const {
  for (auto& c : chains)
    if (c.leaf == leaf_event) return &c;
  return nullptr;
}

FlatMachine flatten(const EbModel& model, const std::string& machine) {
  const EbMachine* leaf = model.find_machine(machine);
  if (!leaf) throw Error("machine '" + machine + "' not found");

  FlatMachine fm;
  fm.name = leaf->name;
  fm.model = &model;

  // refinement chain, root first
  std::vector<const EbMachine*> chain;
  for (const EbMachine* m = leaf; m;
       m = m->refines ? model.find_machine(*m->refines) : nullptr)
    chain.push_back(m);
  std::reverse(chain.begin(), chain.end());

  // contexts seen anywhere in the chain, extends-closed, in resolve order
  {
    std::set<std::string> wanted;
    std::vector<std::string> work;
    for (auto* m : chain)
      for (auto& s : m->sees) work.push_back(s);
    while (!work.empty()) {
      std::string n = work.back();
      work.pop_back();
      if (!wanted.insert(n).second) continue;
      const EbContext* c = model.find_context(n);
      if (c && c->extends) work.push_back(*c->extends);
    }
    for (auto& c : model.contexts) {
      if (!wanted.count(c.name)) continue;
      for (auto& s : c.sets) fm.sets.push_back(s);
      for (auto& k : c.constants) fm.constants.push_back(k);
      for (auto& a : c.axioms) fm.axioms.push_back(a);
    }
  }

  // variables: walk root -> leaf tracking the live set; a name persists only
  // if every later machine re-declares it, and may not reappear once dropped
  {
    std::set<std::string> ever_dropped;
    std::map<std::string, const EbVariable*> live;  // name -> latest declaration
    std::map<std::string, int> live_origin;
    for (size_t ci = 0; ci < chain.size(); ci++) {
      const EbMachine* m = chain[ci];
      int mi = model.machine_index(m->name);
      std::set<std::string> declared;
      for (auto& v : m->variables) declared.insert(v.name);
      // names dropped at this step become abstract-only shadows
      for (auto it = live.begin(); it != live.end();) {
        if (!declared.count(it->first)) {
          FlatVariable fv;
          fv.name = it->first;
          fv.type = it->second->type;
          fv.type_expr = it->second->type_expr;
          fv.origin = live_origin[it->first];
          fv.concrete = false;
          fm.variables.push_back(fv);
          ever_dropped.insert(it->first);
          it = live.erase(it);
        } else {
          ++it;
        }
      }
      for (auto& v : m->variables) {
        if (ever_dropped.count(v.name))
          throw CompileError(v.pos, "variable '" + v.name +
                                        "' reappears after being dropped by a refinement");
        auto it = live.find(v.name);
        if (it != live.end() && !it->second->type->same(*v.type))
          throw CompileError(v.pos, "variable '" + v.name +
                                        "' changes type along the refinement chain");
        live[v.name] = &v;
        live_origin[v.name] = mi;
      }
    }
    // still-live names are the concrete state, in leaf declaration order
    std::vector<FlatVariable> shadows = std::move(fm.variables);
    fm.variables.clear();
    for (auto& v : leaf->variables) {
      FlatVariable fv;
      fv.name = v.name;
      fv.type = v.type;
      fv.type_expr = v.type_expr;
      fv.origin = model.machine_index(leaf->name);
      fv.concrete = true;
      fm.variables.push_back(fv);
    }
    for (auto& s : shadows) fm.variables.push_back(s);
  }

  // invariants, abstract to concrete, labels qualified with the machine name
  for (auto* m : chain) {
    int mi = model.machine_index(m->name);
    for (auto& inv : m->invariants) {
      FlatInvariant fi;
      fi.label = m->name + "_" + inv.label;
      fi.pred = inv.pred;
      fi.kind = inv.kind;
      fi.origin = mi;
      fm.invariants.push_back(fi);
    }
  }

  fm.init = leaf->init;
  fm.events = leaf->events;

  // event ancestry + witnessed abstract parameters
  for (auto& ev : leaf->events) {
    FlatEventChain fec;
    fec.leaf = ev.name;
    // walk upward: concrete event -> refined event -> ...
    std::vector<std::pair<int, const EbEvent*>> up;
    const EbMachine* m = leaf;
    const EbEvent* cur = &ev;
    up.push_back({model.machine_index(m->name), cur});
    while (cur->refines) {
      const EbMachine* am = m->refines ? model.find_machine(*m->refines) : nullptr;
      if (!am)
        throw CompileError(cur->pos, "event '" + cur->name +
                                         "' refines but the machine has no abstraction");
      const EbEvent* aev = nullptr;
      for (auto& pe : am->events)
        if (pe.name == *cur->refines) aev = &pe;
      if (!aev)
        throw CompileError(cur->pos, "refined event '" + *cur->refines + "' not found");
      up.push_back({model.machine_index(am->name), aev});
      m = am;
      cur = aev;
    }
    std::reverse(up.begin(), up.end());
    fec.levels = up;
    fm.chains.push_back(fec);

    // witnesses: level i+1 witnesses parameters of level i
    for (size_t li = 0; li + 1 < up.size(); li++) {
      const EbEvent* aev = up[li].second;
      const EbEvent* rev = up[li + 1].second;
      const std::string abs_mac = model.machines[up[li].first].name;
      for (auto& w : rev->witnesses) {
        int api = -1;
        for (size_t i = 0; i < aev->params.size(); i++)
          if (aev->params[i] == w.label) api = (int)i;
        if (api < 0) continue;  // typechecker already rejected strays
        FlatAbstractParam fp;
        fp.event = ev.name;
        fp.param = w.label;
        fp.name = abs_mac + "_" + aev->name + "_" + w.label;
        fp.type = aev->param_types[api];
        fp.witness = w.pred;
        fp.witness_label = w.label;
        fp.abs_machine = up[li].first;
        fp.abs_event = aev->name;
        fp.level = (int)li;
        fm.abs_params.push_back(fp);
      }
    }
  }

  return fm;
}

}  // namespace ebv::eb
