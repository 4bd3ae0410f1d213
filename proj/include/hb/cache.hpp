#pragma once

#include <map>

#include "hb/ast.hpp"
#include "hb/typecheck.hpp"

namespace hb {

// Evidence that a method body type checked: the inputs and outputs of the
// derivation plus the table it was built against. Replaying the checker
// on these fields reproduces the derivation.
struct CacheEntry {
  MethType method_type;      // the arrow type the body was checked under
  Premethod body;            // the exact premethod checked
  ValType result_type;       // checked type of the body
  DepSet deps;               // keys the derivation applied TApp with
  TypeTable table_snapshot;  // the TT the derivation was built against
};

struct Cache {
  std::map<MethodKey, CacheEntry> entries;

  bool operator==(const Cache&) const = delete;
};

const CacheEntry* lookup(const Cache& x, const MethodKey& key);

Cache store(Cache x, const MethodKey& key, CacheEntry entry);

// Removes the entry keyed by `key` and every entry whose deps contain
// `key`. Surviving entries are untouched. `removed`, when given, receives
// the number of dropped entries.
Cache invalidate(Cache x, const MethodKey& key, int* removed = nullptr);

// Replaces every entry's table snapshot with tt_new. Keys, bodies, types
// and deps are unchanged.
Cache upgrade(Cache x, const TypeTable& tt_new);

// Cache consistency: every entry's body is the one installed in dt, its
// arrow type is the one in tt, replaying the checker on the snapshot
// reproduces (result_type, deps), and result_type <= declared range.
bool consistent(const Cache& x, const TypeTable& tt, const DynClassTable& dt);

}  // namespace hb
