#include "hb/cache.hpp"

namespace hb {

const CacheEntry* lookup(const Cache& x, const MethodKey& key) {
  auto it = x.entries.find(key);
  return it == x.entries.end() ? nullptr : &it->second;
}

Cache store(Cache x, const MethodKey& key, CacheEntry entry) {
  x.entries.insert_or_assign(key, std::move(entry));
  return x;
}

Cache invalidate(Cache x, const MethodKey& key, int* removed) {
  int dropped = 0;
  for (auto it = x.entries.begin(); it != x.entries.end();) {
    if (it->first == key || it->second.deps.count(key)) {
      it = x.entries.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  if (removed) *removed = dropped;
  return x;
}

Cache upgrade(Cache x, const TypeTable& tt_new) {
  for (auto& [key, entry] : x.entries) entry.table_snapshot = tt_new;
  return x;
}

bool consistent(const Cache& x, const TypeTable& tt, const DynClassTable& dt) {
  for (const auto& [key, entry] : x.entries) {
    auto dt_it = dt.find(key);
    if (dt_it == dt.end() || !premethod_equal(dt_it->second, entry.body)) return false;
    auto tt_it = tt.find(key);
    if (tt_it == tt.end() || !(tt_it->second == entry.method_type)) return false;
    TypeEnv body_env{{entry.body.param, entry.method_type.dom},
                     {kSelfName, ValType::of_class(key.cls)}};
    auto replay = try_typecheck(entry.table_snapshot, body_env, *entry.body.body);
    if (!replay) return false;
    if (!(replay->type == entry.result_type) || replay->deps != entry.deps) return false;
    if (!subtype(entry.result_type, entry.method_type.rng)) return false;
  }
  return true;
}

}  // namespace hb
