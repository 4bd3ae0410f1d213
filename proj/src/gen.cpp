#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "hb/harness.hpp"

namespace hb {

namespace {

const std::vector<ClassName> kClasses = {"A", "B", "C"};
const std::vector<MethodName> kMethods = {"m", "n", "p"};
const std::vector<VarName> kVars = {"x", "y", "z"};

// Two regimes: a straight-line regime that stays inside the top-level
// fragment the checker accepts under an empty table (no calls, reads only
// of assigned variables), and a call-heavy regime that exercises method
// entry, blame and cache traffic. Weights tuned so well over 30% of
// programs pass the top-level check.
class ProgramGen {
 public:
  ProgramGen(std::uint64_t seed, int size)
      : rng_(seed), budget_(std::max(1, size)) {}

  ExprPtr gen() {
    safe_mode_ = pct(45);
    std::vector<ExprPtr> stmts;
    while (budget_ > 0) {
      if (safe_mode_)
        stmts.push_back(safe_stmt());
      else
        rich_stmts(stmts);
    }
    if (!safe_mode_ && pct(35)) mutate(stmts);
    if (stmts.empty()) stmts.push_back(make_nil());
    ExprPtr p = stmts.back();
    for (size_t i = stmts.size() - 1; i-- > 0;) p = make_seq(stmts[i], p);
    return p;
  }

 private:
  std::mt19937_64 rng_;
  int budget_;
  bool safe_mode_ = false;
  std::map<VarName, ValType> bound_;  // safe mode: assigned so far, with types
  std::set<MethodKey> typed_, defined_, called_;
  std::map<MethodKey, MethType> decl_types_;
  std::set<VarName> assigned_;  // rich mode: names assigned so far

  std::uint64_t u(std::uint64_t n) { return rng_() % n; }
  bool pct(int p) { return u(100) < static_cast<std::uint64_t>(p); }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[u(xs.size())];
  }
  void spend(int n) { budget_ -= n; }

  MethodKey random_key() { return MethodKey{pick(kClasses), pick(kMethods)}; }

  MethodKey pick_from(const std::set<MethodKey>& s) {
    auto it = s.begin();
    std::advance(it, u(s.size()));
    return *it;
  }

  // ---- safe regime ----

  struct Typed {
    ExprPtr e;
    ValType t;
  };

  Typed pure(int depth) {
    spend(1);
    std::uint64_t r = u(100);
    if (r < 30) return {make_nil(), ValType::nil_type()};
    if (r < 60) {
      ClassName c = pick(kClasses);
      return {make_new(c), ValType::of_class(c)};
    }
    if (r < 85 && !bound_.empty()) {
      auto it = bound_.begin();
      std::advance(it, u(bound_.size()));
      return {make_var(it->first), it->second};
    }
    if (depth > 0) {
      ValType t = pct(40) ? ValType::nil_type() : ValType::of_class(pick(kClasses));
      ExprPtr g = pure(depth - 1).e;
      return {make_if(std::move(g), pure_of(t, depth - 1), pure_of(t, depth - 1)), t};
    }
    return {make_nil(), ValType::nil_type()};
  }

  ExprPtr pure_of(const ValType& t, int depth) {
    spend(1);
    ExprPtr base = t.is_nil() ? make_nil() : make_new(*t.cls);
    if (depth > 0 && pct(25)) return make_seq(pure(depth - 1).e, std::move(base));
    return base;
  }

  ExprPtr safe_stmt() {
    spend(2);
    std::uint64_t r = u(100);
    if (r < 30) {
      VarName v = pick(kVars);
      Typed rhs = pure(2);
      bound_[v] = rhs.t;
      return make_assign(v, rhs.e);
    }
    if (r < 55) return gen_def();
    if (r < 75) return gen_type_decl();
    if (r < 90) {
      ValType t = pct(40) ? ValType::nil_type() : ValType::of_class(pick(kClasses));
      return make_if(pure(1).e, pure_of(t, 1), pure_of(t, 1));
    }
    return pure(1).e;
  }

  // ---- call-heavy regime ----

  ExprPtr gen_def() {
    MethodKey key = (!typed_.empty() && pct(40))
                        ? pick_from(typed_)
                        : random_key();
    VarName param = pick(kVars);
    ExprPtr body = gen_body(3, param, key);
    defined_.insert(key);
    spend(1);
    return make_def(key.cls, key.meth, param, std::move(body));
  }

  ExprPtr gen_type_decl() {
    MethodKey key = random_key();
    if (pct(60)) {
      std::set<MethodKey> untyped;
      for (const auto& k : defined_)
        if (!typed_.count(k)) untyped.insert(k);
      if (!untyped.empty()) key = pick_from(untyped);
    }
    ValType dom = pct(50) ? ValType::nil_type() : ValType::of_class(pick(kClasses));
    ValType rng = pct(50) ? ValType::nil_type() : ValType::of_class(pick(kClasses));
    typed_.insert(key);
    decl_types_[key] = MethType{dom, rng};
    spend(1);
    return make_type_decl(key.cls, key.meth, MethType{dom, rng});
  }

  ExprPtr gen_body(int depth, const VarName& param, const MethodKey& self_key) {
    spend(1);
    std::uint64_t r = u(100);
    if (depth == 0 || budget_ < -10) {
      switch (u(4)) {
        case 0: return make_var(param);
        case 1: return make_nil();
        case 2: return make_self();
        default: return make_new(pick(kClasses));
      }
    }
    if (r < 15) return make_var(param);
    if (r < 25) return make_nil();
    if (r < 33) return make_self();
    if (r < 43) return make_new(pick(kClasses));
    if (r < 53)
      return make_assign(pick(kVars), gen_body(depth - 1, param, self_key));
    if (r < 68)
      return make_seq(gen_body(depth - 1, param, self_key),
                      gen_body(depth - 1, param, self_key));
    if (r < 78)
      return make_if(gen_body(depth - 1, param, self_key),
                     gen_body(depth - 1, param, self_key),
                     gen_body(depth - 1, param, self_key));
    // method call; occasionally on self's own method (recursion)
    ExprPtr recv;
    MethodName meth;
    if (pct(30)) {
      recv = make_self();
      meth = pct(25) ? self_key.meth : pick(kMethods);
    } else {
      MethodKey key = (!typed_.empty() && pct(60)) ? pick_from(typed_) : random_key();
      recv = make_new(key.cls);
      meth = key.meth;
    }
    ExprPtr arg = pct(50) ? make_var(param)
                          : (pct(50) ? ExprPtr(make_nil()) : make_new(pick(kClasses)));
    return make_call(std::move(recv), meth, std::move(arg));
  }

  std::set<MethodKey> ready_keys() const {
    std::set<MethodKey> ready;
    for (const auto& k : typed_)
      if (defined_.count(k)) ready.insert(k);
    return ready;
  }

  ExprPtr call_arg() {
    switch (u(3)) {
      case 0: return make_nil();
      case 1: return make_new(pick(kClasses));
      default:
        if (!assigned_.empty()) {
          auto it = assigned_.begin();
          std::advance(it, u(assigned_.size()));
          return make_var(*it);
        }
        return make_nil();
    }
  }

  ExprPtr call_of(const MethodKey& key) {
    spend(2);
    called_.insert(key);
    ExprPtr arg;
    auto decl = decl_types_.find(key);
    if (decl != decl_types_.end() && pct(75)) {
      const ValType& dom = decl->second.dom;
      arg = dom.is_nil() || pct(35) ? ExprPtr(make_nil()) : make_new(*dom.cls);
    } else {
      arg = call_arg();
    }
    return make_call(make_new(key.cls), key.meth, std::move(arg));
  }

  ExprPtr gen_call_expr(int depth) {
    spend(2);
    std::set<MethodKey> ready = ready_keys();
    if (!ready.empty() && pct(80)) return call_of(pick_from(ready));
    ExprPtr recv;
    MethodName meth;
    if (depth > 0 && pct(20)) {
      recv = gen_call_expr(depth - 1);
      meth = pick(kMethods);
    } else if (!assigned_.empty() && pct(35)) {
      auto it = assigned_.begin();
      std::advance(it, u(assigned_.size()));
      recv = make_var(*it);
      meth = pick(kMethods);
    } else if (pct(6)) {
      recv = make_nil();
      meth = pick(kMethods);
    } else {
      MethodKey key = random_key();
      called_.insert(key);
      recv = make_new(key.cls);
      meth = key.meth;
    }
    return make_call(std::move(recv), meth, call_arg());
  }

  // One step of the call-heavy regime; may emit several statements so
  // that define/annotate/call groupings actually reach method entry.
  void rich_stmts(std::vector<ExprPtr>& out) {
    spend(2);
    std::uint64_t r = u(100);
    if (r < 18) {
      // define, annotate, then call the same method
      MethodKey key = random_key();
      VarName param = pick(kVars);
      out.push_back(make_def(key.cls, key.meth, param, gen_body(3, param, key)));
      defined_.insert(key);
      ValType dom = pct(50) ? ValType::nil_type() : ValType::of_class(pick(kClasses));
      ValType rng = pct(50) ? ValType::nil_type() : ValType::of_class(pick(kClasses));
      typed_.insert(key);
      decl_types_[key] = MethType{dom, rng};
      out.push_back(make_type_decl(key.cls, key.meth, MethType{dom, rng}));
      out.push_back(call_of(key));
      return;
    }
    if (r < 30) {
      out.push_back(gen_def());
      return;
    }
    if (r < 42) {
      out.push_back(gen_type_decl());
      return;
    }
    if (r < 54) {
      // call a method called before: cache traffic
      if (!called_.empty()) {
        out.push_back(call_of(pick_from(called_)));
        return;
      }
      out.push_back(gen_call_expr(1));
      return;
    }
    if (r < 64) {
      // redefine something already in play, then call it again
      std::set<MethodKey> ready = ready_keys();
      if (!ready.empty()) {
        MethodKey key = pick_from(ready);
        VarName param = pick(kVars);
        out.push_back(make_def(key.cls, key.meth, param, gen_body(2, param, key)));
        out.push_back(call_of(key));
        return;
      }
      out.push_back(gen_call_expr(1));
      return;
    }
    if (r < 76) {
      out.push_back(gen_call_expr(1));
      return;
    }
    if (r < 88) {
      VarName v = pick(kVars);
      assigned_.insert(v);
      ExprPtr rhs = pct(50) ? gen_call_expr(0) : pure(1).e;
      out.push_back(make_assign(v, std::move(rhs)));
      return;
    }
    if (r < 96) {
      out.push_back(make_if(pct(50) ? gen_call_expr(0) : pure(1).e, pure(1).e,
                            pure(1).e));
      return;
    }
    out.push_back(pure(1).e);
  }

  // Reorders and removes declarations to enrich the blame corpus.
  void mutate(std::vector<ExprPtr>& stmts) {
    int rounds = 1 + static_cast<int>(u(2));
    for (int i = 0; i < rounds && !stmts.empty(); ++i) {
      switch (u(4)) {
        case 0:
          remove_kind(stmts, ExprKind::TypeDecl);
          break;
        case 1:
          remove_kind(stmts, ExprKind::Def);
          break;
        case 2: {
          if (stmts.size() < 2) break;
          size_t a = u(stmts.size() - 1);
          std::swap(stmts[a], stmts[a + 1]);
          break;
        }
        case 3: {
          std::vector<size_t> idx;
          for (size_t j = 0; j < stmts.size(); ++j)
            if (stmts[j]->kind == ExprKind::TypeDecl) idx.push_back(j);
          if (idx.empty()) break;
          size_t j = idx[u(idx.size())];
          ValType dom = pct(50) ? ValType::nil_type() : ValType::of_class(pick(kClasses));
          ValType rng = pct(50) ? ValType::nil_type() : ValType::of_class(pick(kClasses));
          stmts[j] = make_type_decl(stmts[j]->cls, stmts[j]->meth, MethType{dom, rng});
          break;
        }
      }
    }
  }

  void remove_kind(std::vector<ExprPtr>& stmts, ExprKind kind) {
    std::vector<size_t> idx;
    for (size_t j = 0; j < stmts.size(); ++j)
      if (stmts[j]->kind == kind) idx.push_back(j);
    if (idx.empty()) return;
    stmts.erase(stmts.begin() + static_cast<long>(idx[u(idx.size())]));
  }
};

}  // namespace

ExprPtr gen_program(std::uint64_t seed, int size) {
  return ProgramGen(seed, size).gen();
}

}  // namespace hb
