#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <set>

#include "p2s/transpiler/transpiler.hpp"

namespace p2s::transpiler {

namespace {

bool has_loop(const std::vector<Stmt>& body) {
  bool found = false;
  walk_stmts(body, [&](const Stmt& s) { found = found || s.kind == Stmt::Kind::kFor; });
  return found;
}

std::optional<std::int64_t> trip_count(const Stmt& loop) {
  auto lo = fold_int(loop.exprs[0]);
  auto hi = fold_int(loop.exprs[1]);
  if (!lo || !hi) return std::nullopt;
  return std::max<std::int64_t>(0, *hi - *lo);
}

void arrays_in(const std::vector<Stmt>& body, std::set<std::string>& out) {
  auto visit = [&](const Expr& e) {
    walk_expr(e, [&](const Expr& x) {
      if (x.kind == Expr::Kind::kIndex) out.insert(x.name);
    });
  };
  walk_stmts(body, [&](const Stmt& s) {
    if (s.kind == Stmt::Kind::kStore) out.insert(s.name);
    for (const auto& e : s.exprs) visit(e);
  });
}

struct Walker {
  const DirectivePolicy& policy;
  std::vector<Directive> loops;
  std::map<std::string, int> partition;  // array -> factor

  void run(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (s.kind == Stmt::Kind::kFor) {
        auto trip = trip_count(s);
        if (trip && *trip >= 1 && *trip <= policy.max_unroll_trip) {
          Directive d;
          d.kind = Directive::Kind::kUnroll;
          d.target = s.loop_id;
          d.factor = static_cast<int>(*trip);
          loops.push_back(d);
          std::set<std::string> arrays;
          arrays_in(s.body, arrays);
          for (const auto& a : arrays) partition[a] = std::max(partition[a], d.factor);
        } else if (!has_loop(s.body)) {
          Directive d;
          d.kind = Directive::Kind::kPipeline;
          d.target = s.loop_id;
          d.ii = policy.pipeline_ii;
          loops.push_back(d);
        }
      }
      run(s.body);
      run(s.orelse);
    }
  }
};

void validate(const Directive& d, const KernelIR& k) {
  bool ok = false;
  if (d.kind == Directive::Kind::kArrayPartition) {
    ok = std::any_of(k.params.begin(), k.params.end(),
                     [&](const Param& p) { return p.name == d.target && p.type.is_array(); });
  } else {
    walk_stmts(k.body, [&](const Stmt& s) { ok = ok || (s.kind == Stmt::Kind::kFor && s.loop_id == d.target); });
  }
  if (!ok) throw InvalidDirectiveTarget(d.target);
  if (d.ii < 1 || d.factor < 1 || d.dim < 1) {
    throw ConfigError(fmt::format("directive {} on {} needs positive parameters", to_string(d.kind), d.target));
  }
}

}  // namespace

KernelIR annotate(const KernelIR& kernel, const DirectivePolicy& policy) {
  if (policy.pipeline_ii < 1) throw ConfigError("pipeline_ii must be positive");
  KernelIR out = kernel;
  out.directives.clear();
  if (policy.defaults) {
    Walker w{policy, {}, {}};
    w.run(kernel.body);
    out.directives = std::move(w.loops);
    // Partitions follow parameter order.
    for (const auto& p : kernel.params) {
      auto it = w.partition.find(p.name);
      if (it == w.partition.end() || !p.type.is_array() || it->second < 2) continue;
      Directive d;
      d.kind = Directive::Kind::kArrayPartition;
      d.target = p.name;
      d.factor = it->second;
      d.dim = 1;
      d.style = PartitionStyle::kCyclic;
      out.directives.push_back(d);
    }
  }
  for (const auto& o : policy.overrides) {
    validate(o, kernel);
    auto same = std::find_if(out.directives.begin(), out.directives.end(),
                             [&](const Directive& d) { return d.kind == o.kind && d.target == o.target; });
    if (same != out.directives.end()) {
      *same = o;
    } else {
      out.directives.push_back(o);
    }
  }
  return out;
}

}  // namespace p2s::transpiler
