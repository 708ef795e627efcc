#include "genjoin/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "genjoin/errors.hpp"
#include "genjoin/rng.hpp"
#include "genjoin/textio.hpp"

namespace genjoin {

namespace {

double sort_penalty(double card) { return 0.1 * card * std::log2(std::max(card, 1.0)); }

// Candidate kinds per table subset. IndexLeaf plans exist only for
// singletons and may feed only a MergeJoin or the inner of a NestedLoop.
enum Kind { kUnsorted = 0, kSorted = 1, kIndexLeaf = 2 };

struct Cand {
  double cost;
  double card;
  PlanPtr plan;
};

// Pareto insert on (cost, card): dominated candidates never win upstream
// because every parent cost term is nondecreasing in both child cost and
// child cardinality.
void insert_cand(std::vector<Cand>& list, Cand c) {
  for (const Cand& e : list)
    if (e.cost <= c.cost && e.card <= c.card) return;
  std::erase_if(list, [&](const Cand& e) { return c.cost <= e.cost && c.card <= e.card; });
  list.push_back(std::move(c));
}

struct QueryContext {
  std::vector<std::string> tables;           // canonical order
  std::vector<double> rows;                  // base row counts
  std::vector<double> sel;                   // per-table filter selectivity
  std::vector<std::pair<int, int>> joins;    // as table indices (a < b)

  int index_of(const std::string& name) const {
    auto it = std::lower_bound(tables.begin(), tables.end(), name);
    if (it == tables.end() || *it != name)
      throw std::invalid_argument("table not in query: " + name);
    return static_cast<int>(it - tables.begin());
  }
};

QueryContext make_context(const SchemaGraph& schema, const QuerySpec& query, SelKind kind) {
  query.validate(schema);
  QueryContext ctx;
  ctx.tables = query.tables();
  if (ctx.tables.size() > 24)
    throw std::invalid_argument("query too large for exhaustive DP (> 24 tables)");
  for (const std::string& t : ctx.tables) {
    ctx.rows.push_back(static_cast<double>(schema.table(t).row_count));
    ctx.sel.push_back(kind == SelKind::Estimated ? query.est_sel(t) : query.true_sel(t));
  }
  for (const Edge& e : query.joins)
    ctx.joins.emplace_back(ctx.index_of(e.a), ctx.index_of(e.b));
  return ctx;
}

double join_node_cost(JoinType type, double left_card, double right_card,
                      bool left_sorted, bool right_sorted, bool right_is_index_leaf,
                      double right_leaf_rows) {
  switch (type) {
    case JoinType::HashJoin:
      return 1.2 * right_card + left_card;
    case JoinType::MergeJoin:
      return left_card + right_card + (left_sorted ? 0.0 : sort_penalty(left_card)) +
             (right_sorted ? 0.0 : sort_penalty(right_card));
    case JoinType::NestedLoop:
      if (right_is_index_leaf) return left_card + left_card * std::log2(right_leaf_rows);
      return left_card * right_card;
  }
  return 0.0;
}

struct CostedNode {
  double total_cost;
  double card;
  bool sorted;         // IndexScan leaf or MergeJoin output
  bool is_index_leaf;
};

CostedNode cost_tree(const QueryContext& ctx, const PlanNode& node) {
  if (node.is_leaf()) {
    int i = ctx.index_of(node.table);
    double card = ctx.sel[i] * ctx.rows[i];
    if (node.scan == ScanType::SeqScan) return {ctx.rows[i], card, false, false};
    return {std::log2(ctx.rows[i]) + ctx.sel[i] * ctx.rows[i], card, true, true};
  }
  CostedNode l = cost_tree(ctx, *node.left);
  CostedNode r = cost_tree(ctx, *node.right);
  double right_rows = node.right->is_leaf()
                          ? ctx.rows[ctx.index_of(node.right->table)]
                          : 0.0;
  double own = join_node_cost(node.join, l.card, r.card, l.sorted, r.sorted,
                              r.is_index_leaf, right_rows);
  int u = ctx.index_of(node.edge.left);
  int v = ctx.index_of(node.edge.right);
  double card = l.card * r.card / std::max(ctx.rows[u], ctx.rows[v]);
  return {l.total_cost + r.total_cost + own, card, node.join == JoinType::MergeJoin, false};
}

}  // namespace

std::string to_string(JoinType t) {
  switch (t) {
    case JoinType::HashJoin: return "HJ";
    case JoinType::MergeJoin: return "MJ";
    case JoinType::NestedLoop: return "NL";
  }
  return "?";
}

std::string to_string(ScanType t) {
  return t == ScanType::SeqScan ? "Seq" : "Idx";
}

double ExecutionSample::mean() const {
  return std::accumulate(durations.begin(), durations.end(), 0.0) /
         static_cast<double>(durations.size());
}

double ExecutionSample::stddev() const {
  double m = mean();
  double acc = 0.0;
  for (double d : durations) acc += (d - m) * (d - m);
  return std::sqrt(acc / static_cast<double>(durations.size() - 1));
}

PlanTree optimize(const SchemaGraph& schema, const QuerySpec& query, const HintSet* hints) {
  QueryContext ctx = make_context(schema, query, SelKind::Estimated);
  const int n = static_cast<int>(ctx.tables.size());

  if (hints) {
    for (const auto& [pair, type] : hints->hints) {
      Edge e(pair.left, pair.right);
      if (!query.participates(e))
        throw InvalidHintError("hinted pair (" + pair.left + ", " + pair.right +
                               ") is not a query edge");
    }
    for (const Edge& e : query.joins) {
      if (!hints->hints.count({e.a, e.b}) && !hints->hints.count({e.b, e.a}))
        throw std::invalid_argument("hint set covers edge " + e.a + "-" + e.b +
                                    " in neither direction");
    }
  }

  const std::uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1u);
  std::vector<std::array<std::vector<Cand>, 3>> best(full + 1);

  for (int i = 0; i < n; ++i) {
    double card = ctx.sel[i] * ctx.rows[i];
    auto seq = std::make_shared<PlanNode>();
    seq->scan = ScanType::SeqScan;
    seq->table = ctx.tables[i];
    seq->est_cost = ctx.rows[i];
    seq->est_card = card;
    best[1u << i][kUnsorted].push_back({seq->est_cost, card, seq});

    auto idx = std::make_shared<PlanNode>();
    idx->scan = ScanType::IndexScan;
    idx->table = ctx.tables[i];
    idx->est_cost = std::log2(ctx.rows[i]) + card;
    idx->est_card = card;
    best[1u << i][kIndexLeaf].push_back({idx->est_cost, card, idx});
  }

  int states = n;

  auto try_combine = [&](std::uint32_t lmask, std::uint32_t rmask, int u, int v,
                         JoinType type, std::uint32_t smask) {
    const auto& lcands = best[lmask];
    const auto& rcands = best[rmask];
    double denom = std::max(ctx.rows[u], ctx.rows[v]);
    for (int lk : {kUnsorted, kSorted, kIndexLeaf}) {
      if (lk == kIndexLeaf && type != JoinType::MergeJoin) continue;
      for (int rk : {kUnsorted, kSorted, kIndexLeaf}) {
        if (rk == kIndexLeaf && type == JoinType::HashJoin) continue;
        for (const Cand& lc : lcands[lk]) {
          for (const Cand& rc : rcands[rk]) {
            bool right_index_leaf = (rk == kIndexLeaf);
            double right_rows = right_index_leaf ? ctx.rows[ctx.index_of(rc.plan->table)] : 0.0;
            double own = join_node_cost(type, lc.card, rc.card,
                                        lk != kUnsorted, rk != kUnsorted,
                                        right_index_leaf, right_rows);
            auto node = std::make_shared<PlanNode>();
            node->join = type;
            node->edge = {ctx.tables[u], ctx.tables[v]};
            node->left = lc.plan;
            node->right = rc.plan;
            node->est_card = lc.card * rc.card / denom;
            node->est_cost = lc.cost + rc.cost + own;
            Kind out = (type == JoinType::MergeJoin) ? kSorted : kUnsorted;
            insert_cand(best[smask][out], {node->est_cost, node->est_card, node});
          }
        }
      }
    }
  };

  for (std::uint32_t s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) continue;  // singleton, already seeded
    for (std::uint32_t l = (s - 1) & s; l; l = (l - 1) & s) {
      std::uint32_t r = s ^ l;
      bool l_has = !best[l][kUnsorted].empty() || !best[l][kSorted].empty() ||
                   !best[l][kIndexLeaf].empty();
      bool r_has = !best[r][kUnsorted].empty() || !best[r][kSorted].empty() ||
                   !best[r][kIndexLeaf].empty();
      if (!l_has || !r_has) continue;
      for (const auto& [a, b] : ctx.joins) {
        int u = -1, v = -1;
        if ((l >> a & 1u) && (r >> b & 1u)) {
          u = a; v = b;
        } else if ((l >> b & 1u) && (r >> a & 1u)) {
          u = b; v = a;
        } else {
          continue;
        }
        if (hints) {
          auto it = hints->hints.find({ctx.tables[u], ctx.tables[v]});
          if (it != hints->hints.end()) try_combine(l, r, u, v, it->second, s);
        } else {
          for (JoinType t : {JoinType::HashJoin, JoinType::MergeJoin, JoinType::NestedLoop})
            try_combine(l, r, u, v, t, s);
        }
      }
    }
    if (!best[s][kUnsorted].empty() || !best[s][kSorted].empty()) ++states;
  }

  const Cand* winner = nullptr;
  for (int k : {kUnsorted, kSorted})
    for (const Cand& c : best[full][k])
      if (!winner || c.cost < winner->cost) winner = &c;
  if (!winner) throw std::invalid_argument("no feasible plan (disconnected query?)");
  return {winner->plan, states};
}

double plan_cost(const SchemaGraph& schema, const QuerySpec& query, const PlanTree& plan,
                 SelKind kind) {
  if (!plan.root) throw std::invalid_argument("empty plan");
  QueryContext ctx = make_context(schema, query, kind);
  return cost_tree(ctx, *plan.root).total_cost;
}

ExecutionSample execute(const SchemaGraph& schema, const QuerySpec& query,
                        const PlanTree& plan, const EngineParams& params,
                        std::uint64_t seed, int n_runs) {
  if (n_runs < 2) throw std::invalid_argument("execute: n_runs must be >= 2");
  double true_cost = plan_cost(schema, query, plan, SelKind::True);
  Rng rng(derive_seed(seed, "exec", serialize_plan(plan)));
  ExecutionSample sample;
  for (int k = 0; k < n_runs; ++k) {
    double eps = rng.normal(0.0, params.sigma_noise);
    while (eps <= -0.9) eps = rng.normal(0.0, params.sigma_noise);
    sample.durations.push_back(true_cost * params.time_scale * (1.0 + eps));
  }
  return sample;
}

int count_connected_subsets(const QuerySpec& query) {
  std::vector<std::string> tables = query.tables();
  const int n = static_cast<int>(tables.size());
  auto index_of = [&](const std::string& t) {
    return static_cast<int>(std::lower_bound(tables.begin(), tables.end(), t) - tables.begin());
  };
  std::vector<std::pair<int, int>> joins;
  for (const Edge& e : query.joins) joins.emplace_back(index_of(e.a), index_of(e.b));

  const std::uint32_t full = (1u << n) - 1u;
  std::vector<char> conn(full + 1, 0);
  for (int i = 0; i < n; ++i) conn[1u << i] = 1;
  int count = n;
  for (std::uint32_t s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) continue;
    for (std::uint32_t l = (s - 1) & s; l && !conn[s]; l = (l - 1) & s) {
      std::uint32_t r = s ^ l;
      if (!conn[l] || !conn[r]) continue;
      for (const auto& [a, b] : joins) {
        bool crosses = ((l >> a & 1u) && (r >> b & 1u)) || ((l >> b & 1u) && (r >> a & 1u));
        if (crosses) {
          conn[s] = 1;
          ++count;
          break;
        }
      }
    }
  }
  return count;
}

double planning_time_ms(const QuerySpec& query, const EngineParams& params) {
  return params.c_plan * static_cast<double>(count_connected_subsets(query));
}

namespace {

void serialize_node(const PlanNode& node, int depth, std::ostringstream& os) {
  os << std::string(static_cast<std::size_t>(depth) * 2, ' ');
  if (node.is_leaf()) {
    os << "Scan(" << to_string(node.scan) << ", " << node.table
       << ", cost=" << fmt6(node.est_cost) << ")\n";
    return;
  }
  os << "Join(" << to_string(node.join) << ", " << node.edge.left << "⋈"
     << node.edge.right << ", cost=" << fmt6(node.est_cost) << ")\n";
  serialize_node(*node.left, depth + 1, os);
  serialize_node(*node.right, depth + 1, os);
}

}  // namespace

std::string serialize_plan(const PlanTree& plan) {
  if (!plan.root) return "";
  std::ostringstream os;
  serialize_node(*plan.root, 0, os);
  return os.str();
}

bool plan_complies(const PlanTree& plan, const HintSet& hints) {
  if (!plan.root) return false;
  bool ok = true;
  auto walk = [&](auto&& self, const PlanNode& n) -> void {
    if (n.is_leaf()) return;
    auto it = hints.hints.find({n.edge.left, n.edge.right});
    if (it == hints.hints.end() || it->second != n.join) ok = false;
    self(self, *n.left);
    self(self, *n.right);
  };
  walk(walk, *plan.root);
  return ok;
}

}  // namespace genjoin
