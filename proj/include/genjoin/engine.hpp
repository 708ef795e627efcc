#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "genjoin/workload.hpp"

namespace genjoin {

enum class JoinType { HashJoin, MergeJoin, NestedLoop };
enum class ScanType { SeqScan, IndexScan };

std::string to_string(JoinType t);   // "HJ" / "MJ" / "NL"
std::string to_string(ScanType t);   // "Seq" / "Idx"

/// Ordered table pair; (left, right) and (right, left) are distinct keys.
struct TablePair {
  std::string left;
  std::string right;

  friend bool operator==(const TablePair&, const TablePair&) = default;
  friend auto operator<=>(const TablePair&, const TablePair&) = default;
};

/// Directed subplan hints: at most one join type per ordered pair.
/// `scores` is diagnostic output from decoding (the winning cell entry per
/// direction); it steers emission direction and is empty for hint sets that
/// never went through an encoding.
struct HintSet {
  std::map<TablePair, JoinType> hints;
  std::map<TablePair, double> scores;

  bool empty() const { return hints.empty(); }
  std::size_t size() const { return hints.size(); }
};

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

/// Binary join tree node. Leaves scan a single table; internal nodes carry
/// the connecting edge oriented (left-subtree table, right-subtree table).
/// est_cost is the subtree total under estimated selectivities, est_card the
/// node output cardinality.
struct PlanNode {
  ScanType scan = ScanType::SeqScan;  // leaf only
  std::string table;                  // leaf only
  JoinType join = JoinType::HashJoin; // internal only
  TablePair edge;                     // internal only
  PlanPtr left, right;                // null for leaves
  double est_cost = 0.0;
  double est_card = 0.0;

  bool is_leaf() const { return left == nullptr; }
};

struct PlanTree {
  PlanPtr root;
  int dp_states = 0;  // connected subsets enumerated while optimizing
};

/// Simulated execution-time measurements in milliseconds.
struct ExecutionSample {
  std::vector<double> durations;

  double mean() const;
  double stddev() const;  // sample standard deviation (n-1)
};

struct EngineParams {
  double sigma_noise = 0.05;  // relative execution-noise std
  double time_scale = 1.0;    // ms per cost unit
  double c_plan = 0.01;       // ms per DP state
};

/// Which selectivities drive cardinalities: the optimizer plans on estimates,
/// execution charges the true values. The gap is the simulator's analogue of
/// cardinality misestimation.
enum class SelKind { Estimated, True };

/// Exhaustive dynamic-programming join optimizer (bushy trees allowed).
///
/// Candidate joins when combining disjoint connected sets L and R: without
/// hints, every connecting edge x all three join types; with hints, each
/// connecting edge (u in L, v in R) contributes only its hinted type
/// hints[(u,v)], and the mirrored direction arises when R is considered as
/// the left side. Scan types are chosen by cost: an IndexScan leaf is only
/// available feeding a MergeJoin or the inner side of a NestedLoop.
///
/// Throws InvalidHintError when a hinted pair is not a query edge, and
/// std::invalid_argument when a participating edge is covered in neither
/// direction or the query is invalid.
PlanTree optimize(const SchemaGraph& schema, const QuerySpec& query,
                  const HintSet* hints = nullptr);

inline PlanTree baseline_plan(const SchemaGraph& schema, const QuerySpec& query) {
  return optimize(schema, query, nullptr);
}

/// Recomputes the total plan cost from scratch for a fixed tree.
///
/// Cost model per node (|X| = input cardinality):
///   SeqScan(T)   = rows(T)
///   IndexScan(T) = log2(rows(T)) + sel(T) * rows(T)
///   HashJoin     = 1.2*|R| + |L|              (build right, probe left)
///   MergeJoin    = |L| + |R| + 0.1*|X|*log2(max(|X|,1)) per unsorted input;
///                  an input is sorted iff IndexScan leaf or MergeJoin output
///   NestedLoop   = |L| + |L|*log2(rows(R)) when the right input is an
///                  IndexScan leaf, else |L|*|R|
/// Join output cardinality = |L|*|R| / max(rows(u), rows(v)) for connecting
/// edge (u, v).
double plan_cost(const SchemaGraph& schema, const QuerySpec& query, const PlanTree& plan,
                 SelKind kind = SelKind::Estimated);

/// duration_k = true cost * time_scale * (1 + eps_k), eps_k ~ N(0, sigma^2)
/// truncated to eps_k > -0.9. Deterministic per (plan, seed, k).
ExecutionSample execute(const SchemaGraph& schema, const QuerySpec& query,
                        const PlanTree& plan, const EngineParams& params,
                        std::uint64_t seed, int n_runs = 3);

/// c_plan * (number of connected table subsets of the query join graph), ms.
double planning_time_ms(const QuerySpec& query, const EngineParams& params);
int count_connected_subsets(const QuerySpec& query);

/// Indented one-node-per-line text form, e.g.
///   Join(HJ, a⋈b, cost=...)
///     Scan(Seq, a, cost=...)
///     Scan(Idx, b, cost=...)
std::string serialize_plan(const PlanTree& plan);

/// True when every join node's (connecting edge, join type) matches the
/// hinted type for that direction.
bool plan_complies(const PlanTree& plan, const HintSet& hints);

}  // namespace genjoin
