#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "genjoin/engine.hpp"
#include "genjoin/workload.hpp"

namespace genjoin {

/// One 3-sized cell per schema edge in canonical (lexicographic) order:
/// (participates, est_sel(left), est_sel(right)). Non-participating cells
/// are (0, 1.0, 1.0).
struct QueryEncoding {
  Eigen::VectorXd values;  // length 3 * |schema edges|
};

/// One 3-sized cell per directed schema edge, canonical direction first:
/// normalized rank scores for (HashJoin, MergeJoin, NestedLoop). Cells of
/// non-participating edges are all zero; participating entries live in
/// (0, 1], lower meaning a higher rank.
struct PlanEncoding {
  Eigen::VectorXd values;  // length 6 * |schema edges|
};

/// Query encoding plus the two improvement p-values; both are zero at
/// inference time.
struct Condition {
  QueryEncoding query;
  double i_in = 0.0;
  double i_pg = 0.0;
};

/// Directed schema edges in layout order: for canonical edge (a, b) at index
/// e, slot 2e is a->b and slot 2e+1 is b->a.
std::vector<TablePair> directed_edges(const SchemaGraph& schema);

/// Directed edges of the query's participating joins, in layout order.
std::vector<TablePair> participating_directed_edges(const SchemaGraph& schema,
                                                    const QuerySpec& query);

QueryEncoding encode_query(const SchemaGraph& schema, const QuerySpec& query);

/// A ranking is a bijection onto 1..6*Ep over the participating slots
/// (participating directed edges in layout order x the three join types),
/// given as the rank per slot. Scores are rank / (6*Ep).
PlanEncoding encode_hint_ranks(const SchemaGraph& schema, const QuerySpec& query,
                               const std::vector<int>& ranking);

/// Per participating directed edge, the join type with the minimal cell
/// score wins; ties resolve HashJoin < MergeJoin < NestedLoop. The winning
/// scores are kept on the hint set for emission.
HintSet decode_hints(const SchemaGraph& schema, const QuerySpec& query,
                     const PlanEncoding& enc);

/// Independently uniform join type per participating directed edge.
HintSet random_hintset(const SchemaGraph& schema, const QuerySpec& query,
                       std::uint64_t seed);

/// Inverse bridge for training targets: builds a ranking permutation whose
/// per-cell minimum lands on the hinted type (other ranks shuffled by seed),
/// normalized as in encode_hint_ranks.
PlanEncoding hintset_to_ranking(const SchemaGraph& schema, const QuerySpec& query,
                                const HintSet& hints, std::uint64_t seed);

/// pg_hint_plan comment block, one token per unordered participating edge:
/// the direction whose winner held the better (smaller) score, ties to
/// canonical orientation. Byte-stable.
std::string emit_pg_hints(const SchemaGraph& schema, const QuerySpec& query,
                          const HintSet& hints);

Condition build_condition(const QueryEncoding& qe, double i_in, double i_pg);
Eigen::VectorXd flatten(const Condition& c);
Condition unflatten_condition(const SchemaGraph& schema, const Eigen::VectorXd& v);

/// Comma-separated 6-digit decimals.
std::string serialize_vector(const Eigen::VectorXd& v);
Eigen::VectorXd parse_vector(const std::string& text);

}  // namespace genjoin
