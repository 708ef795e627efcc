#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace genjoin {

/// Unordered table pair stored in canonical orientation (first < second).
struct Edge {
  std::string a;
  std::string b;

  Edge() = default;
  Edge(std::string x, std::string y) {
    if (y < x) std::swap(x, y);
    a = std::move(x);
    b = std::move(y);
  }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Column {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const Column&, const Column&) = default;
};

struct Table {
  std::string name;
  std::uint64_t row_count = 1;
  std::vector<Column> columns;

  friend bool operator==(const Table&, const Table&) = default;
};

/// Database-as-a-graph: tables are nodes, edges are potential join paths.
struct SchemaGraph {
  std::vector<Table> tables;  // sorted by name
  std::vector<Edge> edges;    // sorted, canonical orientation

  const Table& table(const std::string& name) const;
  bool has_edge(const std::string& x, const std::string& y) const;
  /// Throws std::invalid_argument on a violated invariant (disconnected
  /// graph, duplicate names, self-loops, zero rows).
  void validate() const;

  friend bool operator==(const SchemaGraph&, const SchemaGraph&) = default;
};

struct Filter {
  std::string predicate;         // e.g. "t03.col1 >= 0.372810"
  double true_selectivity = 1.0;  // in (0,1]
  double estimated_selectivity = 1.0;

  friend bool operator==(const Filter&, const Filter&) = default;
};

/// A connected join subgraph plus per-table filter selectivities.
/// Tables are implied: endpoints of `joins`, or the filtered table for a
/// single-table query with no joins.
struct QuerySpec {
  std::string id;       // e.g. "q07b"
  std::string base_id;  // e.g. "q07"
  std::vector<Edge> joins;  // sorted, subset of schema edges
  std::map<std::string, Filter> filters;

  std::vector<std::string> tables() const;
  bool participates(const Edge& e) const;
  double true_sel(const std::string& table) const;   // 1.0 when unfiltered
  double est_sel(const std::string& table) const;
  void validate(const SchemaGraph& schema) const;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

struct Workload {
  SchemaGraph schema;
  std::map<std::string, std::vector<QuerySpec>> base_groups;

  std::vector<const QuerySpec*> all_queries() const;  // id-sorted
  const QuerySpec& query(const std::string& id) const;
  std::size_t query_count() const;

  friend bool operator==(const Workload&, const Workload&) = default;
};

/// Spanning tree first, then extra edges with probability `edge_density`
/// each. Row counts are log-uniform in [1e3, 1e7].
SchemaGraph gen_schema(std::uint64_t seed, int n_tables, double edge_density);

/// Base queries are random connected join subgraphs with at most `max_joins`
/// edges; variants share the join set and redraw filter selectivities.
/// Estimated selectivity = true selectivity * exp(eta), eta ~ N(0, 0.15^2),
/// clamped into (0,1], seeded per (table, predicate).
Workload gen_workload(const SchemaGraph& schema, std::uint64_t seed, int n_base,
                      int n_variants, int max_joins);

std::string serialize_workload(const Workload& w);
/// Inverse of serialize_workload. Lines starting with '#' are ignored.
/// Throws ParseError with the offending line number.
Workload parse_workload(const std::string& text);

/// FNV-1a over the serialized schema section; guards cross-schema loads of
/// pair and model files.
std::string schema_hash(const SchemaGraph& schema);

}  // namespace genjoin
