#include "genjoin/workload.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "genjoin/errors.hpp"
#include "genjoin/rng.hpp"
#include "genjoin/textio.hpp"

namespace genjoin {

namespace {

// Union-find connectivity check over a node set.
bool connected(const std::vector<std::string>& nodes, const std::vector<Edge>& edges) {
  if (nodes.size() <= 1) return true;
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < nodes.size(); ++i) idx[nodes[i]] = static_cast<int>(i);
  std::vector<int> parent(nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : edges) {
    auto ia = idx.find(e.a), ib = idx.find(e.b);
    if (ia == idx.end() || ib == idx.end()) continue;
    parent[find(ia->second)] = find(ib->second);
  }
  int root = find(0);
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (find(static_cast<int>(i)) != root) return false;
  return true;
}

std::string variant_suffix(int v) {
  // a..z, then aa, ab, ...
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + v % 26));
    v = v / 26 - 1;
  } while (v >= 0);
  return s;
}

}  // namespace

const Table& SchemaGraph::table(const std::string& name) const {
  for (const Table& t : tables)
    if (t.name == name) return t;
  throw std::invalid_argument("unknown table: " + name);
}

bool SchemaGraph::has_edge(const std::string& x, const std::string& y) const {
  Edge e(x, y);
  return std::binary_search(edges.begin(), edges.end(), e);
}

void SchemaGraph::validate() const {
  if (tables.empty()) throw std::invalid_argument("schema has no tables");
  std::set<std::string> names;
  std::vector<std::string> node_names;
  for (const Table& t : tables) {
    if (!names.insert(t.name).second)
      throw std::invalid_argument("duplicate table name: " + t.name);
    if (t.row_count < 1) throw std::invalid_argument("row_count < 1 for " + t.name);
    node_names.push_back(t.name);
  }
  for (const Edge& e : edges) {
    if (e.a == e.b) throw std::invalid_argument("self-loop edge on " + e.a);
    if (!names.count(e.a) || !names.count(e.b))
      throw std::invalid_argument("edge references unknown table");
  }
  if (!connected(node_names, edges))
    throw std::invalid_argument("schema graph is not connected");
}

std::vector<std::string> QuerySpec::tables() const {
  std::set<std::string> s;
  for (const Edge& e : joins) {
    s.insert(e.a);
    s.insert(e.b);
  }
  if (joins.empty())
    for (const auto& [t, f] : filters) s.insert(t);
  return {s.begin(), s.end()};
}

bool QuerySpec::participates(const Edge& e) const {
  return std::binary_search(joins.begin(), joins.end(), e);
}

double QuerySpec::true_sel(const std::string& table) const {
  auto it = filters.find(table);
  return it == filters.end() ? 1.0 : it->second.true_selectivity;
}

double QuerySpec::est_sel(const std::string& table) const {
  auto it = filters.find(table);
  return it == filters.end() ? 1.0 : it->second.estimated_selectivity;
}

void QuerySpec::validate(const SchemaGraph& schema) const {
  std::vector<std::string> ts = tables();
  if (ts.empty()) throw std::invalid_argument(id + ": query references no tables");
  for (const Edge& e : joins)
    if (!schema.has_edge(e.a, e.b))
      throw std::invalid_argument(id + ": join " + e.a + "-" + e.b + " is not a schema edge");
  if (!connected(ts, joins))
    throw std::invalid_argument(id + ": join graph is not connected");
  for (const auto& [t, f] : filters) {
    schema.table(t);  // throws on unknown
    if (!joins.empty()) {
      bool touches = false;
      for (const Edge& e : joins) touches |= (e.a == t || e.b == t);
      if (!touches)
        throw std::invalid_argument(id + ": filtered table " + t + " joins nothing");
    }
    if (!(f.true_selectivity > 0.0 && f.true_selectivity <= 1.0) ||
        !(f.estimated_selectivity > 0.0 && f.estimated_selectivity <= 1.0))
      throw std::invalid_argument(id + ": selectivity out of (0,1] for " + t);
  }
}

std::vector<const QuerySpec*> Workload::all_queries() const {
  std::vector<const QuerySpec*> out;
  for (const auto& [base, group] : base_groups)
    for (const QuerySpec& q : group) out.push_back(&q);
  std::sort(out.begin(), out.end(),
            [](const QuerySpec* a, const QuerySpec* b) { return a->id < b->id; });
  return out;
}

const QuerySpec& Workload::query(const std::string& id) const {
  for (const auto& [base, group] : base_groups)
    for (const QuerySpec& q : group)
      if (q.id == id) return q;
  throw std::invalid_argument("unknown query id: " + id);
}

std::size_t Workload::query_count() const {
  std::size_t n = 0;
  for (const auto& [base, group] : base_groups) n += group.size();
  return n;
}

SchemaGraph gen_schema(std::uint64_t seed, int n_tables, double edge_density) {
  if (n_tables < 2) throw std::invalid_argument("gen_schema: n_tables must be >= 2");
  if (edge_density < 0.0 || edge_density > 1.0)
    throw std::invalid_argument("gen_schema: edge_density must be in [0,1]");

  Rng rng(derive_seed(seed, "schema"));
  SchemaGraph g;
  for (int i = 0; i < n_tables; ++i) {
    Table t;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%02d", i);
    t.name = buf;
    // log-uniform rows over [1e3, 1e7]
    t.row_count = static_cast<std::uint64_t>(
        std::llround(std::exp(rng.uniform(std::log(1e3), std::log(1e7)))));
    int n_cols = rng.uniform_int(1, 3);
    for (int c = 0; c < n_cols; ++c)
      t.columns.push_back({"col" + std::to_string(c), 0.0, 1.0});
    g.tables.push_back(std::move(t));
  }

  // random spanning tree: attach each node to an earlier one
  for (int i = 1; i < n_tables; ++i) {
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
    g.edges.emplace_back(g.tables[i].name, g.tables[j].name);
  }
  // extra edges, Bernoulli(edge_density) per remaining pair in canonical order
  for (int i = 0; i < n_tables; ++i)
    for (int j = i + 1; j < n_tables; ++j) {
      Edge e(g.tables[i].name, g.tables[j].name);
      if (std::find(g.edges.begin(), g.edges.end(), e) != g.edges.end()) continue;
      if (rng.uniform() < edge_density) g.edges.push_back(e);
    }
  std::sort(g.edges.begin(), g.edges.end());
  g.validate();
  return g;
}

Workload gen_workload(const SchemaGraph& schema, std::uint64_t seed, int n_base,
                      int n_variants, int max_joins) {
  schema.validate();
  if (n_base < 1) throw std::invalid_argument("gen_workload: n_base must be >= 1");
  if (n_variants < 1) throw std::invalid_argument("gen_workload: n_variants must be >= 1");
  if (max_joins < 1 || static_cast<std::size_t>(max_joins) > schema.edges.size())
    throw std::invalid_argument("gen_workload: max_joins must be in [1, #schema edges]");

  Workload w;
  w.schema = schema;

  for (int b = 0; b < n_base; ++b) {
    char base_buf[16];
    std::snprintf(base_buf, sizeof(base_buf), "q%02d", b);
    std::string base_id = base_buf;
    Rng rng(derive_seed(seed, "base", base_id));

    // random edge-growth from a random start table
    int target_joins = rng.uniform_int(1, max_joins);
    std::set<std::string> in_tables;
    std::set<Edge> chosen;
    in_tables.insert(schema.tables[rng.below(schema.tables.size())].name);
    while (static_cast<int>(chosen.size()) < target_joins) {
      std::vector<Edge> frontier;
      for (const Edge& e : schema.edges)
        if (!chosen.count(e) && (in_tables.count(e.a) || in_tables.count(e.b)))
          frontier.push_back(e);
      if (frontier.empty()) break;  // component saturated below target size
      const Edge& pick = frontier[rng.below(frontier.size())];
      chosen.insert(pick);
      in_tables.insert(pick.a);
      in_tables.insert(pick.b);
    }

    // filtered tables: each participant with p=0.6, at least one
    std::vector<std::string> participants(in_tables.begin(), in_tables.end());
    std::vector<std::pair<std::string, std::string>> filter_cols;  // (table, column)
    for (const std::string& t : participants)
      if (rng.uniform() < 0.6) {
        const Table& tab = schema.table(t);
        filter_cols.emplace_back(t, tab.columns[rng.below(tab.columns.size())].name);
      }
    if (filter_cols.empty()) {
      const std::string& t = participants[rng.below(participants.size())];
      const Table& tab = schema.table(t);
      filter_cols.emplace_back(t, tab.columns[rng.below(tab.columns.size())].name);
    }

    std::vector<QuerySpec> group;
    for (int v = 0; v < n_variants; ++v) {
      QuerySpec q;
      q.base_id = base_id;
      q.id = base_id + variant_suffix(v);
      q.joins.assign(chosen.begin(), chosen.end());
      Rng vrng(derive_seed(seed, "variant", q.id));
      for (const auto& [t, col] : filter_cols) {
        Filter f;
        // log-uniform true selectivity in [0.01, 1]
        f.true_selectivity = std::exp(vrng.uniform(std::log(0.01), 0.0));
        const Table& tab = schema.table(t);
        const Column* c = nullptr;
        for (const Column& cc : tab.columns)
          if (cc.name == col) c = &cc;
        double threshold = c->hi - f.true_selectivity * (c->hi - c->lo);
        f.predicate = t + "." + col + " >= " + fmt6(threshold);
        Rng erng(derive_seed(seed, "est", t + "|" + f.predicate));
        double eta = erng.normal(0.0, 0.15);
        f.estimated_selectivity =
            std::min(1.0, std::max(1e-6, f.true_selectivity * std::exp(eta)));
        q.filters[t] = f;
      }
      q.validate(schema);
      group.push_back(std::move(q));
    }
    w.base_groups[base_id] = std::move(group);
  }
  return w;
}

std::string serialize_workload(const Workload& w) {
  std::ostringstream os;
  os << "[schema]\n";
  for (const Table& t : w.schema.tables) {
    os << "[table " << t.name << "]\n";
    os << "rows " << t.row_count << "\n";
    for (const Column& c : t.columns)
      os << "column " << c.name << " " << fmt6(c.lo) << " " << fmt6(c.hi) << "\n";
  }
  for (const Edge& e : w.schema.edges) os << "[edge " << e.a << " " << e.b << "]\n";
  for (const QuerySpec* q : w.all_queries()) {
    os << "[query " << q->id << " base=" << q->base_id << "]\n";
    for (const Edge& e : q->joins) os << "join " << e.a << " " << e.b << "\n";
    for (const auto& [t, f] : q->filters)
      os << "filter " << t << " sel=" << fmt6(f.true_selectivity)
         << " est=" << fmt6(f.estimated_selectivity) << " pred=" << f.predicate << "\n";
  }
  return os.str();
}

Workload parse_workload(const std::string& text) {
  Workload w;
  QuerySpec* current_query = nullptr;
  Table* current_table = nullptr;
  std::map<std::string, std::vector<QuerySpec>> groups;
  bool saw_schema = false;

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "[schema]") {
      saw_schema = true;
      continue;
    }
    if (line.rfind("[table ", 0) == 0) {
      if (line.back() != ']') throw ParseError("malformed table header", lineno);
      std::string name = trim(line.substr(7, line.size() - 8));
      if (name.empty()) throw ParseError("table name missing", lineno);
      w.schema.tables.push_back(Table{name, 1, {}});
      current_table = &w.schema.tables.back();
      current_query = nullptr;
      continue;
    }
    if (line.rfind("[edge ", 0) == 0) {
      if (line.back() != ']') throw ParseError("malformed edge header", lineno);
      auto parts = split(trim(line.substr(6, line.size() - 7)), ' ');
      if (parts.size() != 2) throw ParseError("edge needs two table names", lineno);
      w.schema.edges.emplace_back(parts[0], parts[1]);
      current_table = nullptr;
      current_query = nullptr;
      continue;
    }
    if (line.rfind("[query ", 0) == 0) {
      if (line.back() != ']') throw ParseError("malformed query header", lineno);
      auto parts = split(trim(line.substr(7, line.size() - 8)), ' ');
      if (parts.size() != 2 || parts[1].rfind("base=", 0) != 0)
        throw ParseError("query header needs '<id> base=<base_id>'", lineno);
      QuerySpec q;
      q.id = parts[0];
      q.base_id = parts[1].substr(5);
      if (q.id.empty() || q.base_id.empty()) throw ParseError("empty query id", lineno);
      groups[q.base_id].push_back(std::move(q));
      current_query = &groups[q.base_id].back();
      current_table = nullptr;
      continue;
    }
    auto fields = split(line, ' ');
    if (fields[0] == "rows") {
      if (!current_table) throw ParseError("'rows' outside a [table] section", lineno);
      if (fields.size() != 2) throw ParseError("'rows' needs one value", lineno);
      try {
        current_table->row_count = std::stoull(fields[1]);
      } catch (const std::exception&) {
        throw ParseError("bad row count '" + fields[1] + "'", lineno);
      }
      continue;
    }
    if (fields[0] == "column") {
      if (!current_table) throw ParseError("'column' outside a [table] section", lineno);
      if (fields.size() != 4) throw ParseError("'column' needs name, lo, hi", lineno);
      try {
        current_table->columns.push_back({fields[1], std::stod(fields[2]), std::stod(fields[3])});
      } catch (const std::exception&) {
        throw ParseError("bad column domain", lineno);
      }
      continue;
    }
    if (fields[0] == "join") {
      if (!current_query) throw ParseError("'join' outside a [query] section", lineno);
      if (fields.size() != 3) throw ParseError("'join' needs two table names", lineno);
      current_query->joins.emplace_back(fields[1], fields[2]);
      continue;
    }
    if (fields[0] == "filter") {
      if (!current_query) throw ParseError("'filter' outside a [query] section", lineno);
      if (fields.size() < 4) throw ParseError("'filter' needs table, sel=, est=", lineno);
      if (fields[2].rfind("sel=", 0) != 0)
        throw ParseError("filter is missing the 'sel=' field", lineno);
      if (fields[3].rfind("est=", 0) != 0)
        throw ParseError("filter is missing the 'est=' field", lineno);
      Filter f;
      try {
        f.true_selectivity = std::stod(fields[2].substr(4));
        f.estimated_selectivity = std::stod(fields[3].substr(4));
      } catch (const std::exception&) {
        throw ParseError("bad selectivity value", lineno);
      }
      if (fields.size() > 4 && fields[4].rfind("pred=", 0) == 0) {
        std::string pred = fields[4].substr(5);
        for (std::size_t i = 5; i < fields.size(); ++i) pred += " " + fields[i];
        f.predicate = pred;
      }
      current_query->filters[fields[1]] = f;
      continue;
    }
    throw ParseError("unrecognized line '" + line + "'", lineno);
  }

  if (!saw_schema) throw ParseError("missing [schema] section", 1);
  std::sort(w.schema.edges.begin(), w.schema.edges.end());
  w.schema.validate();
  for (auto& [base, group] : groups)
    for (QuerySpec& q : group) {
      std::sort(q.joins.begin(), q.joins.end());
      q.validate(w.schema);
    }
  w.base_groups = std::move(groups);
  return w;
}

std::string schema_hash(const SchemaGraph& schema) {
  std::ostringstream os;
  for (const Table& t : schema.tables) {
    os << t.name << ":" << t.row_count << ";";
    for (const Column& c : t.columns) os << c.name << "," << fmt6(c.lo) << "," << fmt6(c.hi) << ";";
  }
  for (const Edge& e : schema.edges) os << e.a << "-" << e.b << ";";
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

}  // namespace genjoin
