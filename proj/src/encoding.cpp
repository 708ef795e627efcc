#include "genjoin/encoding.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "genjoin/errors.hpp"
#include "genjoin/rng.hpp"
#include "genjoin/textio.hpp"

namespace genjoin {

namespace {

constexpr JoinType kTypeOrder[3] = {JoinType::HashJoin, JoinType::MergeJoin,
                                    JoinType::NestedLoop};

}  // namespace

std::vector<TablePair> directed_edges(const SchemaGraph& schema) {
  std::vector<TablePair> out;
  out.reserve(schema.edges.size() * 2);
  for (const Edge& e : schema.edges) {
    out.push_back({e.a, e.b});
    out.push_back({e.b, e.a});
  }
  return out;
}

std::vector<TablePair> participating_directed_edges(const SchemaGraph& schema,
                                                    const QuerySpec& query) {
  std::vector<TablePair> out;
  for (const Edge& e : schema.edges)
    if (query.participates(e)) {
      out.push_back({e.a, e.b});
      out.push_back({e.b, e.a});
    }
  return out;
}

QueryEncoding encode_query(const SchemaGraph& schema, const QuerySpec& query) {
  query.validate(schema);
  QueryEncoding qe;
  qe.values = Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(schema.edges.size()));
  for (std::size_t e = 0; e < schema.edges.size(); ++e) {
    const Edge& edge = schema.edges[e];
    Eigen::Index base = 3 * static_cast<Eigen::Index>(e);
    if (query.participates(edge)) {
      qe.values[base] = 1.0;
      qe.values[base + 1] = query.est_sel(edge.a);
      qe.values[base + 2] = query.est_sel(edge.b);
    } else {
      qe.values[base] = 0.0;
      qe.values[base + 1] = 1.0;
      qe.values[base + 2] = 1.0;
    }
  }
  return qe;
}

PlanEncoding encode_hint_ranks(const SchemaGraph& schema, const QuerySpec& query,
                               const std::vector<int>& ranking) {
  auto part = participating_directed_edges(schema, query);
  const std::size_t slots = part.size() * 3;
  if (ranking.size() != slots)
    throw std::invalid_argument("ranking must cover all participating slots");
  std::vector<char> seen(slots + 1, 0);
  for (int r : ranking) {
    if (r < 1 || static_cast<std::size_t>(r) > slots || seen[static_cast<std::size_t>(r)])
      throw std::invalid_argument("ranking is not a bijection onto 1..6*Ep");
    seen[static_cast<std::size_t>(r)] = 1;
  }

  PlanEncoding enc;
  enc.values = Eigen::VectorXd::Zero(6 * static_cast<Eigen::Index>(schema.edges.size()));
  auto all_dir = directed_edges(schema);
  std::size_t slot = 0;
  for (std::size_t d = 0; d < all_dir.size(); ++d) {
    if (slot / 3 < part.size() && all_dir[d] == part[slot / 3]) {
      for (int t = 0; t < 3; ++t, ++slot)
        enc.values[static_cast<Eigen::Index>(3 * d + static_cast<std::size_t>(t))] =
            static_cast<double>(ranking[slot]) / static_cast<double>(slots);
    }
  }
  return enc;
}

HintSet decode_hints(const SchemaGraph& schema, const QuerySpec& query,
                     const PlanEncoding& enc) {
  if (enc.values.size() != 6 * static_cast<Eigen::Index>(schema.edges.size()))
    throw std::invalid_argument("plan encoding has wrong length for this schema");
  HintSet h;
  auto all_dir = directed_edges(schema);
  for (std::size_t d = 0; d < all_dir.size(); ++d) {
    Edge e(all_dir[d].left, all_dir[d].right);
    if (!query.participates(e)) continue;
    Eigen::Index base = 3 * static_cast<Eigen::Index>(d);
    int winner = 0;
    for (int t = 1; t < 3; ++t)
      if (enc.values[base + t] < enc.values[base + winner]) winner = t;
    h.hints[all_dir[d]] = kTypeOrder[winner];
    h.scores[all_dir[d]] = enc.values[base + winner];
  }
  return h;
}

HintSet random_hintset(const SchemaGraph& schema, const QuerySpec& query,
                       std::uint64_t seed) {
  Rng rng(derive_seed(seed, "hintset", query.id));
  HintSet h;
  for (const TablePair& d : participating_directed_edges(schema, query))
    h.hints[d] = kTypeOrder[rng.below(3)];
  return h;
}

PlanEncoding hintset_to_ranking(const SchemaGraph& schema, const QuerySpec& query,
                                const HintSet& hints, std::uint64_t seed) {
  auto part = participating_directed_edges(schema, query);
  for (const TablePair& d : part)
    if (!hints.hints.count(d))
      throw std::invalid_argument("hint set does not cover directed edge " + d.left +
                                  "->" + d.right);

  const std::size_t slots = part.size() * 3;
  std::vector<int> ranking(slots);
  std::vector<int> ranks(slots);
  std::iota(ranks.begin(), ranks.end(), 1);
  Rng rng(derive_seed(seed, "ranking", query.id));
  rng.shuffle(ranks);
  for (std::size_t s = 0; s < slots; ++s) ranking[s] = ranks[s];

  // Move the hinted type's rank to the cell minimum within each cell.
  for (std::size_t cell = 0; cell < part.size(); ++cell) {
    JoinType hinted = hints.hints.at(part[cell]);
    std::size_t hinted_slot = cell * 3;
    for (int t = 0; t < 3; ++t)
      if (kTypeOrder[t] == hinted) hinted_slot = cell * 3 + static_cast<std::size_t>(t);
    std::size_t min_slot = cell * 3;
    for (std::size_t s = cell * 3; s < cell * 3 + 3; ++s)
      if (ranking[s] < ranking[min_slot]) min_slot = s;
    std::swap(ranking[hinted_slot], ranking[min_slot]);
  }
  return encode_hint_ranks(schema, query, ranking);
}

std::string emit_pg_hints(const SchemaGraph& schema, const QuerySpec& query,
                          const HintSet& hints) {
  std::ostringstream os;
  os << "/*+";
  for (const Edge& e : schema.edges) {
    if (!query.participates(e)) continue;
    TablePair fwd{e.a, e.b};
    TablePair rev{e.b, e.a};
    auto fit = hints.hints.find(fwd);
    auto rit = hints.hints.find(rev);
    if (fit == hints.hints.end() && rit == hints.hints.end()) continue;
    TablePair dir = fwd;
    JoinType type;
    if (fit != hints.hints.end() && rit != hints.hints.end()) {
      auto score = [&](const TablePair& p) {
        auto it = hints.scores.find(p);
        return it == hints.scores.end() ? 0.0 : it->second;
      };
      // smaller winning score = better rank; ties keep canonical orientation
      if (score(rev) < score(fwd)) dir = rev;
      type = hints.hints.at(dir);
    } else {
      dir = (fit != hints.hints.end()) ? fwd : rev;
      type = hints.hints.at(dir);
    }
    const char* token = type == JoinType::HashJoin    ? "HashJoin"
                        : type == JoinType::MergeJoin ? "MergeJoin"
                                                      : "NestLoop";
    os << " " << token << "(" << dir.left << " " << dir.right << ")";
  }
  os << " */";
  return os.str();
}

Condition build_condition(const QueryEncoding& qe, double i_in, double i_pg) {
  if (i_in < 0.0 || i_in > 1.0 || i_pg < 0.0 || i_pg > 1.0)
    throw std::invalid_argument("condition p-values must lie in [0,1]");
  return {qe, i_in, i_pg};
}

Eigen::VectorXd flatten(const Condition& c) {
  Eigen::VectorXd v(c.query.values.size() + 2);
  v.head(c.query.values.size()) = c.query.values;
  v[c.query.values.size()] = c.i_in;
  v[c.query.values.size() + 1] = c.i_pg;
  return v;
}

Condition unflatten_condition(const SchemaGraph& schema, const Eigen::VectorXd& v) {
  Eigen::Index qlen = 3 * static_cast<Eigen::Index>(schema.edges.size());
  if (v.size() != qlen + 2)
    throw std::invalid_argument("condition vector has wrong length for this schema");
  Condition c;
  c.query.values = v.head(qlen);
  c.i_in = v[qlen];
  c.i_pg = v[qlen + 1];
  return c;
}

std::string serialize_vector(const Eigen::VectorXd& v) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << fmt6(v[i]);
  }
  return os.str();
}

Eigen::VectorXd parse_vector(const std::string& text) {
  if (trim(text).empty()) return Eigen::VectorXd(0);
  auto parts = split(text, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    try {
      v[static_cast<Eigen::Index>(i)] = std::stod(parts[i]);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad numeric field '" + parts[i] + "'");
    }
  }
  return v;
}

}  // namespace genjoin
