/// JSON and CSV interchange: group/representation definitions, metric
/// measure spaces with actions, link-variable connections, spectra and
/// sparse operator dumps. CSV numbers are printed with %.17g so reruns are
/// byte-identical.
#pragma once

#include "kkspectra/connection.hpp"
#include "kkspectra/group.hpp"
#include "kkspectra/lattice.hpp"
#include "kkspectra/mm_space.hpp"
#include "kkspectra/operator.hpp"
#include "kkspectra/representation.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kks {

using nlohmann::json;

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Write-then-rename so concurrent scenario runs never expose torn files.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- groups

inline json group_to_json(const CompactGroupModel& g) {
  json j;
  j["name"] = g.name;
  switch (g.kind) {
    case GroupKind::finite: {
      j["kind"] = "finite";
      j["table"] = g.table;
      break;
    }
    case GroupKind::u1: {
      j["kind"] = "u1";
      j["nodes"] = g.size();
      j["sigma"] = g.sigma(0, 0);
      break;
    }
    case GroupKind::su2: {
      j["kind"] = "su2";
      j["sigma"] = g.sigma(0, 0);
      break;
    }
  }
  return j;
}

inline CompactGroupModel group_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite") {
    auto g = CompactGroupModel::finite_from_table(
        j.at("table").get<std::vector<std::vector<int>>>(),
        j.value("name", std::string("finite")));
    return g;
  }
  if (kind == "u1")
    return CompactGroupModel::u1(j.value("nodes", 16), j.value("sigma", 1.0));
  if (kind == "su2") return CompactGroupModel::su2(8, 4, 8, j.value("sigma", 1.0));
  throw std::invalid_argument("unknown group kind: " + kind);
}


inline json rep_to_json(const RepresentationModel& r) {
  json j;
  j["name"] = r.name;
  j["dim"] = r.dim_V;
  j["irreducible"] = r.irreducible;
  switch (r.rep_kind) {
    case RepresentationModel::Kind::trivial:
      j["kind"] = "trivial";
      break;
    case RepresentationModel::Kind::u1_weight:
      j["kind"] = "u1_weight";
      j["weight"] = r.weight;
      break;
    case RepresentationModel::Kind::su2_adjoint:
      j["kind"] = "su2_adjoint";
      break;
    case RepresentationModel::Kind::finite_table: {
      j["kind"] = "finite_table";
      json mats = json::array();
      for (const auto& m : r.matrices) {
        json rows = json::array();
        for (int a = 0; a < m.rows(); ++a) {
          json row = json::array();
          for (int b = 0; b < m.cols(); ++b) row.push_back(m(a, b));
          rows.push_back(row);
        }
        mats.push_back(rows);
      }
      j["matrices"] = mats;
      break;
    }
  }
  return j;
}

inline RepresentationModel rep_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "trivial") return RepresentationModel::trivial_rep();
  if (kind == "u1_weight") return RepresentationModel::u1_weight_rep(j.at("weight").get<int>());
  if (kind == "su2_adjoint") return RepresentationModel::su2_adjoint_rep();
  if (kind == "finite_table") {
    std::vector<Eigen::MatrixXd> mats;
    for (const auto& mj : j.at("matrices")) {
      const int rows = static_cast<int>(mj.size());
      const int cols = static_cast<int>(mj.at(0).size());
      Eigen::MatrixXd m(rows, cols);
      for (int a = 0; a < rows; ++a)
        for (int b = 0; b < cols; ++b) m(a, b) = mj.at(a).at(b).get<double>();
      mats.push_back(m);
    }
    return RepresentationModel::finite_rep(std::move(mats), j.value("name", std::string("rep")),
                                           j.value("irreducible", true));
  }
  throw std::invalid_argument("unknown rep kind: " + kind);
}

struct GroupWithReps {
  CompactGroupModel group;
  std::vector<RepresentationModel> reps;
};

/// One document holding the group plus its representations:
/// {"kind": ..., "table"|"nodes": ..., "sigma": ..., "reps": [...]}.
inline GroupWithReps group_with_reps_from_json(const json& j) {
  GroupWithReps out;
  out.group = group_from_json(j);
  if (j.contains("reps"))
    for (const auto& rj : j.at("reps")) out.reps.push_back(rep_from_json(rj));
  return out;
}

inline json group_with_reps_to_json(const CompactGroupModel& g,
                                    const std::vector<RepresentationModel>& reps) {
  json j = group_to_json(g);
  j["reps"] = json::array();
  for (const auto& r : reps) j["reps"].push_back(rep_to_json(r));
  return j;
}

// ------------------------------------------------------------- mm spaces

inline json mm_space_to_json(const FiniteMMSpace& s, const IsometricAction* act = nullptr) {
  json j;
  json dist = json::array();
  for (int i = 0; i < s.n(); ++i) {
    json row = json::array();
    for (int k = 0; k < s.n(); ++k) row.push_back(s.dist(i, k));
    dist.push_back(row);
  }
  j["dist"] = dist;
  json measure = json::array();
  for (int i = 0; i < s.n(); ++i) measure.push_back(s.measure(i));
  j["measure"] = measure;
  if (!s.labels.empty()) j["labels"] = s.labels;
  if (act != nullptr) {
    j["action"]["group"] = group_to_json(act->group);
    j["action"]["perms"] = act->perm;
  }
  return j;
}

inline FiniteMMSpace mm_space_from_json(const json& j) {
  FiniteMMSpace s;
  const auto& dist = j.at("dist");
  const int n = static_cast<int>(dist.size());
  s.dist.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) s.dist(i, k) = dist.at(i).at(k).get<double>();
  s.measure.resize(n);
  if (j.contains("measure")) {
    for (int i = 0; i < n; ++i) s.measure(i) = j.at("measure").at(i).get<double>();
  } else {
    s.measure.setOnes();
  }
  if (j.contains("labels")) s.labels = j.at("labels").get<std::vector<std::string>>();
  s.validate();
  return s;
}

inline IsometricAction action_from_json(const json& j, const FiniteMMSpace& space) {
  IsometricAction act;
  act.group = group_from_json(j.at("group"));
  act.perm = j.at("perms").get<std::vector<std::vector<int>>>();
  act.validate(space);
  return act;
}

/// Distance matrix from CSV (comma-separated rows), unit masses.
inline FiniteMMSpace mm_space_from_csv(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  FiniteMMSpace s;
  s.dist.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw std::invalid_argument("ragged distance CSV");
    for (int k = 0; k < n; ++k) s.dist(i, k) = rows[i][k];
  }
  s.measure = Eigen::VectorXd::Ones(n);
  s.validate();
  return s;
}

// ------------------------------------------------------------ connections

inline json element_to_json(const CompactGroupModel& g, const GroupElement& e) {
  switch (g.kind) {
    case GroupKind::finite: return json{{"index", std::get<int>(e)}};
    case GroupKind::u1: return json{{"angle", std::get<double>(e)}};
    case GroupKind::su2: {
      const Quat& q = std::get<Quat>(e);
      return json{{"quat", {q.a, q.b, q.c, q.d}}};
    }
  }
  throw std::logic_error("bad kind");
}

inline GroupElement element_from_json(const CompactGroupModel& g, const json& j) {
  switch (g.kind) {
    case GroupKind::finite: return j.at("index").get<int>();
    case GroupKind::u1: return j.at("angle").get<double>();
    case GroupKind::su2: {
      const auto q = j.at("quat");
      return Quat{q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                  q.at(3).get<double>()};
    }
  }
  throw std::logic_error("bad kind");
}

inline json connection_to_json(const DiscreteConnection& c) {
  json j;
  j["group"] = group_to_json(c.group);
  if (c.base.kind == BaseLattice::Kind::torus_grid) {
    j["base"] = {{"kind", "torus_grid"}, {"sizes", c.base.sizes}, {"lengths", c.base.lengths}};
    json links = json::array();
    for (const auto& dir_links : c.grid_links) {
      json dl = json::array();
      for (const auto& e : dir_links) dl.push_back(element_to_json(c.group, e));
      links.push_back(dl);
    }
    j["links"] = links;
  } else {
    json edges = json::array();
    for (const auto& e : c.base.edges) edges.push_back({e.u, e.v, e.w});
    j["base"] = {{"kind", "graph"}, {"n", c.base.n_vertices()}, {"edges", edges}};
    json links = json::array();
    for (const auto& e : c.edge_links) links.push_back(element_to_json(c.group, e));
    j["links"] = links;
  }
  return j;
}

inline DiscreteConnection connection_from_json(const json& j) {
  DiscreteConnection c;
  c.group = group_from_json(j.at("group"));
  const auto& bj = j.at("base");
  const std::string kind = bj.at("kind").get<std::string>();
  if (kind == "torus_grid") {
    c.base = BaseLattice::torus(bj.at("sizes").get<std::vector<int>>(),
                                bj.at("lengths").get<std::vector<double>>());
    for (const auto& dl : j.at("links")) {
      std::vector<GroupElement> links;
      for (const auto& ej : dl) links.push_back(element_from_json(c.group, ej));
      if (static_cast<int>(links.size()) != c.base.n_vertices())
        throw std::invalid_argument("link count mismatch");
      c.grid_links.push_back(std::move(links));
    }
    if (static_cast<int>(c.grid_links.size()) != c.base.dims())
      throw std::invalid_argument("one link family per direction");
  } else if (kind == "graph") {
    std::vector<BaseLattice::Edge> edges;
    for (const auto& ej : bj.at("edges"))
      edges.push_back({ej.at(0).get<int>(), ej.at(1).get<int>(), ej.at(2).get<double>()});
    c.base = BaseLattice::graph(bj.at("n").get<int>(), std::move(edges));
    for (const auto& ej : j.at("links")) c.edge_links.push_back(element_from_json(c.group, ej));
    if (c.edge_links.size() != c.base.edges.size())
      throw std::invalid_argument("one link per edge");
  } else {
    throw std::invalid_argument("unknown base kind: " + kind);
  }
  // reversed links are inverses by construction of the accessors; verify
  // grid link count only
  return c;
}

// ----------------------------------------------------------- spectra/CSV

/// CSV rows "scenario,i,j,lambda,residual"; i is the sequence index of the
/// operator within the scenario.
inline std::string spectrum_csv(const std::string& scenario,
                                const std::vector<std::pair<int, Spectrum>>& spectra) {
  std::ostringstream out;
  out << "scenario,i,j,lambda,residual\n";
  for (const auto& [i, s] : spectra)
    for (int j = 0; j < s.count(); ++j) {
      out << scenario << ',' << i << ',' << j << ',' << format_number(s.values(j)) << ','
          << format_number(s.residuals.size() > j ? s.residuals(j) : 0.0) << '\n';
    }
  return out.str();
}

inline json spectrum_to_json(const std::string& scenario,
                             const std::vector<std::pair<int, Spectrum>>& spectra) {
  json rows = json::array();
  for (const auto& [i, s] : spectra)
    for (int j = 0; j < s.count(); ++j)
      rows.push_back({{"scenario", scenario},
                      {"i", i},
                      {"j", j},
                      {"lambda", s.values(j)},
                      {"residual", s.residuals.size() > j ? s.residuals(j) : 0.0}});
  return rows;
}

/// Coordinate-list dump of the stiffness matrix plus the mass diagonal,
/// for external cross-checks.
inline std::string operator_coo(const SymmetricOperator& op) {
  std::ostringstream out;
  out << "# symmetric operator: dim " << op.dim << ", domain " << op.domain << "\n";
  out << "# row col value (stiffness)\n";
  for (int k = 0; k < op.stiffness.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << format_number(it.value()) << '\n';
  out << "# mass\n";
  for (int i = 0; i < op.dim; ++i) out << i << ' ' << format_number(op.mass(i)) << '\n';
  return out.str();
}

/// Curvature field to CSV keyed by vertex multi-index.
inline std::string curvature_csv(const BaseLattice& base, const CurvatureField& f) {
  std::ostringstream out;
  out << "vertex";
  for (int d = 0; d < base.dims(); ++d) out << ",x" << d;
  for (int i = 0; i < f.dims; ++i)
    for (int j = i + 1; j < f.dims; ++j)
      for (int a = 0; a < f.lie_dim; ++a) out << ",F" << i << j << "_" << a;
  out << '\n';
  for (int v = 0; v < f.n_vertices; ++v) {
    out << v;
    for (int c : base.coords(v)) out << ',' << c;
    for (int i = 0; i < f.dims; ++i)
      for (int j = i + 1; j < f.dims; ++j) {
        const Eigen::VectorXd val = f.at(v, i, j);
        for (int a = 0; a < f.lie_dim; ++a) out << ',' << format_number(val(a));
      }
    out << '\n';
  }
  return out.str();
}

}  // namespace kks
