#pragma once

// JSON encoding of rationals, matrices, models, equivariant forms and
// cochain complexes. Rationals travel as "p/q" strings.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistcart/cartan.hpp"
#include "twistcart/dense.hpp"
#include "twistcart/dg_core.hpp"
#include "twistcart/error.hpp"
#include "twistcart/rational.hpp"

namespace twistcart {

using json = nlohmann::ordered_json;

inline json to_json(const Rational& q) { return to_string(q); }

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw Error(ErrorKind::Parse, "expected a rational string, got " + j.dump());
}

inline json to_json(const Gaussian& z) { return json{{"re", to_string(z.re)}, {"im", to_string(z.im)}}; }

inline Gaussian gaussian_from_json(const json& j) {
  if (!j.is_object()) return Gaussian(rational_from_json(j));
  return Gaussian(rational_from_json(j.at("re")), rational_from_json(j.at("im")));
}

template <class F>
json matrix_to_json(const Matrix<F>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(to_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

inline Matrix<Rational> rmatrix_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "matrix must be an array of rows");
  std::vector<std::vector<Rational>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw Error(ErrorKind::Parse, "matrix row must be an array");
    std::vector<Rational> row;
    for (const auto& x : r) row.push_back(rational_from_json(x));
    rows.push_back(row);
  }
  return Matrix<Rational>::from_rows(rows);
}

inline std::vector<Rational> rvector_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "vector must be an array");
  std::vector<Rational> v;
  for (const auto& x : j) v.push_back(rational_from_json(x));
  return v;
}

template <class F>
json vector_to_json(const std::vector<F>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline json triplets_to_json(const QMat& m) {
  json a = json::array();
  for (const auto& [i, k, x] : m.triplets()) a.push_back(json::array({i, k, to_string(x)}));
  return a;
}

inline QMat triplets_from_json(const json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "sparse matrix must be a list of [row, col, value]");
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> t;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3) throw Error(ErrorKind::Parse, "sparse entry must be [row, col, value]");
    long r = e[0].get<long>(), c = e[1].get<long>();
    if (r < 0 || c < 0 || static_cast<std::size_t>(r) >= rows || static_cast<std::size_t>(c) >= cols)
      throw Error(ErrorKind::Parse, "sparse entry out of range: " + e.dump());
    t.emplace_back(r, c, rational_from_json(e[2]));
  }
  return QMat::from_triplets(rows, cols, t);
}

// Model files: generators, optional product table [i, j, k, c], d and
// contractions as sparse matrices on the monomial basis.
struct ModelFile {
  CDGAModel model;
  int rank = 0;
  int poly_cap = 1;
};

inline json model_to_json(const CDGAModel& m, int rank, int poly_cap) {
  json j;
  j["name"] = m.name;
  json gens = json::array();
  for (const auto& g : m.generators) {
    json e{{"name", g.name}, {"degree", g.degree}};
    if (g.degree % 2 == 0) e["cap"] = g.cap;
    gens.push_back(e);
  }
  j["generators"] = gens;
  j["basis"] = m.label;
  json prod = json::array();
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = 0; b < m.size(); ++b)
      for (const auto& [k, x] : m.product[a][b].entries) prod.push_back(json::array({a, b, k, to_string(x)}));
  j["product"] = prod;
  j["d"] = triplets_to_json(m.d);
  json cs = json::array();
  for (const auto& c : m.contractions) cs.push_back(triplets_to_json(c));
  j["contractions"] = cs;
  j["rank"] = rank;
  j["polyCap"] = poly_cap;
  return j;
}

inline ModelFile model_from_json(const json& j) {
  try {
    std::vector<Generator> gens;
    for (const auto& g : j.at("generators"))
      gens.push_back(Generator{g.at("name").get<std::string>(), g.at("degree").get<int>(), g.value("cap", 1)});
    ModelFile mf;
    mf.model = free_algebra(j.value("name", std::string("model")), gens);
    std::size_t n = mf.model.size();
    if (j.contains("basis") && j.at("basis").get<std::vector<std::string>>() != mf.model.label)
      throw Error(ErrorKind::Parse, "basis labels do not match the generator enumeration");
    if (j.contains("product")) {
      std::vector<std::vector<std::map<std::size_t, Rational>>> acc(n, std::vector<std::map<std::size_t, Rational>>(n));
      for (const auto& e : j.at("product")) {
        if (!e.is_array() || e.size() != 4) throw Error(ErrorKind::Parse, "product entry must be [i, j, k, c]");
        auto a = e[0].get<std::size_t>(), b = e[1].get<std::size_t>(), k = e[2].get<std::size_t>();
        if (a >= n || b >= n || k >= n) throw Error(ErrorKind::Parse, "product entry out of range");
        acc[a][b][k] += rational_from_json(e[3]);
      }
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) mf.model.product[a][b] = QVec::from_map(acc[a][b]);
    }
    if (j.contains("d")) mf.model.d = triplets_from_json(j.at("d"), n, n);
    for (const auto& c : j.value("contractions", json::array())) mf.model.contractions.push_back(triplets_from_json(c, n, n));
    mf.rank = j.value("rank", static_cast<int>(mf.model.contractions.size()));
    mf.poly_cap = j.value("polyCap", 1);
    validate_model(mf.model);
    return mf;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model file: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path);
  out << j.dump(2) << "\n";
}

// Forms: [{"form": "theta1*theta2", "poly": [1, 0], "coef": "1/2"}, ...]
inline json form_to_json(const CDGAModel& m, const EqForm& f) {
  json a = json::array();
  for (const auto& [k, x] : f.terms) a.push_back(json{{"form", m.label[k.first]}, {"poly", k.second}, {"coef", to_string(x)}});
  return a;
}

inline EqForm form_from_json(const CDGAModel& m, int rank, const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "form must be a list of terms");
  EqForm f;
  for (const auto& t : j) {
    std::string l = t.at("form").get<std::string>();
    auto idx = m.find_label(l);
    if (!idx) throw Error(ErrorKind::Parse, "unknown basis element '" + l + "'");
    Multi poly = t.value("poly", Multi(rank, 0));
    if (poly.size() != static_cast<std::size_t>(rank)) throw Error(ErrorKind::Parse, "poly exponent has the wrong length");
    for (int e : poly)
      if (e < 0) throw Error(ErrorKind::Parse, "negative exponent");
    f.add({*idx, poly}, rational_from_json(t.at("coef")));
  }
  return f;
}

inline json complex_to_json(const CochainComplex& c) {
  json j;
  json degs = json::array(), labels = json::object(), diffs = json::object();
  for (const auto& [n, l] : c.labels) {
    degs.push_back(n);
    labels[std::to_string(n)] = l;
  }
  for (const auto& [n, m] : c.d)
    if (m.nnz()) diffs[std::to_string(n)] = triplets_to_json(m);
  j["degrees"] = degs;
  j["labels"] = labels;
  j["differentials"] = diffs;
  return j;
}

inline CochainComplex complex_from_json(const json& j) {
  try {
    CochainComplex c;
    for (const auto& n : j.at("degrees")) {
      int d = n.get<int>();
      c.labels[d] = j.at("labels").at(std::to_string(d)).get<std::vector<std::string>>();
    }
    json diffs = j.value("differentials", json::object());
    for (const auto& [key, m] : diffs.items()) {
      int n = std::stoi(key);
      c.d[n] = triplets_from_json(m, c.dim(n + 1), c.dim(n));
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("complex: ") + e.what());
  }
}

}  // namespace twistcart
