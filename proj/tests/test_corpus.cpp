#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "twistcart/corpus.hpp"

using namespace twistcart;
using namespace twistcart::corpus;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("twistcart_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string shipped(const std::string& rel) { return (fs::path(default_dir()) / rel).string(); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Parse;
}

}  // namespace

TEST(Corpus, ShippedFilesMatchBuilders) {
  fs::path tmp = scratch("regen");
  write_corpus(tmp.string());
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(default_dir())) {
    if (!e.is_regular_file()) continue;
    fs::path rel = fs::relative(e.path(), default_dir());
    ASSERT_TRUE(fs::exists(tmp / rel)) << rel;
    EXPECT_EQ(slurp(e.path()), slurp(tmp / rel)) << rel;
    ++files;
  }
  std::size_t regenerated = 0;
  for (const auto& e : fs::recursive_directory_iterator(tmp))
    if (e.is_regular_file()) ++regenerated;
  EXPECT_EQ(files, regenerated);
  fs::remove_all(tmp);
}

TEST(Corpus, ManifestValidates) {
  auto entries = load_manifest(default_dir());
  EXPECT_EQ(entries.size(), 51u);
  std::set<std::string> names;
  for (const auto& e : entries) EXPECT_TRUE(names.insert(e.name).second) << e.name;
  EXPECT_EQ(validate_corpus(default_dir()), 51u);
}

TEST(Corpus, ModelsRoundTrip) {
  for (const auto& m : models()) {
    ModelFile f = load_model(shipped("models/" + m.name + ".json"));
    EXPECT_EQ(f.rank, m.rank) << m.name;
    EXPECT_EQ(f.poly_cap, m.cap) << m.name;
    EXPECT_EQ(f.model.label, m.model.label) << m.name;
    EXPECT_EQ(f.model.d, m.model.d) << m.name;
    ASSERT_EQ(f.model.contractions.size(), m.model.contractions.size()) << m.name;
    for (std::size_t i = 0; i < m.model.contractions.size(); ++i) EXPECT_EQ(f.model.contractions[i], m.model.contractions[i]);
    for (std::size_t a = 0; a < m.model.size(); ++a)
      for (std::size_t b = 0; b < m.model.size(); ++b) EXPECT_EQ(f.model.product[a][b], m.model.product[a][b]) << m.name;
  }
}

TEST(Corpus, TwistingsRoundTripAndExactFlags) {
  for (const auto& t : twistings()) {
    LoadedTwisting l = load_twisting(shipped("twistings/" + t.name + ".json"));
    EXPECT_EQ(l.eta, t.eta) << t.name;
    EXPECT_EQ(l.exact, t.exact) << t.name;
    CartanComplex c = build_cartan(l.model.model, l.model.rank, l.model.poly_cap);
    EXPECT_TRUE(is_closed(c, l.eta)) << t.name;
    EXPECT_EQ(is_exact(c, l.eta), t.exact) << t.name;
  }
}

TEST(Corpus, PairsRoundTrip) {
  for (int k : {1, 2, 3}) {
    WeightPair w = weight_rep_pair(k);
    CartanPair p = load_pair(shipped("pairs/weight" + std::to_string(k) + ".json"));
    EXPECT_EQ(p.restriction, w.pair.restriction) << k;
    EXPECT_EQ(p.big.model.label, w.pair.big.model.label);
    EXPECT_EQ(p.small.model.label, w.pair.small.model.label);
    EXPECT_EQ(p.big.window, w.pair.big.window);
  }
  CartanPair s = subtorus_pair(), l = load_pair(shipped("pairs/t3_t2_subtorus.json"));
  EXPECT_EQ(l.restriction, s.restriction);
  EXPECT_EQ(l.small.model.label, s.small.model.label);
}

TEST(Corpus, ChainMapsRoundTrip) {
  for (const auto& m : chain_maps()) {
    ChainMap l = load_chain_map(shipped("complexes/map_" + m.name + ".json"));
    EXPECT_EQ(l.source.labels, m.map.source.labels) << m.name;
    EXPECT_EQ(l.target.labels, m.map.target.labels) << m.name;
    for (const auto& [n, lab] : m.map.source.labels) EXPECT_EQ(l.component(n), m.map.component(n)) << m.name << " " << n;
  }
}

TEST(Corpus, GCValidityFlags) {
  GCExamples g = gc_point_examples();
  for (const auto& s : g.structures) {
    json j = read_json_file(shipped("gc/" + s.name + ".json"));
    EXPECT_EQ(rmatrix_from_json(j.at("J")), s.j) << s.name;
    EXPECT_EQ(is_gc(s.j).ok, s.valid) << s.name;
  }
  for (const auto& t : g.triples) {
    GKTriple l = triple_from_json(read_json_file(shipped("gc/" + t.name + ".json")));
    EXPECT_EQ(l.g, t.triple.g) << t.name;
    EXPECT_EQ(l.iplus, t.triple.iplus) << t.name;
    EXPECT_EQ(l.iminus, t.triple.iminus) << t.name;
    EXPECT_EQ(l.b, t.triple.b) << t.name;
  }
}

TEST(Corpus, EnvironmentOverridesDirectory) {
  const char* old = std::getenv("TWISTCART_CORPUS");
  std::string saved = old ? old : "";
  ::setenv("TWISTCART_CORPUS", "/nonexistent/corpus", 1);
  EXPECT_EQ(default_dir(), "/nonexistent/corpus");
  EXPECT_EQ(kind_of([] { load_manifest(default_dir()); }), ErrorKind::Parse);
  if (old)
    ::setenv("TWISTCART_CORPUS", saved.c_str(), 1);
  else
    ::unsetenv("TWISTCART_CORPUS");
}

TEST(Corpus, LoaderErrors) {
  fs::path tmp = scratch("errors");
  write_corpus(tmp.string());
  auto put = [&](const std::string& rel, const std::string& text) { std::ofstream(tmp / rel) << text; };

  EXPECT_EQ(kind_of([&] { load_model((tmp / "models/missing.json").string()); }), ErrorKind::Parse);
  put("models/broken.json", "{\"generators\": [");
  EXPECT_EQ(kind_of([&] { load_model((tmp / "models/broken.json").string()); }), ErrorKind::Parse);

  json m = read_json_file((tmp / "models/t2.json").string());
  m["basis"][1] = "theta9";
  put("models/relabelled.json", m.dump());
  EXPECT_EQ(kind_of([&] { load_model((tmp / "models/relabelled.json").string()); }), ErrorKind::Parse);

  m = read_json_file((tmp / "models/t2.json").string());
  m["product"].push_back(json::array({99, 0, 0, "1"}));
  put("models/range.json", m.dump());
  EXPECT_EQ(kind_of([&] { load_model((tmp / "models/range.json").string()); }), ErrorKind::Parse);

  // theta1 x on the free circle: d_G(theta1 x) = -x^2, not closed
  json t = read_json_file((tmp / "twistings/s1_free_zero.json").string());
  t["terms"] = json::array({json{{"form", "theta1"}, {"poly", {1}}, {"coef", "1"}}});
  put("twistings/s1_free_zero.json", t.dump());
  EXPECT_EQ(kind_of([&] { validate_corpus(tmp.string()); }), ErrorKind::NotClosed);

  write_corpus(tmp.string());
  json man = read_json_file((tmp / "manifest.json").string());
  man["version"] = corpus_version + 1;
  put("manifest.json", man.dump());
  EXPECT_EQ(kind_of([&] { validate_corpus(tmp.string()); }), ErrorKind::Parse);

  write_corpus(tmp.string());
  man = read_json_file((tmp / "manifest.json").string());
  man["entries"].push_back(json{{"name", "odd"}, {"kind", "mystery"}, {"file", ""}});
  put("manifest.json", man.dump());
  EXPECT_EQ(kind_of([&] { validate_corpus(tmp.string()); }), ErrorKind::Parse);

  write_corpus(tmp.string());
  json g = read_json_file((tmp / "gc/identity_nonexample.json").string());
  g["valid"] = true;
  put("gc/identity_nonexample.json", g.dump());
  EXPECT_EQ(kind_of([&] { validate_corpus(tmp.string()); }), ErrorKind::NotGC);
  fs::remove_all(tmp);
}
