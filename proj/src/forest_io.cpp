#include "oobball/forest_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oobball/errors.hpp"

namespace oobball {

namespace {

using nlohmann::json;

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError("model file: missing '" + where + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("model file: bad value at '" + where + key + "': " + e.what());
  }
}

}  // namespace

std::string forest_to_json(const ForestModel& model) {
  const Dataset& data = model.training();
  json j;
  j["format"] = "oobball-forest";
  j["version"] = kForestFormatVersion;
  j["flavor"] = flavor_name(model.flavor());
  j["params"] = {{"trees", model.params().trees},
                 {"mtry", model.params().resolved_mtry(data.predictor_space().arity())},
                 {"min_split_size", model.params().min_split_size},
                 {"seed", model.params().seed}};
  j["note"] = model.note;
  j["predictor_space"] = data.predictor_space().to_string();
  j["response_space"] = data.response_space().to_string();
  json xs = json::array(), ys = json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    xs.push_back(data.predictor(i));
    const auto y = data.responses()[i];
    ys.push_back(std::vector<double>(y.begin(), y.end()));
  }
  j["training"] = {{"predictors", std::move(xs)}, {"responses", std::move(ys)}};
  json trees = json::array();
  for (const auto& t : model.trees()) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) {
        json leaf = {{"members", n.members}};
        if (!n.value.empty()) leaf["value"] = n.value;
        nodes.push_back(std::move(leaf));
      } else {
        nodes.push_back({{"left", n.left},
                         {"right", n.right},
                         {"feature", n.rule.feature},
                         {"center_left", n.rule.left},
                         {"center_right", n.rule.right}});
      }
    }
    trees.push_back({{"counts", t.counts}, {"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

ForestModel forest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (field<std::string>(j, "format", "") != "oobball-forest") throw ParseError("not an oobball model file");
  const int version = field<int>(j, "version", "");
  if (version != kForestFormatVersion)
    throw ParseError("unsupported model format version " + std::to_string(version));

  const Flavor flavor = parse_flavor(field<std::string>(j, "flavor", ""));
  const json& pj = j.at("params");
  ForestParams params;
  params.trees = field<std::size_t>(pj, "trees", "params.");
  params.mtry = field<std::size_t>(pj, "mtry", "params.");
  params.min_split_size = field<std::size_t>(pj, "min_split_size", "params.");
  params.seed = field<std::uint64_t>(pj, "seed", "params.");

  Dataset data(ProductSpace::parse(field<std::string>(j, "predictor_space", "")),
               SpaceDescriptor::parse(field<std::string>(j, "response_space", "")));
  const auto xs = field<std::vector<std::vector<double>>>(j.at("training"), "predictors", "training.");
  const auto ys = field<std::vector<std::vector<double>>>(j.at("training"), "responses", "training.");
  if (xs.size() != ys.size()) throw ParseError("model file: predictor and response counts differ");
  data.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) data.add(xs[i], ys[i]);
  params.validate(data.predictor_space().arity());

  std::vector<Tree> trees;
  for (const auto& tj : j.at("trees")) {
    Tree t;
    t.counts = field<std::vector<std::uint16_t>>(tj, "counts", "trees[].");
    for (const auto& nj : tj.at("nodes")) {
      TreeNode n;
      if (nj.contains("members")) {
        n.members = field<std::vector<std::uint32_t>>(nj, "members", "nodes[].");
        if (nj.contains("value")) n.value = field<std::vector<double>>(nj, "value", "nodes[].");
        for (auto m : n.members)
          if (m >= data.size()) throw ParseError("model file: leaf member out of range");
        if (n.members.empty()) throw ParseError("model file: empty leaf");
      } else {
        n.left = field<std::int32_t>(nj, "left", "nodes[].");
        n.right = field<std::int32_t>(nj, "right", "nodes[].");
        n.rule.feature = field<std::size_t>(nj, "feature", "nodes[].");
        n.rule.left = field<std::vector<double>>(nj, "center_left", "nodes[].");
        n.rule.right = field<std::vector<double>>(nj, "center_right", "nodes[].");
        if (n.rule.feature >= data.predictor_space().arity()) throw ParseError("model file: split feature out of range");
        const std::size_t dim = data.predictor_space()[n.rule.feature].coordinate_count();
        if (n.rule.left.size() != dim || n.rule.right.size() != dim)
          throw ParseError("model file: split center has the wrong dimension");
      }
      t.nodes.push_back(std::move(n));
    }
    const auto count = static_cast<std::int32_t>(t.nodes.size());
    if (count == 0) throw ParseError("model file: tree without nodes");
    for (std::int32_t k = 0; k < count; ++k) {
      const auto& n = t.nodes[k];
      if (!n.is_leaf() && (n.left <= k || n.right <= k || n.left >= count || n.right >= count))
        throw ParseError("model file: invalid child index");
      if (flavor == Flavor::FRF && n.is_leaf() && n.value.size() != data.response_space().coordinate_count())
        throw ParseError("model file: FRF leaf without a fitted value");
    }
    trees.push_back(std::move(t));
  }
  if (trees.size() != params.trees) throw ParseError("model file: tree count does not match params.trees");
  ForestModel model(flavor, params, std::move(data), std::move(trees));
  model.note = j.value("note", std::string());
  return model;
}

void save_forest(const ForestModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << forest_to_json(model) << '\n';
  if (!out) throw Error("failed writing '" + path + "'");
}

ForestModel load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return forest_from_json(buffer.str());
}

}  // namespace oobball
