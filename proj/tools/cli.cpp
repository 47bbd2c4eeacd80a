// Batch front-end: parameter validation, constructions, certifications.
// Exit codes: 0 success, 1 certification failure, 2 usage error.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xnlab/averages.hpp"
#include "xnlab/gen.hpp"
#include "xnlab/norm.hpp"
#include "xnlab/operator_lab.hpp"
#include "xnlab/suite.hpp"

using namespace xn;
using core::Elem;
using core::Vec00;
using nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("BAD_INPUT", "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& text, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(outPath);
    out << text;
  }
}

params::ParamSystem load_system(const std::string& configPath, int extendedK) {
  if (!configPath.empty())
    return build_param_system(params::config_from_json(slurp(configPath)));
  if (extendedK > 0)
    return build_param_system(params::extended_desk_config(extendedK));
  return build_param_system(params::desk_config());
}

std::vector<Elem> parse_set(const std::string& s) {
  std::vector<Elem> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stoll(item));
  return v;
}

// "j:num/den,j:num/den" into a vector
Vec00 parse_vector(const std::string& s) {
  Vec00 x;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw Error("BAD_INPUT", "vector entries look like index:value");
    x.set(std::stoll(item.substr(0, colon)), parse_rat(item.substr(colon + 1)));
  }
  return x;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact workbench for Schreier families, norming trees and the operator"};
  app.require_subcommand(1);

  std::string configPath, outPath;
  int extendedK = 0;
  app.add_option("--config", configPath, "parameter config as JSON");
  app.add_option("--extended", extendedK, "use the extended system with this many classes");
  app.add_option("--out", outPath, "write the report here instead of stdout");

  auto* vp = app.add_subcommand("validate-params", "build and report a parameter system");

  auto* sc = app.add_subcommand("schreier", "membership, witnesses and splits");
  std::string setArg;
  int levelArg = 1, innerArg = 0, outerArg = 1;
  std::string schreierOp = "member";
  sc->add_option("op", schreierOp, "member | witness | split")->required();
  sc->add_option("--set", setArg, "comma-separated elements")->required();
  sc->add_option("--n", levelArg, "family level");
  sc->add_option("--inner", innerArg, "inner level for split");
  sc->add_option("--outer", outerArg, "outer level for split");

  auto* nc = app.add_subcommand("norm", "two-sided norm estimate with certificate");
  std::string vecArg;
  int depthArg = 8;
  std::string tolArg = "0";
  nc->add_option("--vector", vecArg, "entries as index:value,...")->required();
  nc->add_option("--depth", depthArg, "iteration cap");
  nc->add_option("--tol", tolArg, "early-exit gap tolerance");

  auto* dc = app.add_subcommand("decompose", "leaf decomposition of a functional tree");
  std::string treePath;
  int kArg = 1;
  dc->add_option("--tree", treePath, "tree document path")->required();
  dc->add_option("--k", kArg, "class index");

  auto* ac = app.add_subcommand("build-averages", "repeated-average block and its functional");
  std::string epsArg = "2";
  long startArg = 4, budgetArg = 4096;
  ac->add_option("--k", kArg, "class index");
  ac->add_option("--eps", epsArg, "requested smallness");
  ac->add_option("--start", startArg, "first support element");
  ac->add_option("--budget", budgetArg, "support size budget");

  auto* bo = app.add_subcommand("build-operator", "assemble the operator document");
  int countArg = 4;
  bo->add_option("--count", countArg, "number of functionals");
  bo->add_option("--start", startArg, "first support element");
  bo->add_option("--budget", budgetArg, "support size budget per functional");

  auto* cc = app.add_subcommand("certify", "norm-bound certification over a random corpus");
  std::string opPath;
  long trialsArg = 50;
  std::uint64_t seedArg = 2026;
  cc->add_option("--operator", opPath, "operator document path")->required();
  cc->add_option("--trials", trialsArg, "corpus size");
  cc->add_option("--seed", seedArg, "rng seed");

  auto* wc = app.add_subcommand("witness", "non-compactness witness family");
  wc->add_option("--operator", opPath, "operator document path")->required();
  wc->add_option("--count", countArg, "family size");

  auto* su = app.add_subcommand("suite", "acceptance criteria");
  bool allFlag = false;
  int criterionArg = 0;
  su->add_flag("--all", allFlag, "run all criteria");
  su->add_option("--criterion", criterionArg, "run one criterion (1..8)");
  su->add_option("--seed", seedArg, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*vp) {
      auto sys = load_system(configPath, extendedK);
      ordered_json j;
      j["K"] = sys.cfg.K;
      j["q"] = rat_str(sys.q);
      j["m2"] = sys.m[2].get_str();
      for (int i = 2; i <= sys.cfg.K; ++i) j["f"][std::to_string(i)] = sys.f_of(i);
      for (int k = 1; k <= sys.cfg.K; ++k) j["p"][std::to_string(k)] = sys.pk_of(k);
      j["M"] = rat_str(sys.M);
      j["M_below_one"] = sys.M < 1;
      j["warnings"] = sys.warnings;
      emit(j.dump(2), outPath);
      return 0;
    }
    if (*sc) {
      auto sys = load_system(configPath, extendedK);
      core::FiniteSubset f{parse_set(setArg)};
      ordered_json j;
      if (schreierOp == "member") {
        j["member"] = schreier::is_member(f, levelArg);
      } else if (schreierOp == "witness") {
        auto w = schreier::witness(f, levelArg);
        j["member"] = w.has_value();
        if (w) j["valid"] = schreier::validate_witness(*w);
      } else if (schreierOp == "split") {
        auto parts = schreier::split(f, innerArg, outerArg);
        j["splittable"] = parts.has_value();
        if (parts) {
          auto& arr = j["parts"];
          arr = ordered_json::array();
          for (const auto& p : *parts) arr.push_back(p.elems());
        }
      } else {
        std::cerr << "unknown schreier op: " << schreierOp << "\n";
        return 2;
      }
      emit(j.dump(2), outPath);
      return 0;
    }
    if (*nc) {
      auto sys = load_system(configPath, extendedK);
      Vec00 x = parse_vector(vecArg);
      auto nr = norm::norm(x, sys, depthArg, parse_rat(tolArg));
      ordered_json j;
      j["value"] = rat_str(nr.value);
      j["upper"] = rat_str(nr.upper);
      j["gap"] = rat_str(nr.gap);
      j["stabilized"] = nr.stabilized;
      j["depth"] = nr.depth;
      j["certificate"] = ordered_json::parse(core::tree_to_json(nr.certificate));
      emit(j.dump(2), outPath);
      return 0;
    }
    if (*dc) {
      auto sys = load_system(configPath, extendedK);
      core::Node t = core::tree_from_json(slurp(treePath));
      auto d = core::decompose(t, kArg, sys);
      ordered_json j;
      j["k"] = d.k;
      auto& lam = j["lambda"];
      lam = ordered_json::array();
      for (const auto& l : d.lambda) lam.push_back(rat_str(l));
      j["I1"] = d.I1;
      j["I2"] = d.I2;
      j["leafIndices"] = d.leafIndices.elems();
      emit(j.dump(2), outPath);
      return 0;
    }
    if (*ac) {
      auto sys = load_system(configPath, extendedK);
      auto a = avg::build_average(sys, kArg, parse_rat(epsArg), startArg, budgetArg);
      core::Node t = avg::build_xk(sys, a);
      ordered_json j;
      j["average"] = ordered_json::parse(avg::average_to_json(a));
      j["tree"] = ordered_json::parse(core::tree_to_json(t));
      auto s = avg::seminorm_lower(a, sys);
      j["seminormLower"] = rat_str(s.bound);
      emit(j.dump(2), outPath);
      return 0;
    }
    if (*bo) {
      auto sys = load_system(configPath, extendedK > 0 ? extendedK : 8);
      auto T = oplab::build_operator(sys, countArg, startArg, budgetArg);
      emit(oplab::operator_to_json(T), outPath);
      return 0;
    }
    if (*cc) {
      auto sys = load_system(configPath, extendedK > 0 ? extendedK : 8);
      auto T = oplab::operator_from_json(slurp(opPath));
      gen::Rng rng(seedArg);
      std::vector<Vec00> corpus;
      Elem cursor = 8;
      for (long t = 0; t < trialsArg; ++t)
        corpus.push_back(gen::normalized_block(rng, cursor, static_cast<int>(rng.uniform(4, 16)), sys));
      auto rep = oplab::certify_norm_bound(T, corpus, sys, seedArg);
      ordered_json j;
      j["vectors"] = rep.vectors;
      j["bound"] = rat_str(rep.bound);
      j["worstRatio"] = rat_str(rep.worstRatio);
      j["dualChecks"] = rep.dualChecks;
      j["bandChecks"] = rep.bandChecks;
      j["violations"] = rep.violations;
      emit(j.dump(2), outPath);
      return rep.ok() ? 0 : 1;
    }
    if (*wc) {
      auto sys = load_system(configPath, extendedK > 0 ? extendedK : 8);
      auto T = oplab::operator_from_json(slurp(opPath));
      auto w = oplab::noncompact_witness(T, countArg, sys);
      ordered_json j;
      j["count"] = w.points.size();
      j["delta"] = rat_str(w.delta);
      auto& imgs = j["imageSpikes"];
      imgs = ordered_json::array();
      for (const auto& im : w.images)
        for (const auto& [idx, c] : im.entries())
          imgs.push_back({{"index", idx}, {"value", rat_str(c)}});
      emit(j.dump(2), outPath);
      return w.delta > 0 ? 0 : 1;
    }
    if (*su) {
      suite::SuiteResult s;
      if (criterionArg > 0) {
        s.results.push_back(suite::run_criterion(criterionArg, seedArg));
      } else {
        s = suite::run_all(seedArg);
      }
      emit(suite::suite_to_json(s), outPath);
      return s.allPass() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}
