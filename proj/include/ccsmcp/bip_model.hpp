#pragma once

// A 0-1 linear program produced by the reformulation builders. Variables are
// classed: structural x (branched), product auxiliaries y (recovered as
// subset products), scenario indicators z (recovered by coverage-row
// completion). The objective touches only x.

#include <map>
#include <string>
#include <vector>

namespace ccsmcp {

enum class Sense : char { le = 'L', ge = 'G', eq = 'E' };

struct LinConstraint {
  std::vector<std::pair<int, double>> coeffs;  // sparse, sorted by var
  Sense sense = Sense::le;
  double rhs = 0.0;
};

enum class VarClass : char { structural = 'x', product = 'y', scenario = 'z' };

struct BipModel {
  std::vector<std::string> var_names;
  std::vector<double> objective;
  std::vector<bool> is_binary;
  std::vector<VarClass> var_class;
  std::vector<LinConstraint> constraints;

  int num_x = 0;  // structural vars occupy [0, num_x)

  // product aux -> the column subset it represents (empty for others)
  std::vector<std::vector<int>> aux_subset;
  std::map<std::vector<int>, int> product_memo;

  // scenario indicator -> its coverage row (A x >= k z) and demand k
  struct ScenarioLink {
    int zvar;
    int cover_row;
    double k;
  };
  std::vector<ScenarioLink> scenario_links;

  int add_var(std::string name, double obj, bool binary, VarClass cls) {
    var_names.push_back(std::move(name));
    objective.push_back(obj);
    is_binary.push_back(binary);
    var_class.push_back(cls);
    aux_subset.emplace_back();
    return int(var_names.size()) - 1;
  }

  int add_constraint(LinConstraint c) {
    constraints.push_back(std::move(c));
    return int(constraints.size()) - 1;
  }

  int num_vars() const { return int(var_names.size()); }
};

}  // namespace ccsmcp
