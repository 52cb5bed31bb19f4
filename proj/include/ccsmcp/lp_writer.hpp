#pragma once

// Deterministic LP-format export of a BipModel for cross-checking against
// external solvers. Coefficients carry 17 significant digits.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccsmcp/bip_model.hpp"

namespace ccsmcp {

namespace lpwriter_detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_terms(std::ostream& out, const std::vector<std::pair<int, double>>& coeffs,
                        const std::vector<std::string>& names) {
  // canonical order: sorted by variable name
  std::vector<std::pair<std::string, double>> terms;
  for (auto [j, c] : coeffs)
    if (c != 0.0) terms.emplace_back(names[std::size_t(j)], c);
  std::sort(terms.begin(), terms.end());
  bool first = true;
  for (const auto& [name, c] : terms) {
    if (first) {
      out << (c < 0 ? "- " : "") << num(std::fabs(c)) << " " << name;
      first = false;
    } else {
      out << (c < 0 ? " - " : " + ") << num(std::fabs(c)) << " " << name;
    }
  }
  if (first) out << "0 dummy";
}

}  // namespace lpwriter_detail

inline std::string export_lp_string(const BipModel& model) {
  std::ostringstream out;
  out << "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < model.num_vars(); ++j)
    if (model.objective[std::size_t(j)] != 0.0)
      obj.emplace_back(j, model.objective[std::size_t(j)]);
  lpwriter_detail::write_terms(out, obj, model.var_names);
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < model.constraints.size(); ++r) {
    const auto& c = model.constraints[r];
    out << " c" << r << ": ";
    lpwriter_detail::write_terms(out, c.coeffs, model.var_names);
    switch (c.sense) {
      case Sense::le: out << " <= "; break;
      case Sense::ge: out << " >= "; break;
      case Sense::eq: out << " = "; break;
    }
    out << lpwriter_detail::num(c.rhs) << "\n";
  }
  // names in canonical order for the declaration sections
  std::vector<int> order(std::size_t(model.num_vars()));
  for (int j = 0; j < model.num_vars(); ++j) order[std::size_t(j)] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return model.var_names[std::size_t(a)] < model.var_names[std::size_t(b)];
  });
  out << "Bounds\n";
  for (int j : order)
    if (!model.is_binary[std::size_t(j)])
      out << " 0 <= " << model.var_names[std::size_t(j)] << " <= 1\n";
  bool any_bin = false;
  for (int j : order) any_bin = any_bin || model.is_binary[std::size_t(j)];
  if (any_bin) {
    out << "Binaries\n";
    for (int j : order)
      if (model.is_binary[std::size_t(j)]) out << " " << model.var_names[std::size_t(j)] << "\n";
  }
  out << "End\n";
  return out.str();
}

inline void export_lp(const BipModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << export_lp_string(model);
  if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace ccsmcp
