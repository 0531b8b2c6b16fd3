#include "tcsi/structural.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>

#include "tcsi/error.hpp"
#include "tcsi/keyvalue.hpp"

namespace tcsi {

namespace {

std::size_t intern(std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  names.push_back(name);
  return names.size() - 1;
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool is_active(const std::vector<bool>& active, std::size_t e) {
  return active.empty() || active.at(e);
}

}  // namespace

std::size_t StructuralModel::declare_unknown(const std::string& name) { return intern(unknowns_, name); }
std::size_t StructuralModel::declare_known(const std::string& name) { return intern(knowns_, name); }
std::size_t StructuralModel::declare_fault(const std::string& name) { return intern(faults_, name); }

void StructuralModel::add_equation(std::string label, const std::vector<std::string>& unknowns,
                                   const std::vector<std::string>& knowns,
                                   const std::vector<std::string>& faults) {
  EquationRow row;
  row.label = std::move(label);
  for (const auto& n : unknowns) row.unknowns.push_back(declare_unknown(n));
  for (const auto& n : knowns) row.knowns.push_back(declare_known(n));
  for (const auto& n : faults) row.faults.push_back(declare_fault(n));
  equations_.push_back(std::move(row));
}

std::size_t StructuralModel::equation_index(std::string_view label) const {
  for (std::size_t i = 0; i < equations_.size(); ++i) {
    if (equations_[i].label == label) return i;
  }
  throw InvalidParameter("no equation labelled '" + std::string(label) + "'");
}

const EquationRow& StructuralModel::equation(std::string_view label) const {
  return equations_[equation_index(label)];
}

std::size_t StructuralModel::fault_equation(std::size_t fault) const {
  std::optional<std::size_t> found;
  for (std::size_t e = 0; e < equations_.size(); ++e) {
    const auto& f = equations_[e].faults;
    if (std::find(f.begin(), f.end(), fault) == f.end()) continue;
    if (found) throw InvalidParameter("fault " + faults_.at(fault) + " appears in several equations");
    found = e;
  }
  if (!found) throw InvalidParameter("fault " + faults_.at(fault) + " is in no equation");
  return *found;
}

std::vector<std::string> StructuralModel::unknown_names(const EquationRow& row) const {
  std::vector<std::string> out;
  for (auto u : row.unknowns) out.push_back(unknowns_.at(u));
  return out;
}

void StructuralModel::validate() const {
  for (std::size_t i = 0; i < equations_.size(); ++i) {
    for (std::size_t j = i + 1; j < equations_.size(); ++j) {
      if (equations_[i].label == equations_[j].label) {
        throw InvalidParameter("duplicate equation label " + equations_[i].label);
      }
    }
    auto check = [&](const std::vector<std::size_t>& idx, std::size_t n, const char* what) {
      std::vector<std::size_t> sorted = idx;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidParameter("equation " + equations_[i].label + " repeats a " + what);
      }
      for (auto k : idx) {
        if (k >= n) throw InvalidParameter("equation " + equations_[i].label + " has a bad " + what);
      }
    };
    check(equations_[i].unknowns, unknowns_.size(), "unknown");
    check(equations_[i].knowns, knowns_.size(), "known");
    check(equations_[i].faults, faults_.size(), "fault");
  }
  for (std::size_t f = 0; f < faults_.size(); ++f) fault_equation(f);
}

Matching maximum_matching(const StructuralModel& model, const std::vector<bool>& active) {
  const auto& eqs = model.equations();
  const std::size_t ne = eqs.size(), nv = model.unknowns().size();
  Matching m{std::vector<int>(ne, -1), std::vector<int>(nv, -1), 0};
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> dist(ne);

  auto bfs = [&] {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t e = 0; e < ne; ++e) {
      if (is_active(active, e) && m.eq_to_var[e] < 0) {
        dist[e] = 0;
        q.push(e);
      } else {
        dist[e] = kInf;
      }
    }
    while (!q.empty()) {
      const std::size_t e = q.front();
      q.pop();
      for (auto v : eqs[e].unknowns) {
        const int w = m.var_to_eq[v];
        if (w < 0) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[e] + 1;
          q.push(static_cast<std::size_t>(w));
        }
      }
    }
    return found;
  };

  auto dfs = [&](auto&& self, std::size_t e) -> bool {
    for (auto v : eqs[e].unknowns) {
      const int w = m.var_to_eq[v];
      if (w < 0 || (dist[w] == dist[e] + 1 && self(self, static_cast<std::size_t>(w)))) {
        m.eq_to_var[e] = static_cast<int>(v);
        m.var_to_eq[v] = static_cast<int>(e);
        return true;
      }
    }
    dist[e] = kInf;
    return false;
  };

  while (bfs()) {
    for (std::size_t e = 0; e < ne; ++e) {
      if (is_active(active, e) && m.eq_to_var[e] < 0 && dfs(dfs, e)) ++m.size;
    }
  }
  return m;
}

DMDecomposition dm_decompose(const StructuralModel& model, const std::vector<bool>& active) {
  const auto& eqs = model.equations();
  const std::size_t ne = eqs.size(), nv = model.unknowns().size();
  DMDecomposition dm;
  dm.matching = maximum_matching(model, active);
  const Matching& m = dm.matching;

  std::vector<std::vector<std::size_t>> var_eqs(nv);
  std::vector<bool> used(nv, false);
  for (std::size_t e = 0; e < ne; ++e) {
    if (!is_active(active, e)) continue;
    for (auto v : eqs[e].unknowns) {
      var_eqs[v].push_back(e);
      used[v] = true;
    }
  }

  std::vector<bool> over_e(ne, false), over_v(nv, false);
  std::vector<std::size_t> stack;
  for (std::size_t e = 0; e < ne; ++e) {
    if (is_active(active, e) && m.eq_to_var[e] < 0) {
      over_e[e] = true;
      stack.push_back(e);
    }
  }
  while (!stack.empty()) {
    const std::size_t e = stack.back();
    stack.pop_back();
    for (auto v : eqs[e].unknowns) {
      over_v[v] = true;
      const int w = m.var_to_eq[v];
      if (w >= 0 && !over_e[w]) {
        over_e[w] = true;
        stack.push_back(static_cast<std::size_t>(w));
      }
    }
  }

  std::vector<bool> under_e(ne, false), under_v(nv, false);
  for (std::size_t v = 0; v < nv; ++v) {
    if (used[v] && m.var_to_eq[v] < 0) {
      under_v[v] = true;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (auto e : var_eqs[v]) {
      under_e[e] = true;
      const int u = m.eq_to_var[e];
      if (u >= 0 && !under_v[u]) {
        under_v[u] = true;
        stack.push_back(static_cast<std::size_t>(u));
      }
    }
  }

  for (std::size_t e = 0; e < ne; ++e) {
    if (!is_active(active, e)) continue;
    if (over_e[e]) dm.over_equations.push_back(e);
    else if (under_e[e]) dm.under_equations.push_back(e);
    else dm.just_equations.push_back(e);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (!used[v]) dm.unused_unknowns.push_back(v);
    else if (over_v[v]) dm.over_unknowns.push_back(v);
    else if (under_v[v]) dm.under_unknowns.push_back(v);
    else dm.just_unknowns.push_back(v);
  }
  return dm;
}

std::vector<bool> over_determined_mask(const StructuralModel& model, const std::vector<bool>& active) {
  std::vector<bool> mask(model.equations().size(), false);
  for (auto e : dm_decompose(model, active).over_equations) mask[e] = true;
  return mask;
}

IsolabilityResult structural_isolability(const StructuralModel& model) {
  model.validate();
  const std::size_t nf = model.faults().size();
  std::vector<std::size_t> home(nf);
  for (std::size_t f = 0; f < nf; ++f) home[f] = model.fault_equation(f);

  IsolabilityResult out{BoolMatrix(model.faults(), model.faults()), std::vector<bool>(nf)};
  const auto full = over_determined_mask(model);
  for (std::size_t i = 0; i < nf; ++i) out.detectable[i] = full[home[i]];

  for (std::size_t j = 0; j < nf; ++j) {
    std::vector<bool> active(model.equations().size(), true);
    active[home[j]] = false;
    const auto over = over_determined_mask(model, active);
    for (std::size_t i = 0; i < nf; ++i) out.fim.set(i, j, i == j || !over[home[i]]);
  }
  return out;
}

StructuralModel build_engine_structural_model() {
  StructuralModel m;
  for (const char* f : {"f_paf", "f_Cvol", "f_Waf", "f_Wc", "f_Wic", "f_Wth", "f_xth", "f_ypic",
                        "f_ypim", "f_yTic", "f_yWaf"}) {
    m.declare_fault(f);
  }
  // Ambient conditions, engine speed, wastegate position and lambda equal
  // their input channels and enter as knowns; the throttle area does not,
  // since e50 carries f_xth.
  m.add_equation("e1", {"T_af", "p_af", "W_af", "T_af_in", "W_c"});
  m.add_equation("e2", {"p_af", "T_af", "W_af", "W_c"});
  m.add_equation("e3", {"T_c", "p_c", "W_c", "T_c_in", "W_ic"});
  m.add_equation("e4", {"p_c", "T_c", "W_c", "W_ic"});
  m.add_equation("e5", {"T_ic", "p_ic", "W_ic", "T_ic_in", "W_th"});
  m.add_equation("e6", {"p_ic", "T_ic", "W_ic", "W_th"});
  m.add_equation("e7", {"T_im", "p_im", "W_th", "T_im_in", "W_ei"});
  m.add_equation("e8", {"p_im", "T_im", "W_th", "W_ei"});
  m.add_equation("e9", {"T_em", "p_em", "W_turbo", "W_eo", "T_t_in"});
  m.add_equation("e10", {"p_em", "T_em", "W_turbo", "W_eo"});
  m.add_equation("e11", {"T_t", "p_t", "W_exh", "T_exh", "W_turbo", "T_turbo"});
  m.add_equation("e12", {"p_t", "T_t", "W_exh", "W_turbo"});
  m.add_equation("e13", {"omega_t", "Tq_t", "Tq_c"});
  m.add_equation("e14", {"T_af_in", "p_af", "T_af"}, {"u_pamb", "u_Tamb"});
  m.add_equation("e15", {"W_af", "p_af", "T_af_in"}, {"u_pamb"}, {"f_paf", "f_Waf"});
  m.add_equation("e16", {"Pi_c", "p_c", "p_af"});
  m.add_equation("e17", {"W_c", "Psi_c", "omega_t", "p_af", "T_af"}, {}, {"f_Wc"});
  m.add_equation("e18", {"Psi_c", "T_af", "omega_t", "Pi_c"});
  m.add_equation("e19", {"Phi_c", "W_c", "T_af", "omega_t", "p_af"});
  m.add_equation("e20", {"eta_c", "Phi_c"});
  m.add_equation("e21", {"Tq_c", "W_c", "T_af", "eta_c", "omega_t", "Pi_c"});
  m.add_equation("e22", {"T_ic_in", "T_c", "T_ic", "p_c", "p_ic"});
  m.add_equation("e23", {"W_ic", "p_ic", "p_c", "T_ic_in"}, {}, {"f_Wic"});
  m.add_equation("e24", {"T_th", "T_ic", "T_im", "p_ic", "p_im"});
  m.add_equation("e25", {"W_th", "p_ic", "A_th", "T_ic", "Psi_th"}, {}, {"f_Wth"});
  m.add_equation("e26", {"Pi_th", "p_im", "p_ic"});
  m.add_equation("e27", {"Pi_thCRIT"});
  m.add_equation("e28", {"Psi_th", "Pi_th", "Pi_thCRIT"});
  m.add_equation("e29", {"W_ei", "p_em", "p_im", "T_im"}, {"u_omega_eREF"}, {"f_Cvol"});
  m.add_equation("e30", {"W_f", "W_ei"}, {"u_lambda"});
  m.add_equation("e31", {"W_eo", "W_ei", "W_f"});
  m.add_equation("e32", {"T_eo", "W_eo"});
  m.add_equation("e33", {"T_t_in", "T_eo", "W_eo"}, {"u_Tamb"});
  m.add_equation("e34", {"T_wg", "T_em", "T_t", "p_em", "p_t"});
  m.add_equation("e35", {"W_wg", "p_em", "T_em", "Psi_t"}, {"u_xwg"});
  m.add_equation("e36", {"Pi_t", "p_t", "p_em"});
  m.add_equation("e37", {"Pi_tCRIT"});
  m.add_equation("e38", {"Psi_t", "Pi_t", "Pi_tCRIT"});
  m.add_equation("e39", {"BSR", "omega_t", "T_em", "Pi_t"});
  m.add_equation("e40", {"eta_t", "BSR"});
  m.add_equation("e41", {"T_t_out", "T_em", "Pi_t", "eta_t"});
  m.add_equation("e42", {"W_t", "p_em", "T_em", "Pi_t"});
  m.add_equation("e43", {"Tq_t", "W_t", "T_t_out", "omega_t"});
  m.add_equation("e44", {"W_turbo", "W_t", "W_wg"});
  m.add_equation("e45", {"T_turbo", "W_t", "T_t_out", "W_wg", "T_wg"});
  m.add_equation("e46", {"T_exh", "p_t", "T_t"}, {"u_pamb", "u_Tamb"});
  m.add_equation("e47", {"W_exh", "p_t", "T_exh"}, {"u_pamb"});
  m.add_equation("e48", {}, {"u_pamb"});
  m.add_equation("e49", {}, {"u_Tamb"});
  m.add_equation("e50", {"A_th"}, {"u_xth"}, {"f_xth"});
  m.add_equation("e51", {}, {"u_omega_eREF"});
  m.add_equation("e52", {}, {"u_xwg"});
  m.add_equation("e53", {}, {"u_lambda"});
  m.add_equation("e54", {"T_c"}, {"y_Tc"});
  m.add_equation("e55", {"p_c"}, {"y_pc"});
  m.add_equation("e56", {"T_ic"}, {"y_Tic"}, {"f_yTic"});
  m.add_equation("e57", {"p_ic"}, {"y_pic"}, {"f_ypic"});
  m.add_equation("e58", {"T_im"}, {"y_Tim"});
  m.add_equation("e59", {"p_im"}, {"y_pim"}, {"f_ypim"});
  m.add_equation("e60", {"W_af"}, {"y_Waf"}, {"f_yWaf"});
  m.add_equation("e61", {"p_em"}, {"y_pem"});
  m.add_equation("e62", {"Tq_e"}, {"y_Tqe"});
  return m;
}

StructuralModel build_dc_motor_example() {
  StructuralModel m;
  for (const char* u : {"i", "theta", "omega", "alpha", "T_m", "T_L", "Delta_T"}) m.declare_unknown(u);
  m.add_equation("e1", {"i", "omega"}, {"V"}, {"f_R"});
  m.add_equation("e2", {"i", "T_m"});
  m.add_equation("e3", {"omega", "Delta_T"});
  m.add_equation("e4", {"T_m", "T_L", "Delta_T"});
  m.add_equation("e5", {"theta", "omega"});
  m.add_equation("e6", {"omega", "alpha"});
  m.add_equation("e7", {"i"}, {"y_i"}, {"f_i"});
  m.add_equation("e8", {"omega"}, {"y_omega"}, {"f_omega"});
  m.add_equation("e9", {"Delta_T"}, {"y_Delta"}, {"f_Delta"});
  return m;
}

StructuralModel parse_structural_model(std::string_view text, std::string_view origin) {
  StructuralModel m;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto where = [&] { return std::string(origin) + ":" + std::to_string(lineno) + ": "; };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.rfind("faults:", 0) == 0) {
      for (const auto& f : split_ws(s.substr(7))) m.declare_fault(f);
      continue;
    }
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const std::size_t bar = s.find('|', pos);
      parts.push_back(trim(s.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos)));
      if (bar == std::string::npos) break;
      pos = bar + 1;
    }
    if (parts.size() < 2 || parts.size() > 4 || parts[0].empty() ||
        parts[0].find(' ') != std::string::npos) {
      throw ConfigError(where() + "expected 'label | unknowns | knowns | faults'");
    }
    parts.resize(4);
    m.add_equation(parts[0], split_ws(parts[1]), split_ws(parts[2]), split_ws(parts[3]));
  }
  try {
    m.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string(origin) + ": " + e.what());
  }
  return m;
}

StructuralModel load_structural_model(const std::filesystem::path& path) {
  return parse_structural_model(read_text_file(path), path.string());
}

void write_structural_model(std::ostream& out, const StructuralModel& model) {
  if (!model.faults().empty()) {
    out << "faults:";
    for (const auto& f : model.faults()) out << ' ' << f;
    out << '\n';
  }
  auto names = [&](const std::vector<std::size_t>& idx, const std::vector<std::string>& table) {
    std::string s;
    for (auto i : idx) s += (s.empty() ? "" : " ") + table[i];
    return s;
  };
  for (const auto& row : model.equations()) {
    out << row.label << " | " << names(row.unknowns, model.unknowns()) << " | "
        << names(row.knowns, model.knowns()) << " | " << names(row.faults, model.faults()) << '\n';
  }
}

}  // namespace tcsi
