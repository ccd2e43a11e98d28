#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pdopt/io.hpp"

namespace pdopt {

using nlohmann::json;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* const kKeys[] = {"m",       "omega_l",         "omega_s",       "omega_ls", "omega_sl",
                             "interval_pmf", "epsilon", "cost_exponent_p", "initial_state", "gamma"};

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw MalformedFile(std::string("missing key: ") + key);
  return *it;
}

double number(const json& value, const std::string& field) {
  if (!value.is_number()) throw MalformedFile(field + ": expected a number");
  return value.get<double>();
}

Eigen::MatrixXd matrix(const json& value, Eigen::Index m, const std::string& field) {
  if (!value.is_array() || static_cast<Eigen::Index>(value.size()) != m) {
    throw MalformedFile(field + ": expected an array of " + std::to_string(m) + " rows");
  }
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const json& row = value[static_cast<std::size_t>(i)];
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
      throw MalformedFile(row_field + ": expected " + std::to_string(m) + " numbers");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = number(row[static_cast<std::size_t>(j)], row_field + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

Eigen::VectorXd vector(const json& value, Eigen::Index m, const std::string& field) {
  if (!value.is_array() || static_cast<Eigen::Index>(value.size()) != m) {
    throw MalformedFile(field + ": expected " + std::to_string(m) + " numbers");
  }
  Eigen::VectorXd out(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out(i) = number(value[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

FeedbackDistribution interval_pmf(const json& value) {
  if (!value.is_object()) throw MalformedFile("interval_pmf: expected an object mapping h to p_h");
  std::map<int, double> pmf;
  for (const auto& [key, p] : value.items()) {
    const std::string field = "interval_pmf." + key;
    std::size_t used = 0;
    int h = 0;
    try {
      h = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != key.size()) throw MalformedFile(field + ": key must be an integer");
    pmf[h] = number(p, field);
  }
  return FeedbackDistribution(std::move(pmf));
}

void append_matrix(std::string& out, const Eigen::MatrixXd& mat) {
  out += "[";
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    out += i == 0 ? "\n    [" : ",\n    [";
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j > 0) out += ", ";
      out += format_number(mat(i, j));
    }
    out += "]";
  }
  out += "\n  ]";
}

void append_vector(std::string& out, const Eigen::VectorXd& vec) {
  out += "[";
  for (Eigen::Index i = 0; i < vec.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_number(vec(i));
  }
  out += "]";
}

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

}  // namespace

Project parse_project_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedFile(e.what());
  }
  if (!doc.is_object()) throw MalformedFile("project: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw MalformedFile("unknown key: " + key);
    }
  }

  const json& m_value = require(doc, "m");
  if (!m_value.is_number_integer()) throw MalformedFile("m: expected an integer");
  const auto m = m_value.get<long long>();
  if (m < 1) throw InvariantViolation("m", "must be positive");

  Project project;
  project.dsms.omega_l = matrix(require(doc, "omega_l"), m, "omega_l");
  project.dsms.omega_s = matrix(require(doc, "omega_s"), m, "omega_s");
  project.dsms.omega_ls = matrix(require(doc, "omega_ls"), m, "omega_ls");
  project.dsms.omega_sl = matrix(require(doc, "omega_sl"), m, "omega_sl");
  validate(project.dsms);
  project.dist = interval_pmf(require(doc, "interval_pmf"));
  project.epsilon = number(require(doc, "epsilon"), "epsilon");
  project.cost_exponent = number(require(doc, "cost_exponent_p"), "cost_exponent_p");
  (void)project.cost_model();

  if (auto it = doc.find("initial_state"); it != doc.end()) {
    if (!it->is_object()) throw MalformedFile("initial_state: expected an object with L, S, H");
    for (const auto& [key, value] : it->items()) {
      if (key != "L" && key != "S" && key != "H") throw MalformedFile("unknown key: initial_state." + key);
    }
    ProjectState state;
    state.l = vector(require(*it, "L"), m, "initial_state.L");
    state.s = vector(require(*it, "S"), m, "initial_state.S");
    state.h = vector(require(*it, "H"), m, "initial_state.H");
    validate(state, m);
    project.initial_state = std::move(state);
  }
  if (auto it = doc.find("gamma"); it != doc.end()) {
    const double gamma = number(*it, "gamma");
    if (!(gamma >= 0.0)) throw InvariantViolation("gamma", "nonnegative");
    project.gamma = gamma;
  }
  return project;
}

Project parse_project(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_project_text(buf.str());
  } catch (const MalformedFile& e) {
    throw MalformedFile(path.string() + ": " + e.what());
  }
}

std::string serialize_project(const Project& project) {
  std::string out = "{\n";
  out += "  \"m\": " + std::to_string(project.tasks()) + ",\n";
  for (Block b : {Block::L, Block::S, Block::LS, Block::SL}) {
    std::string key = "omega_";
    for (char ch : block_name(b)) key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    out += "  " + json_string(key) + ": ";
    append_matrix(out, project.dsms.block(b));
    out += ",\n";
  }
  out += "  \"interval_pmf\": {";
  bool first = true;
  for (const auto& [h, p] : project.dist.pmf()) {
    out += first ? "" : ", ";
    first = false;
    out += json_string(std::to_string(h)) + ": " + format_number(p);
  }
  out += "},\n";
  out += "  \"epsilon\": " + format_number(project.epsilon) + ",\n";
  out += "  \"cost_exponent_p\": " + format_number(project.cost_exponent);
  if (project.initial_state) {
    out += ",\n  \"initial_state\": {\"L\": ";
    append_vector(out, project.initial_state->l);
    out += ", \"S\": ";
    append_vector(out, project.initial_state->s);
    out += ", \"H\": ";
    append_vector(out, project.initial_state->h);
    out += "}";
  }
  if (project.gamma) out += ",\n  \"gamma\": " + format_number(*project.gamma);
  out += "\n}\n";
  return out;
}

std::string allocation_json(const DsmSet& nominal, const AllocationResult& result) {
  std::string out = "{\n  \"allocation\": [";
  bool first = true;
  for (const auto& [c, psi] : result.psi) {
    const auto spend = result.spend.find(c);
    out += first ? "\n" : ",\n";
    first = false;
    out += "    {\"matrix\": " + json_string(block_name(c.block)) + ", \"i\": " + std::to_string(c.i + 1) +
           ", \"j\": " + std::to_string(c.j + 1) + ", \"omega\": " + format_number(nominal.block(c.block)(c.i, c.j)) +
           ", \"psi\": " + format_number(psi) +
           ", \"spend\": " + format_number(spend == result.spend.end() ? 0.0 : spend->second) + "}";
  }
  out += first ? "],\n" : "\n  ],\n";
  out += "  \"rho_before\": " + format_number(result.rho_before) + ",\n";
  out += "  \"rho_after\": " + format_number(result.rho_after) + ",\n";
  out += "  \"total_cost\": " + format_number(result.total_cost) + ",\n";
  out += "  \"converged\": " + std::string(result.converged ? "true" : "false") + "\n}\n";
  return out;
}

DependencyMap parse_allocation_psi(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw MalformedFile(path.string() + ": " + e.what());
  }
  const json& records = require(doc, "allocation");
  if (!records.is_array()) throw MalformedFile("allocation: expected an array");
  DependencyMap psi;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const json& r = records[k];
    const std::string field = "allocation[" + std::to_string(k) + "]";
    const json& matrix_name = require(r, "matrix");
    const auto block = matrix_name.is_string() ? parse_block(matrix_name.get<std::string>()) : std::nullopt;
    if (!block) throw MalformedFile(field + ".matrix: expected L, S, LS or SL");
    const json& i = require(r, "i");
    const json& j = require(r, "j");
    if (!i.is_number_integer() || !j.is_number_integer()) throw MalformedFile(field + ": i and j must be integers");
    psi[Coordinate{*block, i.get<int>() - 1, j.get<int>() - 1}] = number(require(r, "psi"), field + ".psi");
  }
  return psi;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "k";
  const Eigen::Index m = traj.states.empty() ? 0 : traj.states.front().l.size();
  for (const char* team : {"L", "S", "H"}) {
    for (Eigen::Index i = 1; i <= m; ++i) out += "," + std::string(team) + "_" + std::to_string(i);
  }
  out += ",total_unfinished\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const ProjectState& x = traj.states[k];
    out += std::to_string(k);
    for (const Eigen::VectorXd* part : {&x.l, &x.s, &x.h}) {
      for (Eigen::Index i = 0; i < part->size(); ++i) out += "," + format_number((*part)(i));
    }
    out += "," + format_number(x.unfinished()) + "\n";
  }
  return out;
}

std::string histogram_csv(const CompletionHistogram& hist) {
  std::string out = "completion_time,count\n";
  for (const auto& [time, count] : hist.counts) out += std::to_string(time) + "," + std::to_string(count) + "\n";
  return out;
}

std::string centrality_investment_csv(const std::vector<BoundaryRow>& rows) {
  std::string out = "task_id,team,betweenness,pagerank,hub,investment\n";
  for (const BoundaryRow& r : rows) {
    out += std::to_string(r.task_id) + "," + r.team + "," + format_number(r.betweenness) + "," +
           format_number(r.pagerank) + "," + format_number(r.hub) + "," + format_number(r.investment) + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "budget,rho_optimized,rho_baseline,cost_optimized,cost_baseline,converged\n";
  for (const SweepPoint& p : points) {
    out += format_number(p.budget) + "," + format_number(p.optimized.rho_after) + "," +
           format_number(p.baseline.rho_after) + "," + format_number(p.optimized.total_cost) + "," +
           format_number(p.baseline.total_cost) + "," + (p.optimized.converged ? "1" : "0") + "\n";
  }
  return out;
}

std::string sweep_spend_csv(const std::vector<SweepPoint>& points) {
  std::string out = "budget,matrix,i,j,spend\n";
  for (const SweepPoint& p : points) {
    for (const auto& [c, spend] : p.optimized.spend) {
      out += format_number(p.budget) + "," + std::string(block_name(c.block)) + "," + std::to_string(c.i + 1) +
             "," + std::to_string(c.j + 1) + "," + format_number(spend) + "\n";
    }
  }
  return out;
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& explicit_dir) {
  if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
  if (const char* env = std::getenv("PDOPT_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return std::filesystem::current_path();
}

std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& contents, bool overwrite) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / name;
  if (!overwrite && std::filesystem::exists(path)) {
    throw std::filesystem::filesystem_error("refusing to overwrite without --overwrite", path,
                                            std::make_error_code(std::errc::file_exists));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::filesystem::filesystem_error("cannot open for writing", path,
                                            std::make_error_code(std::errc::io_error));
  }
  out << contents;
  out.close();
  if (!out) {
    throw std::filesystem::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
  }
  return path;
}

}  // namespace pdopt
