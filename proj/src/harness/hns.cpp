#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nait/error.hpp"
#include "nait/harness.hpp"

namespace nait::harness {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("not a number '" + s + "' in " + where);
  }
}

}  // namespace

double hns(double agent, double random, double human) {
  if (human == random) throw InvalidInput("human score equals random score");
  return (agent - random) / (human - random);
}

HnsReport compute_hns(const std::vector<TaskScore>& table, std::ostream* warnings) {
  HnsReport rep;
  for (const auto& t : table) {
    if (t.human == t.random) {
      rep.excluded.push_back(t.task);
      if (warnings) *warnings << "warning: task '" << t.task << "' has human == random; excluded\n";
      continue;
    }
    rep.tasks.push_back({t.task, hns(t.agent, t.random, t.human)});
  }
  if (rep.tasks.empty()) return rep;
  std::vector<double> v;
  v.reserve(rep.tasks.size());
  for (const auto& t : rep.tasks) v.push_back(t.hns);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  rep.median = v[(n - 1) / 2];
  rep.midpoint_median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  rep.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  return rep;
}

std::vector<TaskScore> load_score_table(const std::filesystem::path& path, const std::string& agent_column,
                                        const std::string& subset_column) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open score table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty score table " + path.string());
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError("score table has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_task = column("game");
  const std::size_t c_random = column("random");
  const std::size_t c_human = column("human");
  const std::size_t c_agent = column(agent_column);
  const std::size_t c_subset = subset_column.empty() ? 0 : column(subset_column);

  std::vector<TaskScore> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells");
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!subset_column.empty() && parse_number(cells[c_subset], where) == 0.0) continue;
    out.push_back({cells[c_task], parse_number(cells[c_random], where), parse_number(cells[c_human], where),
                   parse_number(cells[c_agent], where)});
  }
  return out;
}

void write_oracle_table(std::ostream& out, const RandomWalkConfig& config, double tol) {
  const TabularMdp mdp = random_walk_mdp(config);
  const QTable q = value_iteration(mdp, tol);
  out << "state,q_a0,q_a1,greedy\n";
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu,%.10f,%.10f,a%zu\n", s + 1, q(s, 0), q(s, 1), q.greedy(s));
    out << buf;
  }
}

}  // namespace nait::harness
