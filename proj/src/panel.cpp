#include "tvmed/panel.hpp"

#include "tvmed/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace tvmed {

bool SubjectRecord::has_any_observation() const {
  auto present = [](const std::optional<double>& v) { return v.has_value(); };
  return std::any_of(mediator.begin(), mediator.end(), present) ||
         std::any_of(outcome.begin(), outcome.end(), present);
}

Panel::Panel(std::vector<double> grid, std::size_t n_arms,
             std::vector<SubjectRecord> subjects)
    : grid_(std::move(grid)), n_arms_(n_arms), subjects_(std::move(subjects)) {
  if (n_arms_ < 1) throw MalformedInput("panel needs at least one treatment arm");
  if (grid_.size() < 3)
    throw MalformedInput("panel needs at least 3 time points, got " +
                         std::to_string(grid_.size()));
  for (std::size_t j = 1; j < grid_.size(); ++j)
    if (!(grid_[j] > grid_[j - 1]))
      throw MalformedInput("time grid must be strictly increasing");
  for (const auto& s : subjects_) {
    if (s.arm.size() != n_arms_)
      throw MalformedInput("subject '" + s.id + "' has " + std::to_string(s.arm.size()) +
                           " arm indicators, expected " + std::to_string(n_arms_));
    int active = 0;
    for (int a : s.arm) {
      if (a != 0 && a != 1)
        throw MalformedInput("subject '" + s.id + "' arm indicator not in {0,1}");
      active += a;
    }
    if (active > 1)
      throw MalformedInput("subject '" + s.id + "' belongs to more than one arm");
    if (s.mediator.size() != grid_.size() || s.outcome.size() != grid_.size())
      throw MalformedInput("subject '" + s.id + "' series length differs from grid");
  }
}

double Panel::min_spacing() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < grid_.size(); ++j) gap = std::min(gap, grid_[j] - grid_[j - 1]);
  return gap;
}

PanelSchema PanelSchema::with_arms(std::size_t k) {
  PanelSchema schema;
  schema.arm_cols.clear();
  for (std::size_t i = 1; i <= k; ++i) schema.arm_cols.push_back("arm_" + std::to_string(i));
  return schema;
}

namespace {

double require_number(const std::string& cell, std::size_t row, const std::string& col) {
  auto v = io::parse_double(cell);
  if (!v) throw MalformedInput("row " + std::to_string(row) + ": cannot parse " + col +
                               " value '" + cell + "'");
  return *v;
}

std::optional<double> optional_number(const std::string& cell, std::size_t row,
                                      const std::string& col) {
  if (cell.empty()) return std::nullopt;
  return require_number(cell, row, col);
}

}  // namespace

Panel load_panel(std::istream& in, const PanelSchema& schema, LoadReport* report) {
  if (schema.arm_cols.empty()) throw MalformedInput("schema declares no arm columns");
  const auto table = io::read_csv(in);
  const std::size_t id_c = table.column(schema.id_col);
  const std::size_t time_c = table.column(schema.time_col);
  const std::size_t med_c = table.column(schema.mediator_col);
  const std::size_t out_c = table.column(schema.outcome_col);
  std::vector<std::size_t> arm_c;
  for (const auto& name : schema.arm_cols) arm_c.push_back(table.column(name));
  const std::size_t k = arm_c.size();

  struct Row {
    double time;
    std::optional<double> m, y;
  };
  struct Pending {
    std::vector<int> arm;
    std::vector<Row> rows;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Pending> by_id;
  std::vector<double> times;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;
    const std::string& id = row[id_c];
    if (id.empty()) throw MalformedInput("row " + std::to_string(line) + ": empty subject id");
    std::vector<int> arm(k);
    for (std::size_t a = 0; a < k; ++a) {
      double v = require_number(row[arm_c[a]], line, schema.arm_cols[a]);
      if (v != 0.0 && v != 1.0)
        throw MalformedInput("row " + std::to_string(line) + ": arm indicator '" +
                             row[arm_c[a]] + "' not in {0,1}");
      arm[a] = static_cast<int>(v);
    }
    Row rec{require_number(row[time_c], line, schema.time_col),
            optional_number(row[med_c], line, schema.mediator_col),
            optional_number(row[out_c], line, schema.outcome_col)};
    auto [it, inserted] = by_id.try_emplace(id);
    if (inserted) {
      order.push_back(id);
      it->second.arm = arm;
    } else if (it->second.arm != arm) {
      throw MalformedInput("row " + std::to_string(line) + ": subject '" + id +
                           "' changes treatment arm over time");
    }
    it->second.rows.push_back(rec);
    times.push_back(rec.time);
  }

  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::map<double, std::size_t> position;
  for (std::size_t j = 0; j < times.size(); ++j) position[times[j]] = j;

  std::vector<SubjectRecord> subjects;
  std::size_t dropped = 0;
  for (const auto& id : order) {
    auto& pending = by_id[id];
    SubjectRecord s;
    s.id = id;
    s.arm = pending.arm;
    s.mediator.assign(times.size(), std::nullopt);
    s.outcome.assign(times.size(), std::nullopt);
    std::vector<bool> seen(times.size(), false);
    for (const auto& rec : pending.rows) {
      std::size_t j = position.at(rec.time);
      if (seen[j])
        throw MalformedInput("duplicate observation for subject '" + id + "' at time " +
                             io::format_double(rec.time));
      seen[j] = true;
      s.mediator[j] = rec.m;
      s.outcome[j] = rec.y;
    }
    if (!s.has_any_observation()) {
      ++dropped;
      continue;
    }
    subjects.push_back(std::move(s));
  }
  if (report) {
    report->rows = table.rows.size();
    report->dropped_subjects = dropped;
  }
  return Panel(std::move(times), k, std::move(subjects));
}

Panel load_panel_file(const std::string& path, const PanelSchema& schema, LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_panel(in, schema, report);
}

void write_panel(std::ostream& out, const Panel& panel, const PanelSchema& schema) {
  if (schema.arm_cols.size() != panel.n_arms())
    throw InvalidArgument("schema arm columns do not match panel arm count");
  out << schema.id_col << ',' << schema.time_col;
  for (const auto& a : schema.arm_cols) out << ',' << a;
  out << ',' << schema.mediator_col << ',' << schema.outcome_col << '\n';
  const auto& grid = panel.grid();
  for (const auto& s : panel.subjects()) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      out << s.id << ',' << io::format_double(grid[j]);
      for (int a : s.arm) out << ',' << a;
      out << ',';
      if (s.mediator[j]) out << io::format_double(*s.mediator[j]);
      out << ',';
      if (s.outcome[j]) out << io::format_double(*s.outcome[j]);
      out << '\n';
    }
  }
}

CompleteCaseSlice complete_cases(const Panel& panel, std::size_t j) {
  if (j < 1 || j >= panel.n_times())
    throw InvalidArgument("complete_cases: time index " + std::to_string(j) +
                          " has no lagged observation (valid: 1.." +
                          std::to_string(panel.n_times() - 1) + ")");
  const std::size_t k = panel.n_arms();
  std::vector<std::size_t> keep;
  keep.reserve(panel.n_subjects());
  for (std::size_t i = 0; i < panel.n_subjects(); ++i) {
    const auto& s = panel.subject(i);
    if (s.mediator[j - 1] && s.mediator[j] && s.outcome[j]) keep.push_back(i);
  }
  const auto n = static_cast<Eigen::Index>(keep.size());
  CompleteCaseSlice slice;
  slice.time_index = j;
  slice.arms.resize(n, static_cast<Eigen::Index>(k));
  slice.lagged_mediator.resize(n);
  slice.mediator.resize(n);
  slice.outcome.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& s = panel.subject(keep[r]);
    for (std::size_t a = 0; a < k; ++a) slice.arms(r, a) = s.arm[a];
    slice.lagged_mediator(r) = *s.mediator[j - 1];
    slice.mediator(r) = *s.mediator[j];
    slice.outcome(r) = *s.outcome[j];
  }
  return slice;
}

CenteredSlice center_slice(CompleteCaseSlice slice) {
  if (slice.rows() < 1) throw InvalidArgument("center_slice: empty slice");
  CenteredSlice out;
  out.means.arms = slice.arms.colwise().mean().transpose();
  out.means.lagged_mediator = slice.lagged_mediator.mean();
  out.means.mediator = slice.mediator.mean();
  out.means.outcome = slice.outcome.mean();
  slice.arms.rowwise() -= out.means.arms.transpose();
  slice.lagged_mediator.array() -= out.means.lagged_mediator;
  slice.mediator.array() -= out.means.mediator;
  slice.outcome.array() -= out.means.outcome;
  out.slice = std::move(slice);
  return out;
}

}  // namespace tvmed
