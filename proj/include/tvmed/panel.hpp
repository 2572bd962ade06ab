#pragma once

#include "tvmed/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tvmed {

/// One subject's series. `mediator` and `outcome` are indexed by grid
/// position; absent values are std::nullopt.
struct SubjectRecord {
  std::string id;
  std::vector<int> arm;  // K indicators, all zero for the reference arm
  std::vector<std::optional<double>> mediator;
  std::vector<std::optional<double>> outcome;

  bool treated_in(std::size_t k) const { return arm[k] != 0; }
  bool has_any_observation() const;
};

/// Intensive longitudinal panel on a shared, strictly increasing time grid.
///
/// Construction validates every invariant (grid ordering, T >= 3, arm
/// indicators binary with at most one active, series lengths equal to T) and
/// throws MalformedInput otherwise. The object is immutable afterwards and
/// safe for concurrent reads.
class Panel {
public:
  Panel(std::vector<double> grid, std::size_t n_arms,
        std::vector<SubjectRecord> subjects);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<SubjectRecord>& subjects() const { return subjects_; }
  const SubjectRecord& subject(std::size_t i) const { return subjects_[i]; }
  std::size_t n_arms() const { return n_arms_; }
  std::size_t n_subjects() const { return subjects_.size(); }
  std::size_t n_times() const { return grid_.size(); }

  /// Smallest gap between consecutive grid times.
  double min_spacing() const;

private:
  std::vector<double> grid_;
  std::size_t n_arms_;
  std::vector<SubjectRecord> subjects_;
};

/// Column bindings for the long-format CSV.
struct PanelSchema {
  std::string id_col = "subject_id";
  std::string time_col = "time";
  std::vector<std::string> arm_cols = {"arm_1"};
  std::string mediator_col = "mediator";
  std::string outcome_col = "outcome";

  static PanelSchema with_arms(std::size_t k);
};

struct LoadReport {
  std::size_t rows = 0;
  std::size_t dropped_subjects = 0;  // subjects with no observed value at all
};

Panel load_panel(std::istream& in, const PanelSchema& schema,
                 LoadReport* report = nullptr);
Panel load_panel_file(const std::string& path, const PanelSchema& schema,
                      LoadReport* report = nullptr);

/// Writes one row per (subject, grid time); absent cells are empty strings.
/// Values use shortest round-trip formatting, so load_panel recovers the
/// exact panel.
void write_panel(std::ostream& out, const Panel& panel,
                 const PanelSchema& schema);

/// Complete cases at grid position j (0-based, 1 <= j < T): subjects with the
/// mediator observed at j-1 and j and the outcome observed at j.
struct CompleteCaseSlice {
  std::size_t time_index = 0;
  Matrix arms;             // n_j x K
  Vector lagged_mediator;  // m_{i,j-1}
  Vector mediator;         // m_{ij}
  Vector outcome;          // y_{ij}

  Eigen::Index rows() const { return mediator.size(); }
};

CompleteCaseSlice complete_cases(const Panel& panel, std::size_t j);

struct SliceMeans {
  Vector arms;
  double lagged_mediator = 0.0;
  double mediator = 0.0;
  double outcome = 0.0;
};

struct CenteredSlice {
  CompleteCaseSlice slice;
  SliceMeans means;
};

/// Subtracts each column mean. Requires at least one row.
CenteredSlice center_slice(CompleteCaseSlice slice);

}  // namespace tvmed
