#pragma once

#include <string>
#include <vector>

#include "icspp/linalg.hpp"

namespace icspp {

enum class Stage { Raw, Centered, Pre, Ics, Current };

std::string_view to_string(Stage stage) noexcept;

/// n×p observations (rows) plus the location that was subtracted from them.
/// Construction validates n ≥ 2, p ≥ 2 and finiteness of every entry.
class DataSet {
 public:
  DataSet() = default;
  DataSet(Matrix rows, Stage stage, std::vector<std::string> column_names = {});
  DataSet(Matrix rows, Vector center, Stage stage, std::vector<std::string> column_names = {});

  const Matrix& rows() const noexcept { return rows_; }
  const Vector& center() const noexcept { return center_; }
  Stage stage() const noexcept { return stage_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }

  Eigen::Index n() const noexcept { return rows_.rows(); }
  Eigen::Index p() const noexcept { return rows_.cols(); }

  /// Same metadata, new coordinates.
  DataSet with_rows(Matrix rows, Stage stage) const;

 private:
  Matrix rows_;
  Vector center_;
  Stage stage_ = Stage::Raw;
  std::vector<std::string> names_;
};

}  // namespace icspp
