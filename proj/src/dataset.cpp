#include "icspp/dataset.hpp"

#include <string>

#include "icspp/error.hpp"

namespace icspp {

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Raw: return "raw";
    case Stage::Centered: return "centered";
    case Stage::Pre: return "pre";
    case Stage::Ics: return "ics";
    case Stage::Current: return "current";
  }
  return "unknown";
}

DataSet::DataSet(Matrix rows, Stage stage, std::vector<std::string> column_names)
    : DataSet(std::move(rows), Vector(), stage, std::move(column_names)) {}

DataSet::DataSet(Matrix rows, Vector center, Stage stage, std::vector<std::string> column_names)
    : rows_(std::move(rows)), center_(std::move(center)), stage_(stage), names_(std::move(column_names)) {
  if (rows_.rows() < 2)
    throw Error(ErrorCode::TooFewRows, "need at least 2 observations, got " + std::to_string(rows_.rows()));
  if (rows_.cols() < 2)
    throw Error(ErrorCode::DimensionMismatch, "need at least 2 variables, got " + std::to_string(rows_.cols()));
  if (!rows_.allFinite()) throw Error(ErrorCode::InvalidArgument, "data contains non-finite entries");
  if (center_.size() == 0) center_ = Vector::Zero(rows_.cols());
  if (center_.size() != rows_.cols())
    throw Error(ErrorCode::DimensionMismatch, "center length does not match column count");
  if (!names_.empty() && names_.size() != static_cast<std::size_t>(rows_.cols()))
    throw Error(ErrorCode::DimensionMismatch, "column name count does not match column count");
}

DataSet DataSet::with_rows(Matrix rows, Stage stage) const {
  const bool keep_names = stage == Stage::Raw || stage == Stage::Centered;
  return DataSet(std::move(rows), center_, stage, keep_names ? names_ : std::vector<std::string>{});
}

}  // namespace icspp
