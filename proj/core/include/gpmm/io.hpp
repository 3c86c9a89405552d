#ifndef GPMM_IO_HPP
#define GPMM_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "gpmm/baselines.hpp"
#include "gpmm/model.hpp"

namespace gpmm {

// CSV dialect: UTF-8, comma separator, one header row, '.' decimal point.
// On disk rows are samples and columns are variables; in memory data is
// variable-major (dim x T), so reading and writing transpose.

struct CsvTable {
  std::vector<std::string> headers;
  Matrix data;  // dim x T
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const Matrix& data,
               const std::vector<std::string>& headers);
std::vector<std::string> default_headers(const std::string& prefix, int count);

// Versioned text persistence for a fitted model: dimensions, all parameter
// matrices row-major at 17 significant digits, and the training
// normalization statistics so monitoring can reapply them verbatim.
struct StoredModel {
  std::string kind = "random";  // "random" | "sequential"
  ModelParameters params;
  int tau = 1;                  // sampling stride, sequential models only
  bool converged = true;
  std::optional<Normalization> norm_x;
  std::optional<Normalization> norm_y;
};

inline constexpr const char* kModelFormatTag = "gpmm-model-v1";

void save_model(const std::string& path, const StoredModel& model);
StoredModel load_model(const std::string& path);

}  // namespace gpmm

#endif
