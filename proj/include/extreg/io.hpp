#ifndef EXTREG_IO_HPP
#define EXTREG_IO_HPP

#include <string>
#include <vector>

#include "extreg/dataset.hpp"
#include "extreg/simulation.hpp"

namespace extreg {

// Doubles rendered with 17 significant digits; lossless reload.
std::string format_double(double value);

struct LoadedCsv {
  Dataset data;
  std::string response_name;
  std::vector<std::string> predictor_names;  // CSV column order preserved
};

// Comma-separated, header row, '.' decimal separator, no missing cells.
// The named response column becomes y; every other column must be numeric
// and becomes a predictor. Errors name the offending file line and column.
// `for_fitting` demands the p+2 rows a fit needs; candidate samples that are
// only screened may be arbitrarily small, including empty.
LoadedCsv load_csv_named(const std::string& path, const std::string& response_column,
                         bool for_fitting = true);

Dataset load_csv(const std::string& path, const std::string& response_column);

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& response_name = "y",
                       const std::vector<std::string>& predictor_names = {});

// Flat key = value scenario files; '#' starts a comment, vectors are
// comma-separated. Keys mirror the ScenarioSpec fields.
ScenarioSpec load_scenario(const std::string& path);

}  // namespace extreg

#endif
