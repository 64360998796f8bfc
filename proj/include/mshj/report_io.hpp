#pragma once

#include <json.hpp>

#include <string>

#include "mshj/average.hpp"
#include "mshj/cell.hpp"
#include "mshj/effective.hpp"
#include "mshj/homogenize.hpp"
#include "mshj/scales.hpp"

namespace mshj {

using Json = nlohmann::ordered_json;

Json to_json(const ResonanceReport& report);
Json to_json(const CellSolution& sol);
Json to_json(const EffectiveValue& ev);
Json to_json(const BoxCellSolution& sol);
Json to_json(const ConsistencyReport& report);
Json to_json(const TrajectoryRun& run);
Json to_json(const RayAverageReport& report);
Json to_json(const ConvergenceReport& report);
Json table_sidecar(const EffectiveTable& table);

/// CSV with one row per grid point: index columns then the value.
void write_field_csv(const std::string& path, const TorusGrid& grid,
                     const Eigen::ArrayXd& w);
void write_field_csv(const std::string& path, const SpatialGrid& grid,
                     const Eigen::ArrayXd& u);
/// CSV with p-coordinates, value and flatness per row.
void write_table_csv(const std::string& path, const EffectiveTable& table);

std::string format_double(double v);

}  // namespace mshj
