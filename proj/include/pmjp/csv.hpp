#ifndef PMJP_CSV_HPP
#define PMJP_CSV_HPP

#include <string>
#include <vector>

#include "pmjp/model.hpp"
#include "pmjp/samplers.hpp"
#include "pmjp/trajectory.hpp"

namespace pmjp {

// Observation file: header `time,<species...>`, exact integer counts.
std::string observations_to_csv(const ObservationSet& observations,
                                const std::vector<Species>& species);
ObservationSet observations_from_csv(const std::string& text,
                                     const Model& model);

// Trajectory export: `time,<species...>`, one row per jump (first row = start).
std::string trajectory_to_csv(const Trajectory& trajectory,
                              const std::vector<Species>& species);

// Samples: `iteration,theta_0..theta_{R-1},accepted,m,wall_ms`, retained rows.
std::string samples_to_csv(const ChainOutput& output, int burn_in, int thin);
// Reads back the theta columns of a samples CSV.
std::vector<std::vector<double>> samples_from_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace pmjp

#endif
