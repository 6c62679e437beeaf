#include "pmjp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pmjp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string observations_to_csv(const ObservationSet& observations,
                                const std::vector<Species>& species) {
  std::ostringstream out;
  out << "time";
  for (const auto& s : species) out << "," << s.name;
  out << "\n";
  for (const auto& p : observations.points) {
    out << format_double(p.time);
    for (int c : p.state) out << "," << c;
    out << "\n";
  }
  return out.str();
}

ObservationSet observations_from_csv(const std::string& text,
                                     const Model& model) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw validation_error("empty observations file");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "time")
    throw validation_error("observations file must start with a 'time' column");
  // map file columns onto model species order
  std::vector<int> col_to_species(header.size() - 1);
  for (std::size_t i = 1; i < header.size(); ++i) {
    int idx = model.species_index(header[i]);
    if (idx < 0)
      throw validation_error("unknown species column '" + header[i] + "'");
    col_to_species[i - 1] = idx;
  }
  if (header.size() - 1 != model.species.size())
    throw validation_error("observations file species count mismatch");

  ObservationSet obs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw validation_error("malformed observations row: " + line);
    Observation point;
    point.time = std::stod(cells[0]);
    point.state.assign(model.species.size(), 0);
    for (std::size_t i = 1; i < cells.size(); ++i)
      point.state[col_to_species[i - 1]] = std::stoi(cells[i]);
    obs.points.push_back(std::move(point));
  }
  obs.validate();
  return obs;
}

std::string trajectory_to_csv(const Trajectory& trajectory,
                              const std::vector<Species>& species) {
  std::ostringstream out;
  out << "time";
  for (const auto& s : species) out << "," << s.name;
  out << "\n";
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    out << format_double(trajectory.times[k]);
    for (int c : trajectory.states[k]) out << "," << c;
    out << "\n";
  }
  return out.str();
}

std::string samples_to_csv(const ChainOutput& output, int burn_in, int thin) {
  std::ostringstream out;
  std::size_t r = output.records.empty() ? 0 : output.records[0].theta.size();
  out << "iteration";
  for (std::size_t i = 0; i < r; ++i) out << ",theta_" << i;
  out << ",accepted,m,wall_ms\n";
  for (const auto& rec : output.records) {
    if (rec.iteration < burn_in || (rec.iteration - burn_in) % thin != 0)
      continue;
    out << rec.iteration;
    for (double t : rec.theta) out << "," << format_double(t);
    out << "," << (rec.accepted ? 1 : 0) << "," << rec.truncation_level << ","
        << format_double(rec.wall_ms) << "\n";
  }
  return out.str();
}

std::vector<std::vector<double>> samples_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw validation_error("empty samples file");
  auto header = split_csv_line(line);
  std::vector<std::size_t> theta_cols;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i].rfind("theta_", 0) == 0) theta_cols.push_back(i);
  if (theta_cols.empty())
    throw validation_error("samples file has no theta columns");

  std::vector<std::vector<double>> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw validation_error("malformed samples row: " + line);
    std::vector<double> row;
    for (std::size_t c : theta_cols) row.push_back(std::stod(cells[c]));
    samples.push_back(std::move(row));
  }
  if (samples.empty()) throw validation_error("samples file has no rows");
  return samples;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write file: " + path);
  out << content;
}

}  // namespace pmjp
