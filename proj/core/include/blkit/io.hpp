#pragma once

#include "blkit/grid.hpp"

#include <span>
#include <string>
#include <vector>


namespace blkit {

// 17 significant digits, '.' decimal, '\n' line endings (lossless doubles).
std::string format_double(double v);

void write_field_csv(const std::string& path, const Field2D& f,
                     const MarchSchedule& sched, const Grid1D& grid);
void write_profile_csv(const std::string& path, const Profile& p,
                       std::span<const double> nodes, const std::string& col_name);
void write_pairs_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

Field2D read_field_csv(const std::string& path, std::size_t nx, std::size_t ny);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

void ensure_directory(const std::string& dir);

} // namespace blkit
