#include "blkit/io.hpp"

#include "blkit/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace blkit {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create directory " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_field_csv(const std::string& path, const Field2D& f,
                     const MarchSchedule& sched, const Grid1D& grid) {
    std::ostringstream out;
    out << "x,y,value\n";
    for (std::size_t ix = 0; ix < f.nx; ++ix)
        for (std::size_t iy = 0; iy < f.ny; ++iy)
            out << format_double(sched.x_nodes[ix]) << ',' << format_double(grid.nodes[iy])
                << ',' << format_double(f.at(ix, iy)) << '\n';
    write_text_file(path, out.str());
}

void write_profile_csv(const std::string& path, const Profile& p,
                       std::span<const double> nodes, const std::string& col_name) {
    std::ostringstream out;
    out << "y," << col_name << '\n';
    for (std::size_t i = 0; i < p.size(); ++i)
        out << format_double(nodes[i]) << ',' << format_double(p[i]) << '\n';
    write_text_file(path, out.str());
}

void write_pairs_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? ',' : '\n');
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i)
            out << format_double(r[i]) << (i + 1 < r.size() ? ',' : '\n');
    write_text_file(path, out.str());
}

Field2D read_field_csv(const std::string& path, std::size_t nx, std::size_t ny) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    Field2D f(nx, ny);
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ConfigError("malformed CSV row in " + path);
        const double val = std::stod(line.substr(c2 + 1));
        f.v[count++] = val;
        if (count > nx * ny) throw ConfigError("too many rows in " + path);
    }
    if (count != nx * ny) throw ConfigError("row count mismatch in " + path);
    return f;
}

} // namespace blkit
