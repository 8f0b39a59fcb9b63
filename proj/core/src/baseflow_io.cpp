#include "blkit/baseflow.hpp"
#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/io.hpp"

#include <nlohmann/json.hpp>

namespace blkit {

using nlohmann::json;

void export_baseflow(const BaseFlow& bf, const std::string& dir) {
    ensure_directory(dir);
    write_field_csv(dir + "/u_bar.csv", bf.u_bar, bf.sched, bf.grid);
    write_field_csv(dir + "/v_bar.csv", bf.v_bar, bf.sched, bf.grid);
    write_profile_csv(dir + "/v0.csv", bf.v0, bf.grid.nodes, "v0");
    write_profile_csv(dir + "/ux0.csv", bf.ux0, bf.grid.nodes, "ux0");

    json hdr;
    hdr["L"] = bf.L;
    hdr["N_weight"] = bf.N_weight;
    hdr["march_residual"] = bf.march_residual;
    hdr["x_nodes"] = bf.sched.x_nodes;
    hdr["y_nodes"] = bf.grid.nodes;
    hdr["y_max"] = bf.grid.y_max;
    hdr["map_kind"] = bf.grid.map_kind == MapKind::uniform ? "uniform" : "exp_stretched";
    write_text_file(dir + "/baseflow.json", hdr.dump(2) + "\n");
}

BaseFlow import_baseflow(const std::string& dir) {
    const json hdr = json::parse(read_text_file(dir + "/baseflow.json"));
    BaseFlow bf;
    bf.L = hdr.at("L").get<double>();
    bf.N_weight = hdr.at("N_weight").get<double>();
    bf.march_residual = hdr.value("march_residual", 0.0);
    bf.sched.x_nodes = hdr.at("x_nodes").get<std::vector<double>>();
    bf.sched.length = bf.sched.x_nodes.back();
    bf.grid.nodes = hdr.at("y_nodes").get<std::vector<double>>();
    bf.grid.y_max = hdr.at("y_max").get<double>();
    bf.grid.map_kind = hdr.at("map_kind").get<std::string>() == "uniform"
                           ? MapKind::uniform
                           : MapKind::exp_stretched;
    const std::size_t nx = bf.sched.size(), ny = bf.grid.size();
    bf.u_bar = read_field_csv(dir + "/u_bar.csv", nx, ny);
    bf.u_bar.label = "u_bar";
    bf.v_bar = read_field_csv(dir + "/v_bar.csv", nx, ny);
    bf.v_bar.label = "v_bar";
    bf.U0 = bf.u_bar.x_slice(0);
    bf.v0 = bf.v_bar.x_slice(0);
    bf.ux0.assign(ny, 0.0);
    // ux0 from the momentum identity at x = 0 where u > 0.
    for (std::size_t i = 1; i < ny; ++i) {
        const double u = bf.U0[i];
        if (u <= 0.0) throw NumericalError("import_baseflow: nonpositive U0 sample");
    }
    const Profile d1 = differentiate(bf.U0, bf.grid.nodes, 1);
    const Profile d2 = differentiate(bf.U0, bf.grid.nodes, 2);
    for (std::size_t i = 1; i < ny; ++i)
        bf.ux0[i] = (d2[i] - bf.v0[i] * d1[i]) / bf.U0[i];
    return bf;
}

} // namespace blkit
