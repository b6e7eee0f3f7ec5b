#include "pluri/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pluri/error.hpp"

namespace pluri {

namespace {

constexpr char kMagic[4] = {'P', 'L', 'R', 'G'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary grid format assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw InvalidArgument("truncated PLRG stream");
    return v;
}

nlohmann::json pole_json(const PoleSpec& p) {
    nlohmann::json j;
    j["model"] = p.model == PoleModel::green ? "green" : "hyperplane";
    j["c"] = p.c;
    if (p.model == PoleModel::green) j["node"] = p.node;
    else j["axis"] = p.axis;
    j["location"] = std::vector<double>(p.location.begin(), p.location.end());
    return j;
}

}  // namespace

void write_grid_binary(std::ostream& os, const GridFunction& u) {
    const Grid& g = u.grid();
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::int32_t>(os, static_cast<std::int32_t>(g.domain().kind));
    put<std::int32_t>(os, g.n());
    put<double>(os, g.domain().radius);
    put<std::int32_t>(os, g.resolution());
    put<std::uint64_t>(os, u.poles().size());
    for (const auto& p : u.poles()) {
        put<std::int32_t>(os, static_cast<std::int32_t>(p.model));
        put<std::int32_t>(os, p.axis);
        put<double>(os, p.c);
        for (double x : p.location) put<double>(os, x);
    }
    put<std::uint64_t>(os, u.background().size());
    for (double v : u.background()) put<double>(os, v);
    put<std::uint64_t>(os, u.boundary_background().size());
    for (double v : u.boundary_background()) put<double>(os, v);
    if (!os) throw Error("failed writing PLRG stream");
}

GridFunction read_grid_binary(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw InvalidArgument("not a PLRG stream");
    auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw InvalidArgument("unsupported PLRG version " + std::to_string(version));
    auto kind = static_cast<DomainKind>(get<std::int32_t>(is));
    int n = get<std::int32_t>(is);
    double R = get<double>(is);
    int N = get<std::int32_t>(is);
    auto grid = make_grid(make_domain(kind, n, R), N);
    auto np = get<std::uint64_t>(is);
    std::vector<PoleSpec> poles;
    for (std::uint64_t j = 0; j < np; ++j) {
        auto model = static_cast<PoleModel>(get<std::int32_t>(is));
        int axis = get<std::int32_t>(is);
        double c = get<double>(is);
        Point loc;
        for (double& x : loc) x = get<double>(is);
        if (model == PoleModel::green)
            poles.push_back(make_green_pole(*grid, loc, c));
        else
            poles.push_back(make_hyperplane_pole(*grid, axis, {loc[2 * axis], loc[2 * axis + 1]}, c));
    }
    auto nb = get<std::uint64_t>(is);
    if (nb != grid->size()) throw InvalidArgument("PLRG node count does not match the grid");
    std::vector<double> bg(nb);
    for (double& v : bg) v = get<double>(is);
    auto nc = get<std::uint64_t>(is);
    if (nc != grid->stencil().crossings.size()) throw InvalidArgument("PLRG crossing count does not match the grid");
    std::vector<double> bd(nc);
    for (double& v : bd) v = get<double>(is);
    return GridFunction(grid, std::move(bg), std::move(bd), std::move(poles));
}

void save_grid(const std::string& path, const GridFunction& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_grid_binary(os, u);
}

GridFunction load_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("cannot open '" + path + "'");
    return read_grid_binary(is);
}

std::string grid_sidecar_json(const GridFunction& u, const std::string& binary_name) {
    const Grid& g = u.grid();
    nlohmann::json j;
    j["format"] = "PLRG";
    j["version"] = kVersion;
    j["file"] = binary_name;
    j["domain"] = {{"kind", to_string(g.domain().kind)}, {"n", g.n()}, {"radius", g.domain().radius}};
    j["resolution"] = g.resolution();
    j["nodes"] = g.size();
    j["crossings"] = g.stencil().crossings.size();
    j["data_scale"] = u.scale();
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& p : u.poles()) ps.push_back(pole_json(p));
    j["poles"] = ps;
    return j.dump(2);
}

void write_grid_csv(std::ostream& os, const GridFunction& u) {
    const Grid& g = u.grid();
    static const char* names[4] = {"x1", "y1", "x2", "y2"};
    for (int a = 0; a < g.dim(); ++a) os << names[a] << ',';
    os << "value,background\n" << std::setprecision(17);
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (int a = 0; a < g.dim(); ++a) os << g.point(i)[static_cast<std::size_t>(a)] << ',';
        os << u.value(i) << ',' << u.background()[i] << '\n';
    }
}

void write_measure_csv(std::ostream& os, const MeasureField& mu) {
    const Grid& g = *mu.grid;
    static const char* names[4] = {"x1", "y1", "x2", "y2"};
    os << "kind,";
    for (int a = 0; a < g.dim(); ++a) os << names[a] << ',';
    os << "mass\n" << std::setprecision(17);
    for (std::size_t i = 0; i < g.size(); ++i) {
        os << "node,";
        for (int a = 0; a < g.dim(); ++a) os << g.point(i)[static_cast<std::size_t>(a)] << ',';
        os << mu.cell_mass(i) << '\n';
    }
    for (const auto& at : mu.atoms) {
        os << "atom,";
        for (int a = 0; a < g.dim(); ++a) os << at.location[static_cast<std::size_t>(a)] << ',';
        os << at.mass << '\n';
    }
}

}  // namespace pluri
