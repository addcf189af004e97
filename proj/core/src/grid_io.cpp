#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "agb/grid.hpp"

namespace agb {

namespace {

static_assert(std::endian::native == std::endian::little,
              "grid .bin format is little-endian; big-endian hosts unsupported");

nlohmann::json header_json(const GridGeoref& geo, double nodata, const char* kind) {
    return {{"nrows", geo.nrows},   {"ncols", geo.ncols},
            {"xll", geo.xll},       {"yll", geo.yll},
            {"cellsize", geo.cellsize}, {"nodata", nodata},
            {"crs_tag", geo.crs_tag},   {"kind", kind}};
}

void write_values(const std::filesystem::path& bin, const float* data, std::size_t n) {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + bin.string());
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 4));
    if (!out) throw IoError("write failed: " + bin.string());
}

struct Header {
    GridGeoref geo;
    double nodata;
    std::string kind;
};

Header read_header(const std::filesystem::path& jsonPath) {
    std::ifstream in(jsonPath);
    if (!in) throw IoError("cannot open for reading: " + jsonPath.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad grid header " + jsonPath.string() + ": " + e.what());
    }
    Header h;
    h.geo.nrows = j.at("nrows").get<int>();
    h.geo.ncols = j.at("ncols").get<int>();
    h.geo.xll = j.at("xll").get<double>();
    h.geo.yll = j.at("yll").get<double>();
    h.geo.cellsize = j.at("cellsize").get<double>();
    h.geo.crs_tag = j.at("crs_tag").get<std::string>();
    h.nodata = j.at("nodata").get<double>();
    h.kind = j.at("kind").get<std::string>();
    if (h.geo.nrows <= 0 || h.geo.ncols <= 0 || h.geo.cellsize <= 0.0)
        throw DataError("bad grid header dimensions: " + jsonPath.string());
    return h;
}

std::vector<float> read_values(const std::filesystem::path& bin, std::size_t expected) {
    std::ifstream in(bin, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open for reading: " + bin.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != expected * 4)
        throw DataError("grid size mismatch: " + bin.string() + " has " +
                        std::to_string(bytes) + " bytes, header implies " +
                        std::to_string(expected * 4));
    std::vector<float> v(expected);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("read failed: " + bin.string());
    return v;
}

}  // namespace

void write_grid(const std::filesystem::path& base, const Grid& g) {
    if (g.values.size() != g.geo.size())
        throw DataError("grid value count does not match dimensions");
    auto j = header_json(g.geo, g.nodata, "real");
    std::ofstream out(base.string() + ".json");
    if (!out) throw IoError("cannot open for writing: " + base.string() + ".json");
    out << j.dump(2) << '\n';
    write_values(base.string() + ".bin", g.values.data(), g.values.size());
}

void write_class_grid(const std::filesystem::path& base, const ClassGrid& g) {
    if (g.codes.size() != g.geo.size())
        throw DataError("grid value count does not match dimensions");
    auto j = header_json(g.geo, 0.0, "class");
    std::ofstream out(base.string() + ".json");
    if (!out) throw IoError("cannot open for writing: " + base.string() + ".json");
    out << j.dump(2) << '\n';
    std::vector<float> v(g.codes.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(g.codes[i]);
    write_values(base.string() + ".bin", v.data(), v.size());
}

Grid read_grid(const std::filesystem::path& base) {
    auto h = read_header(base.string() + ".json");
    if (h.kind != "real")
        throw DataError("expected kind \"real\": " + base.string() + ".json");
    Grid g;
    g.geo = h.geo;
    g.nodata = static_cast<float>(h.nodata);
    g.values = read_values(base.string() + ".bin", g.geo.size());
    return g;
}

ClassGrid read_class_grid(const std::filesystem::path& base) {
    auto h = read_header(base.string() + ".json");
    if (h.kind != "class")
        throw DataError("expected kind \"class\": " + base.string() + ".json");
    ClassGrid g;
    g.geo = h.geo;
    auto v = read_values(base.string() + ".bin", g.geo.size());
    g.codes.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const float f = v[i];
        if (f < 0.0f || f > lcmap::kMaxCode || f != std::floor(f))
            throw DataError("class grid holds a non-code value: " + base.string());
        g.codes[i] = static_cast<std::uint8_t>(f);
    }
    return g;
}

}  // namespace agb
