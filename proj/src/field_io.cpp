#include "dbarlab/field_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "dbarlab/errors.hpp"

namespace dbarlab {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "blob I/O assumes a little-endian host");

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
}

std::string field_to_csv(const FormField& f) {
    const Grid& g = f.grid();
    static const char* axis_names[] = {"i_x1", "i_y1", "i_x2", "i_y2"};
    std::string out;
    for (int a = 0; a < g.axes(); ++a) {
        out += axis_names[a];
        out += ',';
    }
    for (int c = 0; c < f.components(); ++c) {
        out += "re_" + std::to_string(c) + ",im_" + std::to_string(c);
        out += c + 1 < f.components() ? "," : "\n";
    }
    char buf[64];
    for (std::size_t p = 0; p < g.points(); ++p) {
        for (int a = 0; a < g.axes(); ++a) {
            out += std::to_string(g.index(p, a));
            out += ',';
        }
        for (int c = 0; c < f.components(); ++c) {
            const cplx v = f.at(c, p);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", v.real(), v.imag());
            out += buf;
            out += c + 1 < f.components() ? "," : "\n";
        }
    }
    return out;
}

void write_field_csv(const FormField& f, const fs::path& path) { write_atomic(path, field_to_csv(f)); }

std::string field_to_blob(const FormField& f, BlobPrecision precision) {
    const Grid& g = f.grid();
    const bool single = precision == BlobPrecision::complex64;
    nlohmann::json header = {{"n", g.n()},
                             {"R", g.R()},
                             {"N", g.N()},
                             {"degree", f.degree()},
                             {"dtype", single ? "complex64" : "complex128"},
                             {"components", f.components()},
                             {"points", g.points()}};
    std::string out = header.dump() + "\n";
    const std::size_t head = out.size();
    if (single) {
        std::vector<float> buf;
        buf.reserve(2 * f.size());
        for (const cplx& v : f.data()) {
            buf.push_back(static_cast<float>(v.real()));
            buf.push_back(static_cast<float>(v.imag()));
        }
        out.resize(head + buf.size() * sizeof(float));
        std::memcpy(out.data() + head, buf.data(), buf.size() * sizeof(float));
    } else {
        out.resize(head + f.size() * sizeof(cplx));
        std::memcpy(out.data() + head, f.data().data(), f.size() * sizeof(cplx));
    }
    return out;
}

void write_field_blob(const FormField& f, const fs::path& path, BlobPrecision precision) {
    write_atomic(path, field_to_blob(f, precision));
}

FormField read_field_blob(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error("blob " + path.string() + ": bad header: " + e.what());
    }
    FormField f(Grid(header.at("n").get<int>(), header.at("R").get<double>(), header.at("N").get<int>()),
                header.at("degree").get<int>());
    const std::string dtype = header.at("dtype").get<std::string>();
    if (dtype == "complex64") {
        std::vector<float> buf(2 * f.size());
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!in) throw ShapeError("blob " + path.string() + ": truncated data");
        for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = cplx(buf[2 * i], buf[2 * i + 1]);
    } else if (dtype == "complex128") {
        in.read(reinterpret_cast<char*>(f.data().data()), static_cast<std::streamsize>(f.size() * sizeof(cplx)));
        if (!in) throw ShapeError("blob " + path.string() + ": truncated data");
    } else {
        throw Error("blob " + path.string() + ": unknown dtype " + dtype);
    }
    return f;
}

}  // namespace dbarlab
