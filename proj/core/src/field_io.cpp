#include "elastoborn/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "elastoborn/error.hpp"

namespace elastoborn {

using nlohmann::json;

namespace {

fs::path strip_ext(fs::path p) {
    if (p.extension() == ".f64") p.replace_extension();
    return p;
}

std::uint64_t swap64(std::uint64_t v) {
    v = ((v & 0x00000000FFFFFFFFull) << 32) | ((v & 0xFFFFFFFF00000000ull) >> 32);
    v = ((v & 0x0000FFFF0000FFFFull) << 16) | ((v & 0xFFFF0000FFFF0000ull) >> 16);
    v = ((v & 0x00FF00FF00FF00FFull) << 8) | ((v & 0xFF00FF00FF00FF00ull) >> 8);
    return v;
}

void to_little_endian(std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::big) {
        for (auto& x : v) {
            std::uint64_t u;
            std::memcpy(&u, &x, 8);
            u = swap64(u);
            std::memcpy(&x, &u, 8);
        }
    }
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(p.string() + ": " + e.what());
    }
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << s << "\n";
}

}  // namespace

void write_field(const fs::path& dir, const std::string& name, const ScalarField& f) {
    fs::create_directories(dir);
    std::vector<double> v = f.v;
    to_little_endian(v);
    const fs::path raw = dir / (name + ".f64");
    std::ofstream out(raw, std::ios::binary);
    if (!out) throw Error("cannot write " + raw.string());
    out.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
    if (!out) throw Error("short write to " + raw.string());
    json meta = {{"N", f.grid.N}, {"L", f.grid.L}, {"support_tag", std::string(to_string(f.support))}, {"name", name}};
    write_text(dir / (name + ".json"), meta.dump(2));
}

ScalarField read_field(const fs::path& path) {
    const fs::path base = strip_ext(path);
    const fs::path raw = fs::path(base.string() + ".f64"), side = fs::path(base.string() + ".json");
    json meta = read_json(side);
    Grid g;
    std::string tag;
    try {
        g = Grid(meta.at("N").get<int>(), meta.at("L").get<double>());
        tag = meta.at("support_tag").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(side.string() + ": bad sidecar: " + e.what());
    }
    ScalarField f(g, support_from_string(tag));
    std::ifstream in(raw, std::ios::binary | std::ios::ate);
    if (!in) throw Error("cannot open " + raw.string());
    const auto bytes = std::size_t(in.tellg());
    if (bytes != g.size() * sizeof(double)) {
        throw Error(raw.string() + ": shape mismatch, " + std::to_string(bytes) + " bytes but N = " +
                    std::to_string(g.N) + " needs " + std::to_string(g.size() * sizeof(double)));
    }
    in.seekg(0);
    in.read(reinterpret_cast<char*>(f.v.data()), std::streamsize(bytes));
    if (!in) throw Error("short read from " + raw.string());
    to_little_endian(f.v);
    for (double x : f.v)
        if (!std::isfinite(x)) throw Error(raw.string() + ": non-finite value");
    return f;
}

void write_field(const fs::path& dir, const std::string& name, const VectorField& f) {
    for (int a = 0; a < 3; ++a) write_field(dir, name + "_" + std::to_string(a + 1), f[a]);
}

VectorField read_vector_field(const fs::path& dir, const std::string& name) {
    VectorField v;
    for (int a = 0; a < 3; ++a) v[a] = read_field(dir / (name + "_" + std::to_string(a + 1)));
    if (v[0].grid != v[1].grid || v[0].grid != v[2].grid) throw Error(name + ": component grids differ");
    return v;
}

bool field_exists(const fs::path& dir, const std::string& name) {
    return fs::exists(dir / (name + ".f64")) && fs::exists(dir / (name + ".json"));
}

void write_tensor_bundle(const fs::path& dir, const Perturbation& P, const std::string& extra_json) {
    fs::create_directories(dir);
    json comps = json::array();
    for (int s = 0; s < kVoigtSlots; ++s) {
        auto [A, B] = slot_pair(s);
        std::string n = "c" + std::to_string(A + 1) + std::to_string(B + 1);
        write_field(dir, n, P.C.slot(s));
        comps.push_back(n);
    }
    write_field(dir, "rho", P.rho);
    json meta = {{"N", P.grid().N}, {"L", P.grid().L}, {"storage", "voigt21"}, {"components", comps}};
    if (P.iso) {
        write_field(dir, "lambda", P.iso->first);
        write_field(dir, "mu", P.iso->second);
        meta["isotropic"] = true;
    }
    if (!extra_json.empty()) meta["meta"] = json::parse(extra_json);
    write_text(dir / "bundle.json", meta.dump(2));
}

Perturbation read_tensor_bundle(const fs::path& dir) {
    json meta = read_json(dir / "bundle.json");
    Grid g(meta.at("N").get<int>(), meta.at("L").get<double>());
    Perturbation P(g);
    for (int s = 0; s < kVoigtSlots; ++s) {
        auto [A, B] = slot_pair(s);
        ScalarField f = read_field(dir / ("c" + std::to_string(A + 1) + std::to_string(B + 1)));
        if (f.grid != g) throw Error(dir.string() + ": component grid differs from bundle.json");
        P.C.slot(s) = std::move(f);
    }
    P.rho = read_field(dir / "rho");
    if (P.rho.grid != g) throw Error(dir.string() + ": rho grid differs from bundle.json");
    if (meta.value("isotropic", false)) P.iso = std::make_pair(read_field(dir / "lambda"), read_field(dir / "mu"));
    return P;
}

}  // namespace elastoborn
