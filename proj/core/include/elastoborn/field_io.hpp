#pragma once

#include <filesystem>
#include <string>

#include "elastoborn/field.hpp"
#include "elastoborn/tensor.hpp"

namespace elastoborn {

namespace fs = std::filesystem;

// <dir>/<name>.f64 (raw little-endian doubles, Grid index order) and
// <dir>/<name>.json {"N", "L", "support_tag", "name"}.
void write_field(const fs::path& dir, const std::string& name, const ScalarField& f);
// Reads <path> (with or without the .f64 extension) and its sidecar.
ScalarField read_field(const fs::path& path);

// Components as <name>_1, <name>_2, <name>_3.
void write_field(const fs::path& dir, const std::string& name, const VectorField& f);
VectorField read_vector_field(const fs::path& dir, const std::string& name);

bool field_exists(const fs::path& dir, const std::string& name);

// Directory with cAB.f64 for 1 <= A <= B <= 6, rho.f64 and bundle.json.
// extra_json, if not empty, must be a JSON object and is stored under "meta".
void write_tensor_bundle(const fs::path& dir, const Perturbation& P, const std::string& extra_json = "");
Perturbation read_tensor_bundle(const fs::path& dir);

}  // namespace elastoborn
