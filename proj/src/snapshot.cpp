// SPDX-License-Identifier: Apache-2.0
#include "torusflow/snapshot.hpp"

#include "torusflow/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace torusflow {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot writer assumes a little-endian host");

constexpr const char* kMagic = "TFSNAP";
constexpr const char* kLayout = "component-major row-major float64-le";

std::string expect_key(std::istream& in, const std::string& key, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, path.string() + ": truncated header");
  if (line.rfind(key + " ", 0) != 0) {
    throw Error(ErrorKind::Io, path.string() + ": expected '" + key + "', found '" + line + "'");
  }
  return line.substr(key.size() + 1);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const VectorField& field, const std::string& tag) {
  if (tag.empty() || tag.find_first_of(" \n") != std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "snapshot tag must be a single word");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const auto& g = field.grid();
  out << kMagic << " 1\n"
      << "dim " << g.dim() << "\n"
      << "n_per_axis " << g.n() << "\n"
      << "components " << field.components() << "\n"
      << "normalization mean-is-coeff0\n"
      << "tag " << tag << "\n"
      << "layout " << kLayout << "\n"
      << "end_header\n";
  for (const auto& c : field.data()) {
    out.write(reinterpret_cast<const char*>(c.values().data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, const std::string& tag) {
  write_snapshot(path, VectorField(std::vector<ScalarField>{field}), tag);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  if (expect_key(in, kMagic, path) != "1") throw Error(ErrorKind::Io, path.string() + ": unsupported version");
  const int dim = std::stoi(expect_key(in, "dim", path));
  const int n = std::stoi(expect_key(in, "n_per_axis", path));
  const int comps = std::stoi(expect_key(in, "components", path));
  if (expect_key(in, "normalization", path) != "mean-is-coeff0") {
    throw Error(ErrorKind::Io, path.string() + ": unknown normalization");
  }
  std::string tag = expect_key(in, "tag", path);
  if (expect_key(in, "layout", path) != kLayout) throw Error(ErrorKind::Io, path.string() + ": unknown layout");
  std::string line;
  if (!std::getline(in, line) || line != "end_header") throw Error(ErrorKind::Io, path.string() + ": missing end_header");
  if (comps < 1) throw Error(ErrorKind::Io, path.string() + ": no components");
  TorusGrid grid(dim, n);
  std::vector<ScalarField> fields;
  for (int c = 0; c < comps; ++c) {
    RealArray v(grid.size());
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw Error(ErrorKind::Io, path.string() + ": truncated data");
    fields.emplace_back(grid, std::move(v));
  }
  return {std::move(tag), VectorField(std::move(fields))};
}

}  // namespace torusflow
