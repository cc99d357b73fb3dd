#pragma once

// Matrix/PVM JSON, state specs, number formatting and atomic file output.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qre/matkernel.hpp"
#include "qre/measurement.hpp"
#include "qre/quantum_state.hpp"

namespace qre::io {

using json = nlohmann::json;

/// 17 significant digits: lossless for doubles.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json matrix_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ii = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline CMatrix matrix_from_json(const json& j) {
  try {
    const auto dim = j.at("dim").get<long long>();
    if (dim < 1) throw Error(ErrorKind::ParseError, "matrix dim must be positive");
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    auto check_shape = [&](const json& part, const char* name) {
      if (!part.is_array() || static_cast<long long>(part.size()) != dim) {
        throw Error(ErrorKind::ParseError, std::string("matrix '") + name + "' must have dim rows");
      }
      for (const auto& row : part) {
        if (!row.is_array() || static_cast<long long>(row.size()) != dim) {
          throw Error(ErrorKind::ParseError, std::string("matrix '") + name + "' rows must have dim entries");
        }
      }
    };
    check_shape(re, "re");
    check_shape(im, "im");
    CMatrix m(dim, dim);
    for (long long r = 0; r < dim; ++r)
      for (long long c = 0; c < dim; ++c)
        m(r, c) = Complex(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>(),
                          im[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>());
    if (!all_finite(m)) throw Error(ErrorKind::ParseError, "matrix has non-finite entries");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed matrix JSON: ") + e.what());
  }
}

inline json pvm_to_json(const Pvm& e) {
  json out = json::array();
  for (std::size_t i = 0; i < e.size(); ++i) {
    json m = matrix_to_json(e.elements()[i]);
    m["label"] = e.labels()[i];
    out.push_back(std::move(m));
  }
  return out;
}

inline Pvm pvm_from_json(const json& j, double tol = kPvmTol) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, "PVM JSON must be a list of matrix objects");
  std::vector<CMatrix> el;
  std::vector<std::string> labels;
  for (const auto& item : j) {
    el.push_back(matrix_from_json(item));
    labels.push_back(item.contains("label") ? item["label"].get<std::string>() : std::to_string(labels.size()));
  }
  return Pvm::from_projectors(std::move(el), std::move(labels), tol);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Writes to a sibling temp file, then renames over `path`.
inline void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error(ErrorKind::InvalidArgument, "failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "empty number list");
  return out;
}

/// "diag:p1,...,pk" | "bloch:x,y,z" | "random:k" (seeded by `seed`) | path to matrix JSON.
inline DensityMatrix parse_state_spec(const std::string& spec, std::uint64_t seed = 0) {
  auto starts = [&](const char* p) { return spec.rfind(p, 0) == 0; };
  if (starts("diag:")) return diagonal_state(parse_number_list(spec.substr(5)));
  if (starts("bloch:")) {
    const auto v = parse_number_list(spec.substr(6));
    if (v.size() != 3) throw Error(ErrorKind::ParseError, "bloch spec needs exactly three components");
    return bloch_state(v[0], v[1], v[2]);
  }
  if (starts("random:")) {
    const auto v = parse_number_list(spec.substr(7));
    if (v.size() != 1 || v[0] < 1 || v[0] != std::floor(v[0])) {
      throw Error(ErrorKind::ParseError, "random spec needs a positive integer dimension");
    }
    return random_state(static_cast<int>(v[0]), seed);
  }
  return validate_state(matrix_from_json(read_json_file(spec)));
}

}  // namespace qre::io
