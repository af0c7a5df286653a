#ifndef ETLRA_IO_HPP
#define ETLRA_IO_HPP

#include "etlra/common.hpp"
#include "etlra/lra.hpp"
#include "etlra/reduction.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// File formats.
//
// Matrix container (little-endian throughout):
//   bytes 0..3   magic "ETLM"
//   byte  4      version (1)
//   bytes 5..12  rows, uint64
//   bytes 13..20 cols, uint64
//   then rows*cols IEEE-754 binary64 values in row-major order.
//
// OVP instance (JSON): {"s": int, "A": ["0101..."], "B": [...],
// "planted": [[i, j], ...]}.

namespace etlra::io {

class FormatError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::array<char, 4> kMatrixMagic{'E', 'T', 'L', 'M'};
inline constexpr std::uint8_t kMatrixVersion = 1;

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xffu));
}

inline std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) {
    const int c = in.get();
    if (c == EOF) throw FormatError("matrix container: truncated header");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}

}  // namespace detail

inline void write_matrix(std::ostream& out, const Matrix& m) {
  out.write(kMatrixMagic.data(), kMatrixMagic.size());
  out.put(static_cast<char>(kMatrixVersion));
  detail::put_u64(out, static_cast<std::uint64_t>(m.rows()));
  detail::put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) detail::put_u64(out, std::bit_cast<std::uint64_t>(m(i, j)));
  if (!out) throw FormatError("matrix container: write failed");
}

inline Matrix read_matrix(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMatrixMagic) throw FormatError("matrix container: bad magic tag");
  const int version = in.get();
  if (version != kMatrixVersion)
    throw FormatError("matrix container: unsupported version " + std::to_string(version));
  const std::uint64_t rows = detail::get_u64(in);
  const std::uint64_t cols = detail::get_u64(in);
  if (rows != 0 && cols > (std::uint64_t{1} << 40) / rows)
    throw FormatError("matrix container: implausible dimensions");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      std::uint64_t bits = 0;
      try {
        bits = detail::get_u64(in);
      } catch (const FormatError&) {
        throw FormatError("matrix container: truncated payload");
      }
      m(i, j) = std::bit_cast<double>(bits);
    }
  return m;
}

inline void save_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_matrix(out, m);
}

inline Matrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_matrix(in);
}

/// Comma-separated rows of numbers; blank lines and lines starting with '#'
/// are skipped.
inline Matrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError("csv: cannot parse '" + cell + "' on row " + std::to_string(rows.size() + 1));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("csv: ragged row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

/// Binary container or, for paths ending in ".csv", CSV.
inline Matrix load_matrix_any(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return read_csv(in);
  }
  return load_matrix(path);
}

// OVP instances ------------------------------------------------------------

inline std::string bits_to_string(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::string s(static_cast<std::size_t>(row.size()), '0');
  for (Index c = 0; c < row.size(); ++c)
    if (row(c) != 0.0) s[static_cast<std::size_t>(c)] = '1';
  return s;
}

inline nlohmann::json to_json(const OvpInstance& inst) {
  nlohmann::json j;
  j["s"] = inst.s();
  j["A"] = nlohmann::json::array();
  j["B"] = nlohmann::json::array();
  for (Index i = 0; i < inst.n(); ++i) j["A"].push_back(bits_to_string(inst.a.row(i)));
  for (Index i = 0; i < inst.d(); ++i) j["B"].push_back(bits_to_string(inst.b.row(i)));
  j["planted"] = nlohmann::json::array();
  for (const auto& [a, b] : inst.planted) j["planted"].push_back({a, b});
  return j;
}

inline OvpInstance instance_from_json(const nlohmann::json& j) {
  try {
    const Index s = j.at("s").get<Index>();
    auto parse = [s](const nlohmann::json& list, const char* name) {
      if (!list.is_array() || list.empty())
        throw FormatError(std::string("instance: ") + name + " must be a non-empty array");
      Matrix m(static_cast<Index>(list.size()), s);
      for (Index i = 0; i < m.rows(); ++i) {
        const auto bits = list[static_cast<std::size_t>(i)].get<std::string>();
        if (static_cast<Index>(bits.size()) != s)
          throw FormatError(std::string("instance: ") + name + "[" + std::to_string(i) +
                            "] does not have length s");
        for (Index c = 0; c < s; ++c) {
          const char ch = bits[static_cast<std::size_t>(c)];
          if (ch != '0' && ch != '1') throw FormatError("instance: bitstrings may only contain 0 and 1");
          m(i, c) = ch == '1' ? 1.0 : 0.0;
        }
      }
      return m;
    };
    OvpInstance inst;
    inst.a = parse(j.at("A"), "A");
    inst.b = parse(j.at("B"), "B");
    if (j.contains("planted"))
      for (const auto& pair : j.at("planted"))
        inst.planted.emplace_back(pair.at(0).get<Index>(), pair.at(1).get<Index>());
    inst.validate();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("instance: ") + e.what());
  } catch (const ContractViolation& e) {
    throw FormatError(e.what());
  }
}

inline OvpInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

inline void save_instance(const std::string& path, const OvpInstance& inst) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << to_json(inst).dump(1) << "\n";
}

// Reduction traces and factor outputs --------------------------------------

inline std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline nlohmann::json to_json(const ReductionTrace& t) {
  nlohmann::json j;
  j["decision"] = to_string(t.decision);
  j["decision_path"] = to_string(t.path);
  j["sign_column"] = to_vector(t.sign_column);
  j["residuals"] = to_vector(t.residuals);
  j["max_residual"] = t.max_residual;
  j["candidates"] = t.candidates;
  j["tau"] = t.tau;
  j["k"] = t.k;
  j["basis_width"] = t.basis_width;
  j["bailed_out"] = t.bailed_out;
  if (t.found_pair) j["found_pair"] = {t.found_pair->first, t.found_pair->second};
  return j;
}

/// <prefix>.left.bin, <prefix>.right.bin and <prefix>.json.
inline void save_factors(const std::string& prefix, const RankKFactors& rk, double eps,
                         std::uint64_t seed) {
  save_matrix(prefix + ".left.bin", rk.left);
  save_matrix(prefix + ".right.bin", rk.right);
  nlohmann::json meta;
  meta["k"] = rk.k;
  meta["eps"] = eps;
  meta["seed"] = seed;
  meta["achievedError"] = rk.achieved_error ? nlohmann::json(*rk.achieved_error) : nlohmann::json(nullptr);
  meta["degenerate"] = rk.degenerate;
  std::ofstream out(prefix + ".json");
  if (!out) throw FormatError("cannot open " + prefix + ".json for writing");
  out << meta.dump(1) << "\n";
}

}  // namespace etlra::io

#endif  // ETLRA_IO_HPP
