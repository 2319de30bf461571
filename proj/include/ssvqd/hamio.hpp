// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hamio.hpp
 * @brief Molecular integrals and the FCIDUMP interchange format.
 *
 * One-electron integrals h_ij and two-electron integrals (ij|kl) are kept in
 * the spatial-orbital basis, chemist convention, exactly as stored on disk.
 * Spin-orbitals are numbered alpha block first: spatial orbital p maps to
 * spin-orbital p (alpha) and p + m_spatial (beta).
 */

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "ssvqd/error.hpp"

namespace ssvqd {

struct MolecularIntegrals {
  int m_spatial = 0;
  int n_electrons = 0;
  int ms2 = 0;
  Eigen::MatrixXd h;     ///< m_spatial x m_spatial, symmetric (Hartree)
  std::vector<double> v; ///< m_spatial^4, (ij|kl) at ((i*m + j)*m + k)*m + l
  double e_core = 0.0;   ///< constant shift, includes nuclear repulsion
  std::vector<int> orbsym;  ///< parsed from the header, otherwise unused

  MolecularIntegrals() = default;

  /// Zero-filled integrals for `m` spatial orbitals.
  MolecularIntegrals(int m, int nelec, int ms2_)
      : m_spatial(m),
        n_electrons(nelec),
        ms2(ms2_),
        h(Eigen::MatrixXd::Zero(m, m)),
        v(static_cast<std::size_t>(m) * m * m * m, 0.0) {}

  std::size_t eri_index(int i, int j, int k, int l) const noexcept {
    const std::size_t m = static_cast<std::size_t>(m_spatial);
    return ((static_cast<std::size_t>(i) * m + j) * m + k) * m + l;
  }

  double eri(int i, int j, int k, int l) const noexcept { return v[eri_index(i, j, k, l)]; }

  /// Store (ij|kl) together with its seven permutation partners.
  void set_eri(int i, int j, int k, int l, double value) {
    for (const auto& [a, b, c, d] : std::array<std::array<int, 4>, 8>{{{i, j, k, l},
                                                                       {j, i, k, l},
                                                                       {i, j, l, k},
                                                                       {j, i, l, k},
                                                                       {k, l, i, j},
                                                                       {l, k, i, j},
                                                                       {k, l, j, i},
                                                                       {l, k, j, i}}}) {
      v[eri_index(a, b, c, d)] = value;
    }
  }

  int n_alpha() const noexcept { return (n_electrons + ms2) / 2; }
  int n_beta() const noexcept { return (n_electrons - ms2) / 2; }
};

/// 2 * m_spatial. Alpha spin-orbitals come first.
inline int spin_orbital_count(const MolecularIntegrals& ints) noexcept { return 2 * ints.m_spatial; }

namespace detail {

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Splits the namelist body into KEY -> raw value tokens.
inline std::map<std::string, std::vector<std::string>> parse_namelist(const std::string& body) {
  std::map<std::string, std::vector<std::string>> out;
  static const std::regex key_re(R"(([A-Za-z][A-Za-z0-9_]*)\s*=)");
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> keys;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), key_re); it != std::sregex_iterator();
       ++it) {
    keys.push_back({upper((*it)[1].str()),
                    {static_cast<std::size_t>(it->position()), static_cast<std::size_t>(it->position() + it->length())}});
  }
  for (std::size_t n = 0; n < keys.size(); ++n) {
    const std::size_t begin = keys[n].second.second;
    const std::size_t end = n + 1 < keys.size() ? keys[n + 1].second.first : body.size();
    std::string raw = body.substr(begin, end - begin);
    for (auto& c : raw)
      if (c == ',') c = ' ';
    std::istringstream ss(raw);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    out[keys[n].first] = std::move(tokens);
  }
  return out;
}

inline int header_int(const std::map<std::string, std::vector<std::string>>& nl, const std::string& key) {
  const auto it = nl.find(key);
  if (it == nl.end() || it->second.empty()) throw ParseError("FCIDUMP header is missing key " + key);
  try {
    return std::stoi(it->second.front());
  } catch (const std::exception&) {
    throw ParseError("FCIDUMP header key " + key + " has non-integer value '" + it->second.front() + "'");
  }
}

}  // namespace detail

/**
 * Parse an FCIDUMP stream.
 *
 * Body lines are `value i j k l` with 1-based indices. i=j=k=l=0 is the core
 * energy, k=l=0 a one-electron integral, and i>0 with j=k=l=0 an orbital
 * energy (ignored). Each stored entry populates all symmetry partners.
 */
inline MolecularIntegrals parse_fcidump(std::istream& in) {
  std::string line;
  std::string header;
  std::size_t line_no = 0;
  bool started = false;
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string up = detail::upper(line);
    if (!started) {
      const auto pos = up.find("&FCI");
      if (pos == std::string::npos) {
        if (up.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("FCIDUMP must begin with an &FCI namelist header (line " + std::to_string(line_no) + ")");
      }
      started = true;
      up = up.substr(pos + 4);
      line = line.substr(pos + 4);
    }
    const auto end_pos = up.find("&END");
    const auto slash_pos = up.find('/');
    if (end_pos != std::string::npos || slash_pos != std::string::npos) {
      header += line.substr(0, std::min(end_pos, slash_pos));
      ended = true;
      break;
    }
    header += line + " ";
  }
  if (!ended) throw ParseError("FCIDUMP header is not terminated by &END or /");

  const auto nl = detail::parse_namelist(header);
  const int norb = detail::header_int(nl, "NORB");
  const int nelec = detail::header_int(nl, "NELEC");
  const int ms2 = detail::header_int(nl, "MS2");
  if (norb <= 0) throw RangeError("FCIDUMP NORB must be positive");
  if (nelec < 0 || nelec > 2 * norb) throw RangeError("FCIDUMP NELEC out of range");

  MolecularIntegrals ints(norb, nelec, ms2);
  if (const auto it = nl.find("ORBSYM"); it != nl.end()) {
    for (const auto& tok : it->second) ints.orbsym.push_back(std::stoi(tok));
  }

  // Canonical-entry bookkeeping for duplicate detection.
  std::map<std::array<int, 4>, double> seen;
  auto record = [&](std::array<int, 4> key, double value) {
    auto [it, inserted] = seen.emplace(key, value);
    if (!inserted && std::abs(it->second - value) > 1e-12) {
      std::ostringstream msg;
      msg << "FCIDUMP line " << line_no << ": conflicting duplicate entry for (" << key[0] << " " << key[1] << "|"
          << key[2] << " " << key[3] << "): " << it->second << " vs " << value;
      throw ConsistencyError(msg.str());
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string value_tok;
    if (!(ss >> value_tok)) continue;
    // Fortran exponents such as 1.0D-03.
    for (auto& c : value_tok)
      if (c == 'D' || c == 'd') c = 'e';
    double value = 0.0;
    std::array<int, 4> idx{};
    try {
      value = std::stod(value_tok);
    } catch (const std::exception&) {
      throw ParseError("FCIDUMP line " + std::to_string(line_no) + ": cannot parse value '" + value_tok + "'");
    }
    if (!(ss >> idx[0] >> idx[1] >> idx[2] >> idx[3])) {
      throw ParseError("FCIDUMP line " + std::to_string(line_no) + ": expected 'value i j k l'");
    }
    for (int x : idx) {
      if (x < 0 || x > norb) {
        throw RangeError("FCIDUMP line " + std::to_string(line_no) + ": index " + std::to_string(x) +
                         " outside [0, NORB=" + std::to_string(norb) + "]");
      }
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      record({0, 0, 0, 0}, value);
      ints.e_core = value;
    } else if (k == 0 && l == 0 && j == 0) {
      // orbital energy
    } else if (k == 0 && l == 0) {
      if (i == 0) throw RangeError("FCIDUMP line " + std::to_string(line_no) + ": one-electron index is zero");
      record({std::max(i, j), std::min(i, j), 0, 0}, value);
      ints.h(i - 1, j - 1) = value;
      ints.h(j - 1, i - 1) = value;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0) {
        throw RangeError("FCIDUMP line " + std::to_string(line_no) + ": two-electron index is zero");
      }
      std::array<int, 2> p{std::max(i, j), std::min(i, j)};
      std::array<int, 2> q{std::max(k, l), std::min(k, l)};
      if (p < q) std::swap(p, q);
      record({p[0], p[1], q[0], q[1]}, value);
      ints.set_eri(i - 1, j - 1, k - 1, l - 1, value);
    }
  }
  return ints;
}

inline MolecularIntegrals parse_fcidump_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_fcidump(ss);
}

inline MolecularIntegrals read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open FCIDUMP file " + path);
  return parse_fcidump(in);
}

/// Write the unique non-zero entries in FCIDUMP layout, round-trip exact.
inline void write_fcidump(const MolecularIntegrals& ints, std::ostream& out) {
  const int m = ints.m_spatial;
  out << "&FCI NORB=" << m << ",NELEC=" << ints.n_electrons << ",MS2=" << ints.ms2 << ",\n ORBSYM=";
  for (int p = 0; p < m; ++p) out << (ints.orbsym.size() == static_cast<std::size_t>(m) ? ints.orbsym[p] : 1) << ",";
  out << "\n ISYM=1,\n&END\n";
  out << std::scientific << std::setprecision(17);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) continue;
          const double x = ints.eri(i, j, k, l);
          if (x != 0.0) out << x << ' ' << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' ' << l + 1 << '\n';
        }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j)
      if (ints.h(i, j) != 0.0) out << ints.h(i, j) << ' ' << i + 1 << ' ' << j + 1 << " 0 0\n";
  out << ints.e_core << " 0 0 0 0\n";
}

/// Largest deviation from the h symmetry and the 8-fold (ij|kl) symmetry.
inline double symmetry_defect(const MolecularIntegrals& ints) {
  const int m = ints.m_spatial;
  double worst = (ints.h - ints.h.transpose()).cwiseAbs().maxCoeff();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const double x = ints.eri(i, j, k, l);
          for (double y : {ints.eri(j, i, k, l), ints.eri(i, j, l, k), ints.eri(k, l, i, j)})
            worst = std::max(worst, std::abs(x - y));
        }
  return worst;
}

}  // namespace ssvqd
