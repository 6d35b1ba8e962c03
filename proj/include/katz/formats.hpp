#pragma once

// Text formats used by the command-line tool.
//
//  q-expansion input: one integer per line (line n+1 holds the coefficient of q^n),
//                     or a JSON array of integers; chosen by the first non-blank byte.
//  CSV:               header "i,j,status,value,gamma".

#include <gmpxx.h>

#include <cctype>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "katz/errors.hpp"
#include "katz/katz_expand.hpp"
#include "katz/sweep.hpp"

namespace katz {

namespace detail {

inline mpz_class parse_integer(std::string text, const std::string& where) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  std::size_t start = 0;
  while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
  text = text.substr(start);
  std::size_t digits = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
  if (digits == text.size()) throw InputFormatError(where + ": expected an integer, got '" + text + "'");
  for (std::size_t k = digits; k < text.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(text[k]))) {
      throw InputFormatError(where + ": expected an integer, got '" + text + "'");
    }
  }
  if (text[0] == '+') text = text.substr(1);
  return mpz_class(text, 10);
}

}  // namespace detail

inline std::vector<mpz_class> parse_qexpansion(const std::string& content) {
  std::size_t first = 0;
  while (first < content.size() && std::isspace(static_cast<unsigned char>(content[first]))) ++first;
  if (first == content.size()) throw InputFormatError("q-expansion input is empty");
  std::vector<mpz_class> coeffs;
  if (content[first] == '[') {
    nlohmann::json arr;
    try {
      arr = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& ex) {
      throw InputFormatError(std::string("invalid JSON q-expansion: ") + ex.what());
    }
    if (!arr.is_array()) throw InputFormatError("JSON q-expansion must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const auto& v = arr[k];
      const std::string where = "element " + std::to_string(k);
      if (v.is_number_integer()) {
        coeffs.push_back(detail::parse_integer(v.dump(), where));
      } else if (v.is_string()) {
        coeffs.push_back(detail::parse_integer(v.get<std::string>(), where));
      } else {
        throw InputFormatError(where + ": expected an integer");
      }
    }
    return coeffs;
  }
  std::istringstream in(content);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  while (!lines.empty() && lines.back().find_first_not_of(" \t\r") == std::string::npos) lines.pop_back();
  for (std::size_t k = 0; k < lines.size(); ++k) {
    coeffs.push_back(detail::parse_integer(lines[k], "line " + std::to_string(k + 1)));
  }
  return coeffs;
}

inline std::vector<mpz_class> parse_qexpansion(std::istream& in) {
  return parse_qexpansion(std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
}

/// Integers that fit in 64 bits as JSON numbers, larger ones as decimal strings.
inline nlohmann::json integer_json(const mpz_class& v) {
  if (mpz_fits_slong_p(v.get_mpz_t()) != 0) return v.get_si();
  return v.get_str();
}

inline nlohmann::json katz_tuple_json(const KatzTuple& t, std::size_t n_coeffs) {
  nlohmann::json j{{"p", t.p}, {"n", t.n}, {"C", t.e}, {"N", n_coeffs}};
  auto& comps = j["components"] = nlohmann::json::array();
  for (const auto& c : t.components) {
    nlohmann::json coords = nlohmann::json::array();
    for (std::size_t k = 0; k < c.coords.size(); ++k) {
      coords.push_back({{"j", c.range.first + static_cast<long>(k)}, {"value", integer_json(c.coords[k])}});
    }
    comps.push_back({{"i", c.i}, {"coords", std::move(coords)}});
  }
  return j;
}

inline constexpr const char* kCsvHeader = "i,j,status,value,gamma";

inline void write_csv_line(std::ostream& out, long i, long j, const ValStatus& st) {
  out << i << ',' << j << ',';
  switch (st.kind) {
    case ValStatus::Kind::exact:
      out << "exact," << st.value << ',' << st.gamma.value();
      break;
    case ValStatus::Kind::inconclusive:
      out << "inconclusive,," << st.gamma.value();
      break;
    case ValStatus::Kind::zero_column:
      out << "inconclusive,,";
      break;
  }
  out << '\n';
}

inline void write_row_csv(std::ostream& out, const ValuationRow& row) {
  out << kCsvHeader << '\n';
  for (std::size_t j = 0; j < row.entries.size(); ++j) write_csv_line(out, row.r, static_cast<long>(j), row.entries[j]);
}

inline void write_sweep_csv(std::ostream& out, const SweepState& state) {
  out << kCsvHeader << '\n';
  for (const auto& e : state.entries) write_csv_line(out, e.i, e.j, e.status);
}

inline nlohmann::json sweep_summary_json(const SweepState& state) {
  const AuditReport audit = theorem_b_audit(state);
  auto pairs = [](const std::vector<SweepEntry>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : v) a.push_back({{"i", e.i}, {"j", e.j}, {"value", e.status.value}});
    return a;
  };
  return {
      {"p", state.p},
      {"i_max", state.i_max},
      {"d_prime", fraction_string(state.d_prime)},
      {"attained", state.attained_rows()},
      {"c_p", fraction_string(c_p(state.p))},
      {"d_p_conj", fraction_string(d_p(state.p))},
      {"partial_rows", state.partial_rows},
      {"audits",
       {{"c_p_violations", pairs(audit.below_c_p)},
        {"d_p_violations", pairs(audit.below_d_p)},
        {"d_p_equalities", audit.equal_d_p.size()}}},
  };
}

}  // namespace katz
