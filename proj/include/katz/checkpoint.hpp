#pragma once

// Sweep checkpoints as JSON:
// {version: 1, p, lambda, i_max, d_prime: "a/b", completed_rows: [...],
//  partial_rows: [...], entries: [{i, j, status, value, gamma, lambda}]}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "katz/errors.hpp"
#include "katz/sweep_state.hpp"

namespace katz {

inline constexpr int kCheckpointVersion = 1;

inline const char* status_name(ValStatus::Kind kind) {
  switch (kind) {
    case ValStatus::Kind::exact:
      return "exact";
    case ValStatus::Kind::inconclusive:
      return "inconclusive";
    case ValStatus::Kind::zero_column:
      return "zero";
  }
  return "inconclusive";
}

inline nlohmann::json to_json(const SweepState& state) {
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["p"] = state.p;
  j["lambda"] = state.lambda_current;
  j["i_max"] = state.i_max;
  j["d_prime"] = fraction_string(state.d_prime);
  j["completed_rows"] = state.completed_rows;
  j["partial_rows"] = state.partial_rows;
  auto& entries = j["entries"] = nlohmann::json::array();
  for (const auto& e : state.entries) {
    nlohmann::json row{{"i", e.i}, {"j", e.j}, {"status", status_name(e.status.kind)}, {"lambda", e.lambda}};
    row["value"] = e.status.is_exact() ? nlohmann::json(e.status.value) : nlohmann::json(nullptr);
    row["gamma"] = e.status.kind == ValStatus::Kind::zero_column ? nlohmann::json(nullptr)
                                                                 : nlohmann::json(e.status.gamma.value());
    entries.push_back(std::move(row));
  }
  return j;
}

inline SweepState state_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> CheckpointError {
    return CheckpointError("checkpoint schema mismatch: " + what);
  };
  try {
    if (!j.is_object()) throw fail("top level is not an object");
    for (const char* key : {"version", "p", "lambda", "i_max", "d_prime", "completed_rows", "entries"}) {
      if (!j.contains(key)) throw fail(std::string("missing key '") + key + "'");
    }
    if (j.at("version") != kCheckpointVersion) throw fail("unsupported version " + j.at("version").dump());
    SweepState s;
    s.p = j.at("p").get<unsigned long>();
    s.lambda_current = j.at("lambda").get<int>();
    s.i_max = j.at("i_max").get<long>();
    const mpq_class stored = parse_fraction(j.at("d_prime").get<std::string>());
    for (long i : j.at("completed_rows")) s.completed_rows.insert(i);
    if (j.contains("partial_rows")) {
      for (long i : j.at("partial_rows")) s.partial_rows.insert(i);
    }
    for (const auto& row : j.at("entries")) {
      SweepEntry e;
      e.i = row.at("i").get<long>();
      e.j = row.at("j").get<long>();
      e.lambda = row.at("lambda").get<int>();
      const auto status = row.at("status").get<std::string>();
      if (status == "zero") {
        e.status = ValStatus::zero_column();
      } else {
        const int g = row.at("gamma").get<int>();
        const CappedVal gamma = g < e.lambda ? CappedVal::finite(g, e.lambda) : CappedVal::at_least(e.lambda);
        if (status == "exact") {
          e.status = ValStatus::exact(row.at("value").get<int>(), gamma);
        } else if (status == "inconclusive") {
          e.status = ValStatus::inconclusive(gamma);
        } else {
          throw fail("unknown status '" + status + "'");
        }
      }
      s.entries.push_back(e);
    }
    s.recompute_minimum();
    if (s.d_prime != stored) throw fail("d_prime " + fraction_string(stored) + " disagrees with entries");
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw fail(ex.what());
  } catch (const std::invalid_argument& ex) {
    throw fail(ex.what());
  }
}

inline SweepState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw CheckpointError("checkpoint schema mismatch: " + std::string(ex.what()));
  }
  return state_from_json(j);
}

/// Write to a sibling temp file, then rename over the target.
inline void save_checkpoint(const SweepState& state, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
    out << to_json(state).dump(1) << '\n';
    out.flush();
    if (!out) throw CheckpointError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot rename checkpoint into place: " + ec.message());
}

}  // namespace katz
