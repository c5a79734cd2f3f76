#pragma once

// JSON and CSV renderings of results. Layouts are documented in docs/output.md.

#include <string>
#include <vector>

#include "json.hpp"
#include "mdx/assumptions.hpp"
#include "mdx/decay.hpp"
#include "mdx/montecarlo.hpp"
#include "mdx/quadrant_qp.hpp"

namespace mdx {

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const QpSolution& s);
nlohmann::json to_json(const RateResult& r);
nlohmann::json to_json(const A1Report& r);
nlohmann::json to_json(const A2Heuristic& h);
nlohmann::json to_json(const SaddleReport& r);
nlohmann::json to_json(const McEstimate& e);
nlohmann::json to_json(const SweepRow& row);
nlohmann::json to_json(const RegVarResult& r);

/// Columns t_1..t_m, M_u_t.
std::string per_point_csv(const RateResult& r);
/// Columns u, p_hat, neg_log_p, m_of_u_T, ratio, half_width, seed. Absent
/// values are written as empty fields.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace mdx
