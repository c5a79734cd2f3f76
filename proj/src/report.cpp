#include "mdx/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mdx {

using nlohmann::json;

namespace {

// Round-trip exact decimal rendering of a double.
std::string exact(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_or_null(v(i)));
    return a;
}

json to_json(const QpSolution& s) {
    return json{{"v_star", to_json(s.v_star)},
                {"value", number_or_null(s.value)},
                {"active", s.active},
                {"w_star", to_json(s.w_star)},
                {"kkt_residual", s.kkt_residual},
                {"attained", s.attained}};
}

json to_json(const RateResult& r) {
    return json{{"m_of_u_T", number_or_null(r.m_of_u_T)},
                {"M_u_t_at_argmin", number_or_null(2.0 * r.m_of_u_T)},
                {"argmin", r.argmin_t},
                {"weights", to_json(r.qp.w_star)},
                {"active_set", r.qp.active},
                {"v_star", to_json(r.qp.v_star)},
                {"kkt_residual", r.qp.kkt_residual},
                {"u", r.u},
                {"u0", r.u0},
                {"notes", r.notes}};
}

json to_json(const A1Report& r) {
    const auto n = r.sup_k.rows();
    json pairs = json::array();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            pairs.push_back({{"i", i}, {"j", j}, {"sup_k", r.sup_k(i, j)},
                             {"argmax", r.argmax_points[i][j]}});
        }
    }
    return json{{"pass", r.pass},
                {"delta", r.delta},
                {"max_off_diagonal", r.max_off_diagonal},
                {"min_angle_deg", r.min_angle_deg},
                {"pairs", pairs},
                {"grid_size", r.grid_size},
                {"scope", "checked on the working grid only"}};
}

json to_json(const A2Heuristic& h) {
    json coords = json::array();
    for (std::size_t i = 0; i < h.verdict.size(); ++i) {
        json eps = json::object();
        for (int e = 0; e < 3; ++e) {
            std::ostringstream key;
            key << A2Heuristic::kEpsilons[e];
            eps[key.str()] = to_string(h.verdict[i][e]);
        }
        coords.push_back(eps);
    }
    return json{{"heuristic", true},
                {"tail_points", h.tail_points},
                {"coordinates", coords},
                {"note", "tail monotonicity of Var X_i / (eps d_i)^2; not a proof of boundedness"}};
}

json to_json(const SaddleReport& r) {
    return json{{"primal", r.primal},
                {"ratio_at_w_star", r.ratio_at_w_star},
                {"sampled_max", r.sampled_max},
                {"trials", r.trials},
                {"v_star", to_json(r.v_star)},
                {"w_star", to_json(r.w_star)},
                {"active_set", r.active},
                {"strong_duality", r.strong_duality},
                {"weak_duality", r.weak_duality}};
}

json to_json(const McEstimate& e) {
    json j{{"p_hat", e.p_hat},
           {"half_width", e.half_width},
           {"samples", e.samples},
           {"estimator", to_string(e.kind)},
           {"seed", e.seed},
           {"mean_sq", e.mean_sq},
           {"jitter", e.jitter}};
    if (e.kind == Estimator::MeanShift) {
        j["tilt_point"] = e.tilt_point;
        j["tilt_norm"] = e.tilt_norm;
    }
    return j;
}

json to_json(const SweepRow& row) {
    return json{{"u", row.u},
                {"p_hat", row.p_hat},
                {"neg_log_p", row.neg_log_p ? json(*row.neg_log_p) : json(nullptr)},
                {"m_of_u_T", row.m_of_u_T},
                {"ratio", row.ratio ? json(*row.ratio) : json(nullptr)},
                {"half_width", row.half_width},
                {"seed", row.seed}};
}

json to_json(const RegVarResult& r) {
    return json{{"J", number_or_null(r.J)},
                {"t_star", r.t_star},
                {"attained", r.attained},
                {"bracket", {r.lo, r.hi}},
                {"v_star", to_json(r.qp.v_star)},
                {"active_set", r.qp.active},
                {"notes", r.notes}};
}

std::string per_point_csv(const RateResult& r) {
    std::ostringstream os;
    const std::size_t m = r.argmin_t.size();
    for (std::size_t k = 0; k < m; ++k) os << "t" << (k + 1) << ',';
    os << "M_u_t\n";
    for (const PointRate& p : r.per_point) {
        for (double x : p.t) os << exact(x) << ',';
        os << exact(p.value) << '\n';
    }
    return os.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "u,p_hat,neg_log_p,m_of_u_T,ratio,half_width,seed\n";
    for (const SweepRow& r : rows) {
        os << exact(r.u) << ',' << exact(r.p_hat) << ','
           << (r.neg_log_p ? exact(*r.neg_log_p) : "") << ',' << exact(r.m_of_u_T) << ','
           << (r.ratio ? exact(*r.ratio) : "") << ',' << exact(r.half_width) << ',' << r.seed
           << '\n';
    }
    return os.str();
}

}  // namespace mdx
