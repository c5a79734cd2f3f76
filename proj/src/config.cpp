#include "mdx/config.hpp"

#include <fstream>
#include <sstream>

#include "mdx/assumptions.hpp"
#include "mdx/parallel.hpp"

namespace mdx {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field, "expected an object");
    if (!j.contains(key)) throw ConfigError(field + "." + key, "missing required field");
    return j.at(key);
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    return j.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
    return j.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& j, const std::string& field) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ConfigError(field, "expected a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field, "expected a string");
    return j.get<std::string>();
}

Point parse_point(const json& j, const std::string& field) {
    const Vector v = parse_vector(j, field);
    return Point(v.data(), v.data() + v.size());
}

DomainGrid::Spacing parse_spacing(const json& j, const std::string& field) {
    if (!j.contains("spacing")) return DomainGrid::Spacing::Linear;
    const std::string s = get_string(j.at("spacing"), field + ".spacing");
    if (s == "linear") return DomainGrid::Spacing::Linear;
    if (s == "log") return DomainGrid::Spacing::Log;
    throw ConfigError(field + ".spacing", "expected \"linear\" or \"log\", got \"" + s + "\"");
}

// Re-raise library argument errors under the config field that caused them.
template <class F>
auto with_field(const std::string& field, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(field, e.what());
    } catch (const DegenerateCovariance& e) {
        throw ConfigError(field, e.what());
    }
}

}  // namespace

Vector parse_vector(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = get_number(j[i], field + "[" + std::to_string(i) + "]");
    }
    return v;
}

Matrix parse_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const Vector first = parse_vector(j[0], field + "[0]");
    Matrix m(static_cast<Eigen::Index>(rows), first.size());
    for (std::size_t r = 0; r < rows; ++r) {
        const Vector row = parse_vector(j[r], field + "[" + std::to_string(r) + "]");
        if (row.size() != first.size()) throw ConfigError(field, "rows have different lengths");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

ScalarKernel parse_kernel(const json& j, const std::string& field) {
    const std::string type = get_string(require(j, "type", field), field + ".type");
    return with_field(field, [&] {
        if (type == "bm") return ScalarKernel::bm();
        if (type == "fbm") {
            return ScalarKernel::fbm(get_number(require(j, "hurst", field), field + ".hurst"));
        }
        if (type == "ou") {
            return ScalarKernel::ou(get_number(require(j, "lambda", field), field + ".lambda"));
        }
        if (type == "scaled") {
            const double c = get_number(require(j, "c", field), field + ".c");
            return ScalarKernel::scaled(c, parse_kernel(require(j, "inner", field), field + ".inner"));
        }
        throw ConfigError(field + ".type", "unknown kernel type \"" + type + "\"");
    });
}

CovModel parse_model(const json& j, const std::string& field) {
    const std::string kind = get_string(require(j, "kind", field), field + ".kind");

    std::vector<ScalarKernel> kernels;
    if (kind != "tabulated") {
        const json& comps = require(j, "components", field);
        if (!comps.is_array() || comps.empty()) {
            throw ConfigError(field + ".components", "expected a non-empty array");
        }
        for (std::size_t i = 0; i < comps.size(); ++i) {
            kernels.push_back(parse_kernel(comps[i], field + ".components[" + std::to_string(i) + "]"));
        }
    }

    CovModel model = with_field(field, [&]() -> CovModel {
        if (kind == "independent") return CovModel::independent(kernels);
        if (kind == "product") return CovModel::product_domain(kernels);
        if (kind == "mixed") {
            Matrix s = parse_matrix(require(j, "S", field), field + ".S");
            return with_field(field + ".S", [&] { return CovModel::mixed(kernels, s); });
        }
        if (kind == "tabulated") {
            const json& table = require(j, "table", field);
            if (!table.is_array() || table.empty()) {
                throw ConfigError(field + ".table", "expected a non-empty array");
            }
            std::vector<Point> pts;
            std::vector<SymMatrix> sig;
            for (std::size_t k = 0; k < table.size(); ++k) {
                const std::string f = field + ".table[" + std::to_string(k) + "]";
                pts.push_back(parse_point(require(table[k], "t", f), f + ".t"));
                sig.push_back(with_field(f + ".sigma", [&] {
                    return SymMatrix(parse_matrix(require(table[k], "sigma", f), f + ".sigma"));
                }));
            }
            return CovModel::tabulated(std::move(pts), std::move(sig));
        }
        throw ConfigError(field + ".kind", "unknown model kind \"" + kind + "\"");
    });

    if (j.contains("n") && get_integer(j.at("n"), field + ".n") != model.n()) {
        throw ConfigError(field + ".n", "declares " + j.at("n").dump() + " components but the model has " +
                                            std::to_string(model.n()));
    }
    return model;
}

DriftModel parse_drift(const json& j, const CovModel& model, const std::string& field) {
    const int n = model.n();
    const std::string kind = get_string(require(j, "kind", field), field + ".kind");
    const bool product = model.kind() == CovModel::Kind::ProductDomain;

    auto lift = [&](auto make) {
        std::vector<DriftModel> coords;
        for (int i = 0; i < n; ++i) coords.push_back(make(i));
        return DriftModel::product(std::move(coords));
    };

    DriftModel drift = with_field(field, [&]() -> DriftModel {
        if (kind == "zero") {
            return product ? lift([](int) { return DriftModel::zero(1); }) : DriftModel::zero(n);
        }
        if (kind == "linear_unit") {
            return product ? lift([](int) { return DriftModel::linear_unit(1); })
                           : DriftModel::linear_unit(n);
        }
        if (kind == "affine") {
            const Vector slope = parse_vector(require(j, "slope", field), field + ".slope");
            const Vector icpt = parse_vector(require(j, "intercept", field), field + ".intercept");
            if (slope.size() != n || icpt.size() != n) {
                throw ConfigError(field, "slope and intercept need " + std::to_string(n) + " entries");
            }
            if (!product) return DriftModel::affine(slope, icpt);
            return lift([&](int i) {
                return DriftModel::affine(Vector::Constant(1, slope(i)), Vector::Constant(1, icpt(i)));
            });
        }
        if (kind == "tabulated") {
            const json& table = require(j, "table", field);
            if (!table.is_array() || table.empty()) {
                throw ConfigError(field + ".table", "expected a non-empty array");
            }
            std::vector<Point> pts;
            std::vector<Vector> vals;
            for (std::size_t k = 0; k < table.size(); ++k) {
                const std::string f = field + ".table[" + std::to_string(k) + "]";
                pts.push_back(parse_point(require(table[k], "t", f), f + ".t"));
                vals.push_back(parse_vector(require(table[k], "d", f), f + ".d"));
            }
            return DriftModel::tabulated(std::move(pts), std::move(vals));
        }
        if (kind == "product") {
            const json& coords = require(j, "coordinates", field);
            if (!coords.is_array() || static_cast<int>(coords.size()) != n) {
                throw ConfigError(field + ".coordinates", "expected " + std::to_string(n) + " entries");
            }
            const CovModel scalar = CovModel::independent({ScalarKernel::bm()});
            std::vector<DriftModel> parts;
            for (std::size_t i = 0; i < coords.size(); ++i) {
                parts.push_back(parse_drift(coords[i], scalar,
                                            field + ".coordinates[" + std::to_string(i) + "]"));
            }
            return DriftModel::product(std::move(parts));
        }
        throw ConfigError(field + ".kind", "unknown drift kind \"" + kind + "\"");
    });
    if (drift.n() != n) {
        throw ConfigError(field, "drift has " + std::to_string(drift.n()) + " components, model has " +
                                     std::to_string(n));
    }
    return drift;
}

DomainGrid parse_grid(const json& j, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field, "expected an object");
    return with_field(field, [&]() -> DomainGrid {
        if (j.contains("box")) {
            const json& b = j.at("box");
            const std::string f = field + ".box";
            const Point lo = parse_point(require(b, "lo", f), f + ".lo");
            const Point hi = parse_point(require(b, "hi", f), f + ".hi");
            const json& res = require(b, "resolution", f);
            std::vector<int> resolution;
            if (res.is_array()) {
                for (std::size_t i = 0; i < res.size(); ++i) {
                    resolution.push_back(static_cast<int>(
                        get_integer(res[i], f + ".resolution[" + std::to_string(i) + "]")));
                }
            } else {
                resolution.assign(lo.size(), static_cast<int>(get_integer(res, f + ".resolution")));
            }
            return with_field(f, [&] { return DomainGrid::box(lo, hi, resolution, parse_spacing(b, f)); });
        }
        if (j.contains("points")) {
            const json& pts = j.at("points");
            if (!pts.is_array() || pts.empty()) {
                throw ConfigError(field + ".points", "expected a non-empty array of points");
            }
            std::vector<Point> points;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                points.push_back(parse_point(pts[k], field + ".points[" + std::to_string(k) + "]"));
            }
            return DomainGrid(std::move(points));
        }
        if (j.contains("product")) {
            const json& axes = j.at("product");
            if (!axes.is_array() || axes.empty()) {
                throw ConfigError(field + ".product", "expected a non-empty array of axes");
            }
            std::vector<std::vector<double>> values;
            for (std::size_t k = 0; k < axes.size(); ++k) {
                const std::string f = field + ".product[" + std::to_string(k) + "]";
                const json& a = axes[k];
                if (a.is_object() && a.contains("values")) {
                    const Vector v = parse_vector(a.at("values"), f + ".values");
                    values.emplace_back(v.data(), v.data() + v.size());
                } else {
                    const double lo = get_number(require(a, "lo", f), f + ".lo");
                    const double hi = get_number(require(a, "hi", f), f + ".hi");
                    const int res = static_cast<int>(get_integer(require(a, "resolution", f), f + ".resolution"));
                    values.push_back(with_field(f, [&] { return axis_values(lo, hi, res, parse_spacing(a, f)); }));
                }
            }
            return DomainGrid::product(values);
        }
        throw ConfigError(field, "expected one of \"box\", \"points\" or \"product\"");
    });
}

RunConfig load_config(const json& j) {
    if (!j.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
    RunConfig cfg;
    cfg.raw = j;
    cfg.rate.workers = default_workers();
    cfg.mc.workers = default_workers();

    if (j.contains("model")) {
        cfg.model = parse_model(j.at("model"));
        cfg.drift = j.contains("drift") ? parse_drift(j.at("drift"), *cfg.model)
                                        : DriftModel::zero(cfg.model->n());
    }
    if (j.contains("grid")) {
        DomainGrid grid = parse_grid(j.at("grid"));
        if (cfg.model) {
            if (grid.dim() != cfg.model->domain_dim()) {
                throw ConfigError("grid", "points have dimension " + std::to_string(grid.dim()) +
                                              ", model expects " + std::to_string(cfg.model->domain_dim()));
            }
            const std::size_t before = grid.size();
            grid = with_field("grid", [&] { return exclude_degenerate(grid, *cfg.model); });
            cfg.excluded_points = before - grid.size();
        }
        cfg.grid = std::move(grid);
    }
    if (j.contains("q")) {
        cfg.q = parse_vector(j.at("q"), "q");
        if ((cfg.q.array() <= 0.0).any()) throw ConfigError("q", "entries must be strictly positive");
        if (cfg.model && cfg.q.size() != cfg.model->n()) {
            throw ConfigError("q", "has " + std::to_string(cfg.q.size()) + " entries, model has " +
                                       std::to_string(cfg.model->n()) + " components");
        }
    }
    if (j.contains("u")) cfg.u = get_number(j.at("u"), "u");
    if (j.contains("u_list")) {
        const json& ul = j.at("u_list");
        if (!ul.is_array()) throw ConfigError("u_list", "expected an array of numbers");
        for (std::size_t k = 0; k < ul.size(); ++k) {
            cfg.u_list.push_back(get_number(ul[k], "u_list[" + std::to_string(k) + "]"));
        }
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        if (s.contains("delta")) {
            cfg.delta = get_number(s.at("delta"), "solver.delta");
            if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("solver.delta", "must lie in (0, 1)");
        }
        if (s.contains("refine")) {
            if (!s.at("refine").is_boolean()) throw ConfigError("solver.refine", "expected a boolean");
            cfg.rate.refine = s.at("refine").get<bool>();
        }
        if (s.contains("per_point")) {
            if (!s.at("per_point").is_boolean()) throw ConfigError("solver.per_point", "expected a boolean");
            cfg.rate.per_point = s.at("per_point").get<bool>();
        } else {
            cfg.rate.per_point = true;
        }
    } else {
        cfg.rate.per_point = true;
    }

    if (j.contains("mc")) {
        const json& m = j.at("mc");
        if (m.contains("samples")) {
            cfg.mc.samples = get_unsigned(m.at("samples"), "mc.samples");
            if (cfg.mc.samples < 1) throw ConfigError("mc.samples", "must be at least 1");
        }
        if (m.contains("seed")) cfg.mc.seed = get_unsigned(m.at("seed"), "mc.seed");
        if (m.contains("joint_cap")) cfg.mc.joint_cap = get_unsigned(m.at("joint_cap"), "mc.joint_cap");
        if (m.contains("block_size")) {
            cfg.mc.block_size = get_unsigned(m.at("block_size"), "mc.block_size");
            if (cfg.mc.block_size < 1) throw ConfigError("mc.block_size", "must be at least 1");
        }
        if (m.contains("estimator")) {
            const std::string e = get_string(m.at("estimator"), "mc.estimator");
            if (e == "crude") cfg.estimator = Estimator::Crude;
            else if (e == "mean_shift") cfg.estimator = Estimator::MeanShift;
            else throw ConfigError("mc.estimator", "expected \"crude\" or \"mean_shift\", got \"" + e + "\"");
        }
    }

    if (j.contains("regvar")) {
        const json& r = j.at("regvar");
        const std::string f = "regvar";
        RegVarSpec spec;
        spec.alpha = parse_vector(require(r, "alpha", f), f + ".alpha");
        const int n = static_cast<int>(spec.alpha.size());
        spec.kappa = r.contains("kappa") ? static_cast<int>(get_integer(r.at("kappa"), f + ".kappa")) : 1;
        spec.c = r.contains("c") ? parse_vector(r.at("c"), f + ".c") : Vector::Ones(spec.kappa);
        spec.S = r.contains("S") ? parse_matrix(r.at("S"), f + ".S") : Matrix::Identity(n, n);
        spec.q = r.contains("q") ? parse_vector(r.at("q"), f + ".q") : cfg.q;
        with_field(f, [&] { spec.validate(); return 0; });
        cfg.regvar = std::move(spec);
        if (r.contains("t_lo")) cfg.t_search.lo = get_number(r.at("t_lo"), f + ".t_lo");
        if (r.contains("t_hi")) cfg.t_search.hi = get_number(r.at("t_hi"), f + ".t_hi");
        if (r.contains("t_points")) cfg.t_search.points = static_cast<int>(get_integer(r.at("t_points"), f + ".t_points"));
        if (!(cfg.t_search.lo > 0.0 && cfg.t_search.hi > cfg.t_search.lo)) {
            throw ConfigError(f + ".t_lo", "search bracket needs 0 < t_lo < t_hi");
        }
        if (cfg.t_search.points < 3) throw ConfigError(f + ".t_points", "must be at least 3");
    }

    if (j.contains("saddle")) {
        const json& s = j.at("saddle");
        SaddleConfig sc;
        sc.A = with_field("saddle.A", [&] { return SymMatrix(parse_matrix(require(s, "A", "saddle"), "saddle.A")); });
        sc.q = parse_vector(require(s, "q", "saddle"), "saddle.q");
        if (sc.q.size() != sc.A.dim()) throw ConfigError("saddle.q", "length must match saddle.A");
        if ((sc.q.array() <= 0.0).any()) throw ConfigError("saddle.q", "entries must be strictly positive");
        if (s.contains("trials")) sc.trials = static_cast<int>(get_integer(s.at("trials"), "saddle.trials"));
        if (sc.trials < 0) throw ConfigError("saddle.trials", "must be nonnegative");
        if (s.contains("seed")) sc.seed = get_unsigned(s.at("seed"), "saddle.seed");
        cfg.saddle = std::move(sc);
    }
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
    }
    return load_config(j);
}

void validate_for_rate(const RunConfig& cfg, bool need_u_list) {
    if (!cfg.model) throw ConfigError("model", "missing required section");
    if (!cfg.grid) throw ConfigError("grid", "missing required section");
    if (cfg.q.size() == 0) throw ConfigError("q", "missing required field");

    const double u0 = threshold_u0(*cfg.drift, cfg.q, *cfg.grid);
    auto check = [&](double u, const std::string& field) {
        if (!(u > u0)) {
            std::ostringstream os;
            os << "u = " << u << " must exceed the drift threshold u0 = " << u0;
            throw ConfigError(field, os.str());
        }
    };
    if (need_u_list) {
        if (!cfg.raw.contains("u_list")) throw ConfigError("u_list", "missing required field");
        for (std::size_t k = 0; k < cfg.u_list.size(); ++k) {
            check(cfg.u_list[k], "u_list[" + std::to_string(k) + "]");
        }
    } else {
        if (!cfg.u) throw ConfigError("u", "missing required field");
        check(*cfg.u, "u");
    }
}

}  // namespace mdx
