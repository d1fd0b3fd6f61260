#pragma once

// JSON and CSV formats used by the command-line tool.
//
// Matrices are {"nrows", "ncols", "re", "im"} with row-major nested arrays;
// "im" may be omitted for real data. An isometry file is
// {"site_dims": [...], "matrix": <matrix>}, a cq-state file is a list of
// {"p": prior, "matrix": <matrix>}.

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "infotheory.hpp"
#include "linalg.hpp"
#include "lmg.hpp"
#include "qecc.hpp"
#include "qstate.hpp"
#include "scramble.hpp"

namespace scramblemeter {

/// Malformed input file or document.
class ParseError : public Error {
public:
    using Error::Error;
};

using Json = nlohmann::json;

namespace detail {

using RMatrixRows = std::vector<std::vector<double>>;

template <class T>
T json_field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("field '") + key + "': " + e.what());
    }
}

inline RMatrixRows rows_of(const Json& j, const char* key, Index nrows, Index ncols) {
    const auto rows = json_field<RMatrixRows>(j, key);
    if (static_cast<Index>(rows.size()) != nrows) throw ParseError(std::string("'") + key + "' has the wrong row count");
    for (const auto& r : rows) {
        if (static_cast<Index>(r.size()) != ncols) throw ParseError(std::string("'") + key + "' has a ragged row");
    }
    return rows;
}

}  // namespace detail

inline Json matrix_to_json(const CMatrix& m) {
    Json re = Json::array(), im = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json rr = Json::array(), ri = Json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ri.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return {{"nrows", m.rows()}, {"ncols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline CMatrix matrix_from_json(const Json& j) {
    const auto nrows = detail::json_field<Index>(j, "nrows");
    const auto ncols = detail::json_field<Index>(j, "ncols");
    if (nrows < 1 || ncols < 1) throw ParseError("matrix dimensions must be positive");
    const auto re = detail::rows_of(j, "re", nrows, ncols);
    std::optional<detail::RMatrixRows> im;
    if (j.contains("im")) im = detail::rows_of(j, "im", nrows, ncols);
    CMatrix m(nrows, ncols);
    for (Index r = 0; r < nrows; ++r) {
        for (Index c = 0; c < ncols; ++c) {
            const auto ur = static_cast<std::size_t>(r), uc = static_cast<std::size_t>(c);
            m(r, c) = Complex(re[ur][uc], im ? (*im)[ur][uc] : 0.0);
        }
    }
    if (!all_finite(m)) throw ParseError("matrix has non-finite entries");
    return m;
}

inline Json isometry_to_json(const Isometry& v) {
    return {{"site_dims", v.layout().dims()}, {"matrix", matrix_to_json(v.matrix())}};
}

inline Isometry isometry_from_json(const Json& j) {
    const auto dims = detail::json_field<std::vector<Index>>(j, "site_dims");
    if (!j.contains("matrix")) throw ParseError("missing field 'matrix'");
    return validate_isometry(matrix_from_json(j.at("matrix")), SiteLayout(dims), 1e-8);
}

inline Json cq_state_to_json(const CqState& cq) {
    Json out = Json::array();
    const Ensemble& e = cq.ensemble();
    for (std::size_t x = 0; x < e.size(); ++x) {
        out.push_back({{"p", e.priors()[x]}, {"matrix", matrix_to_json(e.states()[x].matrix())}});
    }
    return out;
}

inline CqState cq_state_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("cq state must be a non-empty list of {p, matrix}");
    std::vector<double> priors;
    std::vector<DensityMatrix> states;
    for (const auto& item : j) {
        priors.push_back(detail::json_field<double>(item, "p"));
        if (!item.contains("matrix")) throw ParseError("missing field 'matrix'");
        states.emplace_back(matrix_from_json(item.at("matrix")), 1e-8);
    }
    return CqState(std::move(priors), std::move(states));
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
}

inline Json povm_to_json(const Povm& povm) {
    Json out = Json::array();
    for (const auto& e : povm.effects()) out.push_back(matrix_to_json(e));
    return out;
}

inline Json imin_report_to_json(const IminResult& r) {
    Json per_x = Json::object();
    for (const auto& [x, v] : r.per_x_values) per_x[std::to_string(x)] = v;
    return {{"imin_bits", r.value_bits},
            {"best_subsystem", r.best_subsystem.sites()},
            {"best_num_effects", r.best_num_effects},
            {"per_x_values", std::move(per_x)},
            {"restarts", r.restarts},
            {"restarts_agreeing", r.restarts_agreeing},
            {"fragile", r.fragile()},
            {"iterations", r.iterations},
            {"best_povm", povm_to_json(r.best_povm)}};
}

inline Json t_scrambler_report_to_json(const TScramblerReport& r) {
    Json subsets = Json::array();
    for (const auto& s : r.subsets) {
        subsets.push_back({{"sites", s.subsystem.sites()}, {"max_deviation", s.max_deviation}});
    }
    Json per_k = Json::object();
    for (const auto& [k, v] : r.imin_bits_per_k) per_k[std::to_string(k)] = v;
    return {{"code", r.code},
            {"t", r.t},
            {"certified", r.certified},
            {"subsets", std::move(subsets)},
            {"imin_bits_per_k", std::move(per_k)}};
}

/// Inverse of t_scrambler_report_to_json; needs the code to rebuild subsystems.
inline TScramblerReport t_scrambler_report_from_json(const Json& j) {
    TScramblerReport r;
    r.code = detail::json_field<std::string>(j, "code");
    r.t = detail::json_field<int>(j, "t");
    r.certified = detail::json_field<bool>(j, "certified");
    const SiteLayout layout = builtin_code(r.code).encoder.layout();
    if (!j.contains("subsets") || !j.at("subsets").is_array()) throw ParseError("missing field 'subsets'");
    for (const auto& s : j.at("subsets")) {
        r.subsets.push_back({SubsystemSpec(detail::json_field<std::vector<std::size_t>>(s, "sites"), layout),
                             detail::json_field<double>(s, "max_deviation")});
    }
    for (const auto& [k, v] : detail::json_field<std::map<std::string, double>>(j, "imin_bits_per_k")) {
        r.imin_bits_per_k[std::stol(k)] = v;
    }
    return r;
}

inline Json hmin_report_to_json(const ConditionalMinEntropy& h) {
    return {{"hmin_bits", h.bits},
            {"p_guess_upper", h.p_guess_upper},
            {"p_guess_lower", h.p_guess_lower},
            {"gap", h.gap},
            {"status", to_string(h.status)},
            {"iterations", h.iterations}};
}

/// Fixed six decimals; negative zero prints as zero.
inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s.erase(0, 1);
    return s;
}

inline constexpr const char* kSweepHeader = "N,h,t,imin_bits,best_num_effects,restarts_agreeing,iterations";
inline constexpr const char* kFitHeader = "h,slope,intercept,r_squared";
inline constexpr const char* kScrambleHeader = "N,h,eps,t_scramb";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << r.n << ',' << fixed6(r.h) << ',' << fixed6(r.t) << ',' << fixed6(r.value_bits) << ','
            << r.best_num_effects << ',' << r.restarts_agreeing << ',' << r.iterations << '\n';
    }
}

inline void write_scrambling_csv(std::ostream& out, const std::vector<ScramblingRow>& rows) {
    out << kScrambleHeader << '\n';
    for (const auto& r : rows) {
        out << r.n << ',' << fixed6(r.h) << ',' << fixed6(r.eps) << ',' << (r.t_scramb ? fixed6(*r.t_scramb) : "inf")
            << '\n';
    }
}

inline void write_fit_csv(std::ostream& out, const std::vector<FitRow>& rows) {
    out << kFitHeader << '\n';
    for (const auto& r : rows) {
        out << fixed6(r.h) << ',';
        if (r.fit) {
            out << fixed6(r.fit->slope) << ',' << fixed6(r.fit->intercept) << ',' << fixed6(r.fit->r_squared) << '\n';
        } else {
            out << "nan,nan,nan\n";
        }
    }
}

}  // namespace scramblemeter
