#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "horseshoe/errors.hpp"
#include "horseshoe/maps.hpp"
#include "horseshoe/symbolic.hpp"

namespace horseshoe {

using Json = nlohmann::ordered_json;

/** \brief %.17g formatting (non-finite values become "nan"/"inf"/"-inf"). */
inline std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {
inline void write_json(std::ostream& os, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << inner << Json(it.key()).dump() << ": ";
                write_json(os, it.value(), indent + 1);
            }
            os << '\n' << pad << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << inner;
                write_json(os, j[i], indent + 1);
            }
            os << '\n' << pad << ']';
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            if (std::isfinite(x))
                os << format17(x);
            else
                os << Json(format17(x)).dump();  // JSON has no inf/nan literals
            return;
        }
        default: os << j.dump(); return;
    }
}
}  // namespace detail

/** \brief Serialises with two-space indentation and every float at 17 significant digits. */
inline std::string dump_json(const Json& j) {
    std::ostringstream os;
    detail::write_json(os, j, 0);
    os << '\n';
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write output file '" + path + "'");
    out << content;
    if (!out) throw config_error("failed writing output file '" + path + "'");
}

/** \brief Minimal CSV builder: header fixed at construction, doubles at 17 digits. */
class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) : columns_(header.size()) { row_strings(header); }

    template <class... T>
    void row(const T&... cells) {
        static_assert(sizeof...(T) > 0);
        std::vector<std::string> v{cell(cells)...};
        if (v.size() != columns_) throw domain_error("CSV row width does not match the header");
        row_strings(v);
    }

    std::string str() const { return os_.str(); }

private:
    static std::string cell(double x) { return format17(x); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(bool b) { return b ? "true" : "false"; }
    template <class I>
    static std::string cell(I i) requires std::is_integral_v<I> {
        return std::to_string(i);
    }
    static std::string cell(const BigInt& b) { return b.str(); }

    void row_strings(const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os_ << (i ? "," : "") << v[i];
        os_ << '\n';
    }

    std::size_t columns_;
    std::ostringstream os_;
};

/** \brief %.9g formatting for SVG coordinates. */
inline std::string format9(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

/**
 * \brief SVG of the depth-n cylinder footprints: P0 (left panel, holding R1 and R2) and P1 (right panel, R3).
 * Each panel is the unit square drawn at `scale` pixels; y grows upwards.
 */
inline std::string render_svg(int n, const Parameters& p, double scale = 400.0) {
    check_depth(n, 8);
    const double margin = 20.0, gap = 40.0;
    const double W = 2.0 * scale + gap + 2.0 * margin, H = scale + 2.0 * margin;
    auto px = [&](Plane pl, double x) { return margin + (pl == Plane::P1 ? scale + gap : 0.0) + x * scale; };
    auto py = [&](double y) { return margin + (1.0 - y) * scale; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format9(W) << "\" height=\"" << format9(H)
       << "\" viewBox=\"0 0 " << format9(W) << ' ' << format9(H) << "\">\n";
    os << "<title>generation " << n << "</title>\n";
    for (Plane pl : {Plane::P0, Plane::P1})
        os << "<rect class=\"plane\" x=\"" << format9(px(pl, 0.0)) << "\" y=\"" << format9(py(1.0)) << "\" width=\""
           << format9(scale) << "\" height=\"" << format9(scale) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    const auto words = enumerate_words(n);
    for (const Word& w : words) {
        const Box b = cylinder_footprint(w, p);
        const Plane pl = plane_of(w.front());
        os << "<rect class=\"cylinder\" data-word=\"" << to_string(w) << "\" x=\"" << format9(px(pl, b.x0))
           << "\" y=\"" << format9(py(b.y1)) << "\" width=\"" << format9(b.width() * scale) << "\" height=\""
           << format9(b.height() * scale) << "\" fill=\"#3366cc\" fill-opacity=\"0.35\" stroke=\"#113\" stroke-width=\"0.5\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace horseshoe
