#include "fbmlt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fbmlt/version.hpp"

namespace fbmlt {

JsonValue JsonValue::boolean(bool b) {
    JsonValue v;
    v.kind_ = Kind::boolean;
    v.bool_ = b;
    return v;
}

JsonValue JsonValue::integer(std::int64_t i) {
    JsonValue v;
    v.kind_ = Kind::integer;
    v.int_ = i;
    return v;
}

JsonValue JsonValue::unsigned_integer(std::uint64_t u) {
    JsonValue v;
    v.kind_ = Kind::unsigned_integer;
    v.uint_ = u;
    return v;
}

JsonValue JsonValue::number(double d) {
    JsonValue v;
    v.kind_ = Kind::number;
    v.num_ = d;
    return v;
}

JsonValue JsonValue::string(std::string s) {
    JsonValue v;
    v.kind_ = Kind::string;
    v.str_ = std::move(s);
    return v;
}

JsonValue JsonValue::array() {
    JsonValue v;
    v.kind_ = Kind::array;
    return v;
}

JsonValue JsonValue::object() {
    JsonValue v;
    v.kind_ = Kind::object;
    return v;
}

JsonValue& JsonValue::operator[](const std::string& key) {
    if (kind_ == Kind::null) kind_ = Kind::object;
    if (kind_ != Kind::object) throw std::logic_error("json: [] on a non-object");
    for (auto& [k, v] : members_) {
        if (k == key) return v;
    }
    members_.emplace_back(key, JsonValue());
    return members_.back().second;
}

void JsonValue::push_back(JsonValue v) {
    if (kind_ == Kind::null) kind_ = Kind::array;
    if (kind_ != Kind::array) throw std::logic_error("json: push_back on a non-array");
    items_.push_back(std::move(v));
}

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        // JSON has no inf/nan literals; report them as strings upstream
        throw std::domain_error("json: non-finite number cannot be serialized");
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void newline_indent(std::string& out, int indent, int depth) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth), ' ');
}

} // namespace

void JsonValue::write(std::string& out, int indent, int depth) const {
    switch (kind_) {
        case Kind::null: out += "null"; return;
        case Kind::boolean: out += bool_ ? "true" : "false"; return;
        case Kind::integer: out += std::to_string(int_); return;
        case Kind::unsigned_integer: out += std::to_string(uint_); return;
        case Kind::number: out += format_double(num_); return;
        case Kind::string: write_escaped(out, str_); return;
        case Kind::array: {
            if (items_.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            for (std::size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ',';
                newline_indent(out, indent, depth + 1);
                items_[i].write(out, indent, depth + 1);
            }
            newline_indent(out, indent, depth);
            out += ']';
            return;
        }
        case Kind::object: {
            if (members_.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            for (std::size_t i = 0; i < members_.size(); ++i) {
                if (i) out += ',';
                newline_indent(out, indent, depth + 1);
                write_escaped(out, members_[i].first);
                out += indent < 0 ? ":" : ": ";
                members_[i].second.write(out, indent, depth + 1);
            }
            newline_indent(out, indent, depth);
            out += '}';
            return;
        }
    }
}

std::string JsonValue::dump(int indent) const {
    std::string out;
    write(out, indent, 0);
    if (indent >= 0) out += '\n';
    return out;
}

bool ExperimentReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckRecord& c) { return c.pass; });
}

JsonValue ExperimentReport::to_json() const {
    JsonValue root = JsonValue::object();
    root["schema_version"] = JsonValue::integer(schema_version);
    root["tool_version"] = JsonValue::string(version_string);
    root["command"] = JsonValue::string(command);
    root["config"] = config;
    JsonValue ledger = JsonValue::object();
    ledger["master_seed"] = JsonValue::unsigned_integer(master_seed);
    ledger["derivation"] =
        JsonValue::string("seed_r = splitmix64_mix(master_seed + 0x9e3779b97f4a7c15 * (r + 1))");
    root["seed_ledger"] = std::move(ledger);
    JsonValue check_array = JsonValue::array();
    for (const auto& c : checks) {
        JsonValue row = JsonValue::object();
        row["name"] = JsonValue::string(c.name);
        row["params"] = JsonValue::string(c.params);
        row["statistic"] = JsonValue::number(c.statistic);
        row["threshold"] = JsonValue::number(c.threshold);
        row["pass"] = JsonValue::boolean(c.pass);
        if (!c.witness.empty()) row["witness"] = JsonValue::string(c.witness);
        check_array.push_back(std::move(row));
    }
    root["checks"] = std::move(check_array);
    JsonValue artifact_array = JsonValue::array();
    for (const auto& a : artifacts) artifact_array.push_back(JsonValue::string(a));
    root["artifacts"] = std::move(artifact_array);
    root["wall_ms"] = JsonValue::integer(wall_ms);
    return root;
}

void write_convergence_csv(const ConvergenceCurve& curve, std::ostream& out) {
    out << "h,distance,ci_lo,ci_hi\n";
    for (std::size_t i = 0; i < curve.h_values.size(); ++i) {
        out << format_double(curve.h_values[i]) << ',' << format_double(curve.distances[i])
            << ',' << format_double(curve.distances[i] - curve.ci_halfwidths[i]) << ','
            << format_double(curve.distances[i] + curve.ci_halfwidths[i]) << '\n';
    }
}

void write_scaling_csv(const MomentScaling& scaling, std::ostream& out) {
    out << "lag,log_moment\n";
    for (std::size_t i = 0; i < scaling.lags.size(); ++i) {
        out << format_double(scaling.lags[i]) << ',' << format_double(scaling.log_moments[i])
            << '\n';
    }
}

void write_field_csv(const LocalTimeField& field, std::ostream& out) {
    out << "x,t,value\n";
    for (std::size_t ix = 0; ix < field.x_grid.size(); ++ix) {
        for (std::size_t it = 0; it < field.t_grid.size(); ++it) {
            out << format_double(field.x_grid[ix]) << ',' << format_double(field.t_grid[it])
                << ',' << format_double(field.at(ix, it)) << '\n';
        }
    }
}

namespace {

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

constexpr const char* kSeriesColors[6] = {"#1f77b4", "#d62728", "#2ca02c",
                                          "#9467bd", "#ff7f0e", "#17becf"};

} // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series) {
    constexpr double width = 640, height = 440;
    constexpr double ml = 70, mr = 20, mt = 40, mb = 50; // margins
    const double pw = width - ml - mr, ph = height - mt - mb;

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        for (double v : s.x) {
            x_min = std::min(x_min, v);
            x_max = std::max(x_max, v);
        }
        for (double v : s.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (!(x_min <= x_max) || !(y_min <= y_max)) {
        x_min = y_min = 0.0;
        x_max = y_max = 1.0;
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const auto sx = [&](double v) { return ml + pw * (v - x_min) / (x_max - x_min); };
    const auto sy = [&](double v) { return mt + ph * (1.0 - (v - y_min) / (y_max - y_min)); };

    std::string svg;
    char buf[256];
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" "
           "viewBox=\"0 0 640 440\">\n";
    svg += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                  "font-size=\"15\">",
                  ml + pw / 2);
    svg += buf;
    svg += title + "</text>\n";

    // axes
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ml, mt + ph, ml + pw, mt + ph);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ml, mt, ml, mt + ph);
    svg += buf;

    // five ticks per axis
    for (int i = 0; i <= 4; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 4.0;
        const double fy = y_min + (y_max - y_min) * i / 4.0;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                      sx(fx), mt + ph, sx(fx), mt + ph + 5);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                      sx(fx), mt + ph + 18, tick_label(fx).c_str());
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                      ml - 5, sy(fy), ml, sy(fy));
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
                      "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                      ml - 8, sy(fy) + 4, tick_label(fy).c_str());
        svg += buf;
    }

    // axis labels
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"13\">",
                  ml + pw / 2, height - 10);
    svg += buf;
    svg += x_label + "</text>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"18\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                  "font-size=\"13\" transform=\"rotate(-90 18 %.1f)\">",
                  mt + ph / 2, mt + ph / 2);
    svg += buf;
    svg += y_label + "</text>\n";

    // series polylines + point markers + legend
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kSeriesColors[k % 6];
        std::string points;
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(series[k].x[i]), sy(series[k].y[i]));
            points += buf;
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            std::snprintf(buf, sizeof(buf),
                          "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n",
                          sx(series[k].x[i]), sy(series[k].y[i]), color);
            svg += buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" fill=\"%s\"/>\n",
                      ml + pw - 150.0, mt + 8.0 + 16.0 * static_cast<double>(k), color);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\">",
                      ml + pw - 136.0, mt + 17.0 + 16.0 * static_cast<double>(k));
        svg += buf;
        svg += series[k].label + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace fbmlt
