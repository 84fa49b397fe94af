#pragma once

//! Deterministic experiment reports: an insertion-ordered JSON document model
//! with fixed 17-significant-digit number formatting, CSV table writers, and
//! direct-markup SVG line charts.  Emission is byte-stable for equal inputs.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fbmlt/convergence.hpp"

namespace fbmlt {

//! Minimal JSON document: objects keep insertion order, numbers render via
//! %.17g (doubles) or exactly (integers), so equal trees dump to equal bytes.
class JsonValue {
public:
    enum class Kind { null, boolean, integer, unsigned_integer, number, string, array, object };

    JsonValue() : kind_(Kind::null) {}
    static JsonValue boolean(bool b);
    static JsonValue integer(std::int64_t v);
    static JsonValue unsigned_integer(std::uint64_t v);
    static JsonValue number(double v);
    static JsonValue string(std::string s);
    static JsonValue array();
    static JsonValue object();

    Kind kind() const { return kind_; }

    //! Object access: inserts the key (in order) on first use.
    JsonValue& operator[](const std::string& key);
    //! Array append.
    void push_back(JsonValue v);

    //! Serialize; indent = 2 pretty-prints, indent < 0 emits compact form.
    std::string dump(int indent = 2) const;

private:
    void write(std::string& out, int indent, int depth) const;

    Kind kind_;
    bool bool_ = false;
    std::int64_t int_ = 0;
    std::uint64_t uint_ = 0;
    double num_ = 0.0;
    std::string str_;
    std::vector<JsonValue> items_;
    std::vector<std::pair<std::string, JsonValue>> members_;
};

//! Format a double exactly as the JSON writer does (17 significant digits).
std::string format_double(double v);

//! One verdict row of a report.
struct CheckRecord {
    std::string name;
    std::string params;    // human-readable parameter echo
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string witness;   // optional failure/diagnostic detail; empty = omitted
};

//! Stable report schema:
//! {schema_version, tool_version, command, config, seed_ledger, checks, artifacts, wall_ms}.
struct ExperimentReport {
    int schema_version = 1;
    std::string command;
    JsonValue config;        // echo of the parsed configuration
    std::uint64_t master_seed = 0;
    std::vector<CheckRecord> checks;
    std::vector<std::string> artifacts;
    std::int64_t wall_ms = 0; // 0 under fixed-timestamp mode

    bool all_pass() const;
    JsonValue to_json() const;
};

//! CSV "h,distance,ci_lo,ci_hi" rows of a convergence curve.
void write_convergence_csv(const ConvergenceCurve& curve, std::ostream& out);

//! CSV "lag,log_moment" rows of a moment-scaling table.
void write_scaling_csv(const MomentScaling& scaling, std::ostream& out);

//! CSV "x,t,value" dump of a local-time field (x-major, matching storage).
void write_field_csv(const LocalTimeField& field, std::ostream& out);

//! One plotted series: x/y pairs plus a legend label.
struct ChartSeries {
    std::string label;
    std::vector<double> x, y;
};

//! Self-contained SVG line chart (axes, ticks, legend); no external renderer.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series);

} // namespace fbmlt
