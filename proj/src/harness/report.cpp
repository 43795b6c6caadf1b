#include "modlab/harness/report.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace modlab::harness {

namespace fs = std::filesystem;

namespace {

std::string number(double x) { return fmt::format("{:.17g}", x); }

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

double parse_number(const std::string& s)
{
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::runtime_error(fmt::format("malformed number '{}'", s));
    return v;
}

void write_file(const fs::path& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary);
    out << bytes;
    out.close();
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string file_stem(const std::string& label)
{
    std::string s = label;
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return s;
}

}  // namespace

std::string csv_text(const Table& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + number(row[i]);
        out += '\n';
    }
    return out;
}

Table parse_csv_table(const std::string& text)
{
    const auto lines = lines_of(text);
    if (lines.empty()) throw std::runtime_error("empty CSV");
    Table t;
    t.columns = split_csv_line(lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<double> row;
        for (const auto& f : split_csv_line(lines[i])) row.push_back(parse_number(f));
        t.add(std::move(row));
    }
    return t;
}

std::string checks_csv_text(const std::vector<Check>& checks)
{
    std::string out = "group,name,value,threshold,pass\n";
    for (const auto& c : checks)
        out += fmt::format("{},{},{},{},{}\n", quoted(c.group), quoted(c.name), number(c.value), number(c.threshold),
                           c.pass ? 1 : 0);
    return out;
}

std::vector<Check> parse_checks_csv(const std::string& text)
{
    const auto lines = lines_of(text);
    std::vector<Check> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 5) throw std::runtime_error(fmt::format("checks CSV line {} has {} fields", i + 1, f.size()));
        out.push_back({f[0], f[1], parse_number(f[2]), parse_number(f[3]), f[4] == "1"});
    }
    return out;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

std::string loglog_svg(const std::string& title, const RateFit& fit)
{
    constexpr double width = 560, height = 400, left = 70, right = 170, top = 40, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    auto [emin, emax] = std::minmax_element(fit.eps.begin(), fit.eps.end());
    auto [vmin, vmax] = std::minmax_element(fit.values.begin(), fit.values.end());
    const double x0 = std::floor(std::log10(*emin)), x1 = std::ceil(std::log10(*emax));
    const double y0 = std::floor(std::log10(*vmin)) - 0.5, y1 = std::ceil(std::log10(*vmax)) + 0.5;
    auto px = [&](double e) { return left + (std::log10(e) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + (y1 - std::log10(v)) / (y1 - y0) * ph; };
    auto line = [&](double e_a, double v_a, double e_b, double v_b, const char* style) {
        return fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" {}/>\n", px(e_a), py(v_a),
                           px(e_b), py(v_b), style);
    };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"24\" font-size=\"14\">{}</text>\n"
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        width, height, left, title, left, top, pw, ph);
    for (double d = x0; d <= x1 + 1e-9; d += 1.0)
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">1e{}</text>\n", px(std::pow(10, d)),
                           top + ph + 18, static_cast<int>(d));
    for (double d = std::ceil(y0); d <= y1 + 1e-9; d += 1.0)
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n", left - 6,
                           py(std::pow(10, d)) + 4, static_cast<int>(d));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">eps</text>\n", left + pw / 2,
                       height - 10);

    // Reference slopes through the geometric centre of the data.
    double lx = 0.0, ly = 0.0;
    for (std::size_t i = 0; i < fit.eps.size(); ++i) {
        lx += std::log(fit.eps[i]);
        ly += std::log(fit.values[i]);
    }
    const double ce = std::exp(lx / fit.eps.size()), cv = std::exp(ly / fit.eps.size());
    auto through_centre = [&](double e, double slope) { return cv * std::pow(e / ce, slope); };
    svg += line(*emin, through_centre(*emin, 0.5), *emax, through_centre(*emax, 0.5),
                "stroke=\"#999\" stroke-dasharray=\"2,3\"");
    svg += line(*emin, through_centre(*emin, 1.0), *emax, through_centre(*emax, 1.0),
                "stroke=\"#999\" stroke-dasharray=\"8,4\"");
    auto fitted = [&](double e) { return std::exp(fit.intercept + fit.slope * std::log(e)); };
    svg += line(*emin, fitted(*emin), *emax, fitted(*emax), "stroke=\"#c03\" stroke-width=\"1.5\"");
    for (std::size_t i = 0; i < fit.eps.size(); ++i)
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#036\"/>\n", px(fit.eps[i]),
                           py(fit.values[i]));

    const double lx0 = left + pw + 12;
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"#c03\">fit slope {:.2f}</text>\n", lx0, top + 14,
                       fit.slope);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">R^2 {:.4f}</text>\n", lx0, top + 30, fit.r2);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"#777\">- - slope 1.0</text>\n", lx0, top + 50);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"#777\">. . slope 0.5</text>\n", lx0, top + 66);
    svg += "</svg>\n";
    return svg;
}

std::string summary_text(const SweepResult& result)
{
    std::string out = fmt::format("experiment: {}\nseed: {}\n", to_string(result.config.kind), result.config.seed);
    if (result.series.empty()) out += "no series\n";
    for (const auto& s : result.series) {
        out += fmt::format("\n[{}]\n", s.label);
        for (const auto& f : s.fits) {
            if (f.fit)
                out += fmt::format("fit {}: slope {:.6f} intercept {:.6f} R^2 {:.6f}\n", f.quantity, f.fit->slope,
                                   f.fit->intercept, f.fit->r2);
            else
                out += fmt::format("fit {}: insufficient points\n", f.quantity);
        }
        for (const auto& c : s.checks)
            if (!c.pass)
                out += fmt::format("check failed: {} / {}: {:.6g} vs {:.6g}\n", c.group, c.name, c.value, c.threshold);
        for (const auto& v : s.verdicts)
            out += fmt::format("{}: {} ({})\n", to_string(v.status), v.name, v.detail);
    }
    out += fmt::format("\noverall: {}\n", result.all_pass() ? "PASS" : "FAIL");
    return out;
}

std::vector<std::string> failing_verdicts(const SweepResult& result)
{
    std::vector<std::string> out;
    for (const auto& s : result.series)
        for (const auto& v : s.verdicts)
            if (v.status != Verdict::Status::pass)
                out.push_back(fmt::format("{}: {} ({}; {})", s.label, v.name, to_string(v.status), v.detail));
    return out;
}

void emit_report(const SweepResult& result, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));

    std::vector<std::pair<std::string, std::string>> files;  // name, bytes
    files.emplace_back("config.txt", echo_config(result.config));
    std::string series_list;
    for (const auto& s : result.series) {
        const auto stem = file_stem(s.label);
        series_list += fmt::format("series {} {}\n", s.label, s.family);
        if (!s.summary.columns.empty()) files.emplace_back(stem + "_summary.csv", csv_text(s.summary));
        if (!s.frames.columns.empty()) files.emplace_back(stem + "_frames.csv", csv_text(s.frames));
        if (!s.checks.empty()) files.emplace_back(stem + "_checks.csv", checks_csv_text(s.checks));
        for (const auto& f : s.fits)
            if (f.fit)
                files.emplace_back(fmt::format("{}_{}.svg", stem, f.quantity),
                                   loglog_svg(fmt::format("{}: {} vs eps", s.label, f.quantity), *f.fit));
    }
    files.emplace_back("summary.txt", summary_text(result));

    std::string manifest = fmt::format("experiment {}\nseed {}\ninput config.txt sha256 {}\n",
                                       to_string(result.config.kind), result.config.seed,
                                       sha256_hex(files.front().second));
    manifest += series_list;
    for (const auto& [name, bytes] : files) {
        write_file(dir / name, bytes);
        manifest += fmt::format("file {} {} bytes sha256 {}\n", name, bytes.size(), sha256_hex(bytes));
    }
    write_file(dir / "manifest.txt", manifest);
}

SweepResult load_report(const fs::path& dir)
{
    const auto parsed = parse_config_file(dir / "config.txt");
    if (!parsed.config) {
        std::string msg = fmt::format("invalid {}", (dir / "config.txt").string());
        for (const auto& e : parsed.errors) msg += "\n  " + format_error(e);
        throw std::runtime_error(msg);
    }
    SweepResult result{*parsed.config, {}};
    for (const auto& line : lines_of(read_file(dir / "manifest.txt"))) {
        std::istringstream in(line);
        std::string tag;
        in >> tag;
        if (tag != "series") continue;
        Series s;
        in >> s.label >> s.family;
        const auto stem = file_stem(s.label);
        if (fs::exists(dir / (stem + "_summary.csv")))
            s.summary = parse_csv_table(read_file(dir / (stem + "_summary.csv")));
        if (fs::exists(dir / (stem + "_frames.csv")))
            s.frames = parse_csv_table(read_file(dir / (stem + "_frames.csv")));
        if (fs::exists(dir / (stem + "_checks.csv")))
            s.checks = parse_checks_csv(read_file(dir / (stem + "_checks.csv")));
        evaluate(s);
        result.series.push_back(std::move(s));
    }
    return result;
}

}  // namespace modlab::harness
