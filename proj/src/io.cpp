#include "fiegarch/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string_view>

#include "fiegarch/errors.hpp"

namespace fiegarch {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_number(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::vector<double> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<double> x;
    std::string line;
    std::size_t lineno = 0;
    std::size_t column = 0;
    std::size_t width = 1;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        const auto where = [&] { return path.string() + ":" + std::to_string(lineno) + ": "; };
        double v = 0.0;
        if (first) {
            first = false;
            width = fields.size();
            if (!parse_number(fields[0], v)) {
                if (width > 1) {
                    const auto it = std::find(fields.begin(), fields.end(), std::string_view("x"));
                    if (it == fields.end()) throw IoError(where() + "no 'x' column in header");
                    column = static_cast<std::size_t>(it - fields.begin());
                }
                continue;
            }
            if (width > 1) throw IoError(where() + "expected a single column or a header naming 'x'");
        }
        if (fields.size() != width) throw IoError(where() + "expected " + std::to_string(width) + " fields");
        if (!parse_number(fields[column], v)) {
            throw IoError(where() + "not a number: '" + std::string(fields[column]) + "'");
        }
        x.push_back(v);
    }
    if (x.empty()) throw IoError(path.string() + ": no observations");
    return x;
}

void write_series_csv(const std::filesystem::path& path, const SimulatedSeries& series) {
    auto out = open_out(path);
    out << "t,x,sigma2\n";
    for (std::size_t t = 0; t < series.x.size(); ++t) {
        out << (t + 1) << ',' << format_double(series.x[t]) << ',' << format_double(series.sigma2[t]) << '\n';
    }
    close_out(out, path);
}

void write_chain_csv(const std::filesystem::path& path, const Chain& chain) {
    auto out = open_out(path);
    out << "iter";
    for (const auto& n : chain.names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < chain.size(); ++r) {
        out << chain.iterations[r];
        for (double v : chain.row(r)) out << ',' << format_double(v);
        out << '\n';
    }
    close_out(out, path);
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<PosteriorSummary>& rows) {
    auto out = open_out(path);
    out << "parameter,mean,sd,ci_lower,ci_upper,truth,bias,ape\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& s : rows) {
        out << s.name << ',' << format_double(s.mean) << ',' << format_double(s.sd) << ','
            << format_double(s.ci_lower) << ',' << format_double(s.ci_upper) << ',' << opt(s.truth) << ','
            << opt(s.bias) << ',' << opt(s.ape) << '\n';
    }
    close_out(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
    auto out = open_out(path);
    out << contents;
    close_out(out, path);
}

}  // namespace fiegarch
