#include "trdevdiv/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trdevdiv/version.hpp"

namespace trdevdiv {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

template <typename T>
std::string join_list(const std::vector<T>& vals) {
    std::string out;
    for (size_t i = 0; i < vals.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, double>)
            out += fmt_double(vals[i]);
        else
            out += std::to_string(vals[i]);
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse '" + s + "' as a number for key " + key);
    }
}

long parse_long(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse '" + s + "' as an integer for key " + key);
    }
}

void ensure_parent_dir(const std::filesystem::path& path) {
    const std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("cannot write output file " + path.string());
}

Layout layout_from_name(const std::string& name, int dim) {
    if (name == "full") return full_layout(dim);
    if (name == "interior") return interior_layout(dim);
    if (name == "node") return node_layout(dim);
    throw ConfigError("field file: unknown layout '" + name + "'");
}

json field_to_json(const ScalarField& f) {
    json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["grid"] = {{"dim", f.grid.dim}, {"resolution", f.grid.resolution}};
    j["layout"] = layout_name(f.layout);
    j["values"] = f.values;
    return j;
}

ScalarField field_from_json(const json& j, const std::string& where) {
    if (!j.contains("grid") || !j.contains("layout") || !j.contains("values"))
        throw ConfigError(where + ": missing grid, layout or values");
    const int dim = j["grid"].value("dim", 0);
    const int resolution = j["grid"].value("resolution", 0);
    GridSpec grid = build_grid(dim, resolution);
    ScalarField f(grid, layout_from_name(j["layout"].get<std::string>(), dim));
    const auto& vals = j["values"];
    if (!vals.is_array() || static_cast<long>(vals.size()) != f.size())
        throw ConfigError(where + ": value count does not match the layout");
    for (size_t i = 0; i < vals.size(); ++i) f.values[i] = vals[i].get<double>();
    return f;
}

json parse_json_file(const std::filesystem::path& path, const std::string& where) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(where + ": cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(where + ": malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string RunConfig::canonical_string() const {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"basis_file", basis_file},
        {"dim", std::to_string(dim)},
        {"experiment", experiment},
        {"field_file", field_file},
        {"lambdas", join_list(lambdas)},
        {"mu", fmt_double(mu)},
        {"near_id_t", fmt_double(near_id_t)},
        {"out_dir", out_dir},
        {"resolutions", join_list(resolutions)},
        {"s_values", join_list(s_values)},
        {"seed", std::to_string(seed)},
        {"subspace", subspace},
        {"tol", fmt_double(tol)},
    };
    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += "=";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t RunConfig::digest() const { return fnv1a64(canonical_string()); }

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " of " + path.string() +
                              " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: empty key on line " + std::to_string(lineno) + " of " +
                              path.string());
        kv[key] = value;
    }
    return kv;
}

void apply_config_file(RunConfig& config, const std::map<std::string, std::string>& kv) {
    for (const auto& [raw_key, value] : kv) {
        std::string key = raw_key;
        if (key == "resolution") key = "resolutions";
        if (key == "s") key = "s_values";
        if (key == "lambda") key = "lambdas";
        if (key == "out") key = "out_dir";

        if (key == "experiment") {
            config.experiment = value;
        } else if (key == "dim") {
            config.dim = static_cast<int>(parse_long(value, key));
        } else if (key == "resolutions") {
            config.resolutions.clear();
            for (const auto& item : split_commas(value))
                config.resolutions.push_back(static_cast<int>(parse_long(item, key)));
        } else if (key == "s_values") {
            config.s_values.clear();
            for (const auto& item : split_commas(value))
                config.s_values.push_back(parse_double(item, key));
        } else if (key == "subspace") {
            config.subspace = value;
        } else if (key == "near_id_t") {
            config.near_id_t = parse_double(value, key);
        } else if (key == "lambdas") {
            config.lambdas.clear();
            for (const auto& item : split_commas(value))
                config.lambdas.push_back(parse_double(item, key));
        } else if (key == "mu") {
            config.mu = parse_double(value, key);
        } else if (key == "out_dir") {
            config.out_dir = value;
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(parse_long(value, key));
        } else if (key == "tol") {
            config.tol = parse_double(value, key);
        } else if (key == "field_file") {
            config.field_file = value;
        } else if (key == "basis_file") {
            config.basis_file = value;
        } else {
            throw ConfigError("config: unknown key '" + raw_key + "'");
        }
    }
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const RunConfig& config,
                     const std::vector<std::string>& columns)
    : path_(path), ncols_(columns.size()) {
    buffer_ = "# ";
    buffer_ += kToolName;
    buffer_ += " ";
    buffer_ += kVersion;
    buffer_ += " config=";
    buffer_ += hex64(config.digest());
    buffer_ += " seed=";
    buffer_ += std::to_string(config.seed);
    buffer_ += "\n";
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ",";
        buffer_ += columns[i];
    }
    buffer_ += "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (closed_) throw ConfigError("csv: writer already closed");
    if (cells.size() != ncols_) throw ConfigError("csv: cell count does not match the header");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ",";
        buffer_ += cells[i];
    }
    buffer_ += "\n";
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
    std::vector<std::string> out;
    out.reserve(cells.size());
    for (double v : cells) out.push_back(format(v));
    row(out);
}

void CsvWriter::close() {
    if (closed_) return;
    write_text_file(path_, buffer_);
    closed_ = true;
}

std::string CsvWriter::format(double v) { return fmt_double(v); }

void write_svg_curves(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series, bool log_x) {
    const int W = 640, H = 420;
    const int ml = 64, mr = 16, mt = 32, mb = 44;
    const double pw = W - ml - mr, ph = H - mt - mb;

    auto xval = [&](double x) { return log_x ? std::log10(std::max(x, 1e-300)) : x; };

    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double xv = xval(s.x[i]);
            const double yv = s.y[i];
            if (first) {
                xmin = xmax = xv;
                ymin = ymax = yv;
                first = false;
            } else {
                xmin = std::min(xmin, xv);
                xmax = std::max(xmax, xv);
                ymin = std::min(ymin, yv);
                ymax = std::max(ymax, yv);
            }
        }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }

    auto px = [&](double x) { return ml + (xval(x) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };
    auto f2 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
           "viewBox=\"0 0 640 420\">\n";
    svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"14\">" + title + "</text>\n";
    svg += "<rect x=\"" + f2(ml) + "\" y=\"" + f2(mt) + "\" width=\"" + f2(pw) + "\" height=\"" +
           f2(ph) + "\" fill=\"none\" stroke=\"#444444\"/>\n";
    svg += "<text x=\"320\" y=\"410\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"12\">" + x_label + "</text>\n";
    svg += "<text x=\"14\" y=\"226\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"12\" transform=\"rotate(-90 14 226)\">" + y_label + "</text>\n";
    svg += "<text x=\"" + f2(ml) + "\" y=\"" + f2(H - mb + 16) +
           "\" font-family=\"monospace\" font-size=\"10\">" +
           (log_x ? "log10 x: " : "x: ") + f2(xmin) + " .. " + f2(xmax) + "</text>\n";
    svg += "<text x=\"" + f2(ml) + "\" y=\"" + f2(mt - 6) +
           "\" font-family=\"monospace\" font-size=\"10\">y: " + f2(ymin) + " .. " + f2(ymax) +
           "</text>\n";

    int ci = 0;
    for (const auto& s : series) {
        const std::string color = colors[ci % 8];
        std::string pts;
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (i) pts += " ";
            pts += f2(px(s.x[i])) + "," + f2(py(s.y[i]));
        }
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + f2(W - mr - 150) + "\" y=\"" + f2(mt + 16 + 14 * ci) +
               "\" font-family=\"monospace\" font-size=\"11\" fill=\"" + color + "\">" + s.label +
               "</text>\n";
        ++ci;
    }
    svg += "</svg>\n";
    write_text_file(path, svg);
}

void write_scalar_field(const std::filesystem::path& path, const ScalarField& f) {
    write_text_file(path, field_to_json(f).dump(2) + "\n");
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
    return field_from_json(parse_json_file(path, "scalar field"), "scalar field");
}

void write_tensor_field(const std::filesystem::path& path, const TensorField& tau) {
    json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["n"] = tau.n;
    j["entries"] = json::array();
    for (const auto& e : tau.entries) j["entries"].push_back(field_to_json(e));
    write_text_file(path, j.dump(2) + "\n");
}

std::vector<TensorField> read_tensor_basis(const std::filesystem::path& path) {
    const json j = parse_json_file(path, "tensor basis");
    if (!j.contains("basis") || !j["basis"].is_array())
        throw ConfigError("tensor basis: missing 'basis' array in " + path.string());
    std::vector<TensorField> out;
    for (const auto& jt : j["basis"]) {
        const int n = jt.value("n", 0);
        if (!jt.contains("entries") || !jt["entries"].is_array() ||
            static_cast<int>(jt["entries"].size()) != n * n)
            throw ConfigError("tensor basis: each tensor needs n and n*n entries");
        TensorField tau;
        tau.n = n;
        for (const auto& je : jt["entries"])
            tau.entries.push_back(field_from_json(je, "tensor basis"));
        out.push_back(std::move(tau));
    }
    if (out.empty()) throw ConfigError("tensor basis: empty basis in " + path.string());
    return out;
}

}  // namespace trdevdiv
