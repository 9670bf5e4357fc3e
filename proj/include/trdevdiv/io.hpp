#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trdevdiv/field.hpp"

namespace trdevdiv {

// FNV-1a 64-bit digest; stamps every output header so identical configs are
// recognizable byte-for-byte.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

// Fully resolved run configuration.  The canonical string (sorted key=value
// lines) feeds the config digest.
struct RunConfig {
    std::string experiment;
    int dim = 2;
    std::vector<int> resolutions;
    std::vector<double> s_values;
    std::string subspace = "trace-mean-zero";
    double near_id_t = 0.0;
    std::vector<double> lambdas;
    double mu = 0.25;
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    double tol = 1e-10;
    std::string field_file;   // optional input field (norms)
    std::string basis_file;   // optional custom-basis input (ctdd)

    std::string canonical_string() const;
    std::uint64_t digest() const;
};

// Reads `key = value` lines (# comments, blank lines ignored) into a map;
// unknown keys throw ConfigError.  Lists are comma-separated.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
void apply_config_file(RunConfig& config, const std::map<std::string, std::string>& kv);

// CSV with a deterministic header block:
//   # trdevdiv <version> config=<hex digest> seed=<seed>
//   col1,col2,...
// Values are formatted with %.12g, so identical runs are byte-identical.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const RunConfig& config,
              const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row_numeric(const std::vector<double>& cells);
    void close();

    static std::string format(double v);

  private:
    std::string buffer_;
    std::filesystem::path path_;
    size_t ncols_ = 0;
    bool closed_ = false;
};

// Minimal self-contained SVG line plot: one polyline per series over a
// common x axis, log-x optional.  No external resources.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_curves(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series, bool log_x = false);

// Scalar/tensor field import/export as JSON with grid metadata and row-major
// values.  Layout is recorded by name ("full", "interior", "node").
void write_scalar_field(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_scalar_field(const std::filesystem::path& path);
void write_tensor_field(const std::filesystem::path& path, const TensorField& tau);
std::vector<TensorField> read_tensor_basis(const std::filesystem::path& path);

}  // namespace trdevdiv
