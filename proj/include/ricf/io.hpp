#pragma once

// Text formats.
//
// Graph files, one declaration per line, `#` starts a comment:
//
//   var Ex
//   var BP
//   Ex -> BP
//   BP <-> Y
//
// All `var` lines precede the edge lines. Data files are CSV with a header of
// variable names and one row per observation. Covariance files are CSV with a
// header of variable names followed by one row per variable in header order.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "ricf/ricf.hpp"

namespace ricf {

MixedGraph parse_graph(std::string_view text);
std::string write_graph(const MixedGraph& g);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Columns are matched to the graph by name; columns not in the graph are ignored.
DataMatrix<double> parse_data_csv(std::string_view text, const MixedGraph& g);
std::string write_data_csv(const DataMatrix<double>& y, const MixedGraph& g);

EmpiricalCovariance<double> parse_covariance_csv(std::string_view text, const MixedGraph& g, Index n);
std::string write_covariance_csv(const MatrixX<double>& s, const MixedGraph& g);

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double x);

/// Structural predicates of a graph; `ancestral` is null for cyclic graphs.
nlohmann::json graph_summary(const MixedGraph& g);

/// Structured fit report: graph summary, estimates keyed by edge / vertex
/// pair with asymptotic standard errors sqrt(diag(I⁻¹)/N), likelihood trace,
/// status and closed-form vertices.
nlohmann::json fit_report(const FitResult<double>& result, Index n, bool centered);

/// sqrt(diag(I(β,ω)⁻¹)/N) in vectorization order; empty when the information
/// matrix is singular.
VectorX<double> standard_errors(const PathCoefficients<double>& b, const ErrorCovariance<double>& o,
                                Index n);

}  // namespace ricf
