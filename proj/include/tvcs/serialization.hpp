#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvcs/crowd.hpp"
#include "tvcs/grn.hpp"
#include "tvcs/projection.hpp"
#include "tvcs/regression.hpp"
#include "tvcs/solvers.hpp"
#include "tvcs/structure.hpp"

namespace tvcs {

/// Malformed input documents; the message names the offending field.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// %.17g.
std::string format_double(double value);

/// {"p": int, "overall": int, "view1": [{"indices": [...], "budget": int}], "view2": [...]}.
/// "overall" defaults to p and either view may be omitted. The result is not validated.
TvcsStructure structure_from_json(const std::string& text);
std::string structure_to_json(const TvcsStructure& structure, int indent = 2);

std::string projection_result_to_json(const ProjectionResult& result, int indent = 2);
std::string solve_trace_to_json(const SolveTrace& trace, int indent = 2);
/// "iteration,objective" rows.
std::string solve_trace_to_csv(const SolveTrace& trace);

/// A JSON array of numbers, a JSON object with a "v" array, or whitespace/comma
/// separated numbers.
std::vector<double> parse_vector(const std::string& text);

/// {"rows": r, "cols": c, "features": [[...], ...], "responses": [...]}.
RegressionData regression_data_from_json(const std::string& text);
std::string regression_data_to_json(const RegressionData& data);

/// Comma or whitespace separated n x m quality matrix, one worker per line.
/// Priors default to 0.5.
CrowdModel crowd_model_from_csv(const std::string& text, std::vector<double> priors = {});

/// One time point per line, N values each; a blank line starts a new trajectory.
GrnData grn_data_from_csv(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace tvcs
