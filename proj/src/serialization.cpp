#include "tvcs/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tvcs {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& doc, const std::string& key, const std::string& context) {
  if (!doc.contains(key)) throw FormatError(context + ": missing field '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(context + ": field '" + key + "' has the wrong type");
  }
}

std::vector<Group> groups_from_json(const json& doc, const std::string& key) {
  std::vector<Group> out;
  if (!doc.contains(key)) return out;
  if (!doc[key].is_array()) throw FormatError("structure: field '" + key + "' must be an array");
  for (std::size_t g = 0; g < doc[key].size(); ++g) {
    const std::string ctx = "structure: " + key + "[" + std::to_string(g) + "]";
    const auto& item = doc[key][g];
    if (!item.is_object()) throw FormatError(ctx + " must be an object");
    Group group;
    const auto indices = field<std::vector<long long>>(item, "indices", ctx);
    for (long long i : indices) {
      if (i < 0) throw FormatError(ctx + ": negative index " + std::to_string(i));
      group.indices.push_back(static_cast<std::size_t>(i));
    }
    const auto budget = field<long long>(item, "budget", ctx);
    if (budget < 0) throw FormatError(ctx + ": negative budget");
    group.budget = static_cast<std::size_t>(budget);
    out.push_back(std::move(group));
  }
  return out;
}

json groups_to_json(const std::vector<Group>& groups) {
  json out = json::array();
  for (const auto& g : groups) out.push_back({{"indices", g.indices}, {"budget", g.budget}});
  return out;
}

json support_json(const Support& s) {
  json out = json::array();
  for (auto b : s) out.push_back(static_cast<int>(b));
  return out;
}

std::vector<std::vector<double>> parse_rows(const std::string& text, bool keep_blank,
                                            std::vector<std::size_t>* breaks) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t' || c == '\r') c = ' ';
    }
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(line_no) + ": '" + token + "' is not a number");
      }
    }
    if (row.empty()) {
      if (keep_blank && breaks && !rows.empty()) breaks->push_back(rows.size());
      continue;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

TvcsStructure structure_from_json(const std::string& text) {
  const auto doc = parse_json(text, "structure");
  if (!doc.is_object()) throw FormatError("structure: expected a JSON object");
  TvcsStructure s;
  const auto p = field<long long>(doc, "p", "structure");
  if (p <= 0) throw FormatError("structure: field 'p' must be positive");
  s.dimension = static_cast<std::size_t>(p);
  s.overall_budget = s.dimension;
  if (doc.contains("overall")) {
    const auto overall = field<long long>(doc, "overall", "structure");
    if (overall < 0) throw FormatError("structure: field 'overall' must be non-negative");
    s.overall_budget = static_cast<std::size_t>(overall);
  }
  s.view1 = groups_from_json(doc, "view1");
  s.view2 = groups_from_json(doc, "view2");
  return s;
}

std::string structure_to_json(const TvcsStructure& s, int indent) {
  json doc = {{"p", s.dimension},
              {"overall", s.overall_budget},
              {"view1", groups_to_json(s.view1)},
              {"view2", groups_to_json(s.view2)}};
  return doc.dump(indent);
}

std::string projection_result_to_json(const ProjectionResult& r, int indent) {
  json doc = {{"support", support_json(r.support)},
              {"projected", r.projected},
              {"iterations", r.iterations_used},
              {"gap", r.final_gap},
              {"contraction_ratio", r.contraction_ratio},
              {"max_fractionality", r.max_fractionality},
              {"perturbed", r.perturbed}};
  return doc.dump(indent);
}

std::string solve_trace_to_json(const SolveTrace& t, int indent) {
  json supports = json::array();
  for (const auto& s : t.supports) supports.push_back(support_json(s));
  json doc = {{"objective", t.objective},
              {"supports", supports},
              {"seconds", t.seconds},
              {"final_w", t.final_w},
              {"iterations", t.iterations},
              {"converged", t.converged},
              {"projection_iterations", t.projection_iterations}};
  return doc.dump(indent);
}

std::string solve_trace_to_csv(const SolveTrace& t) {
  std::string out = "iteration,objective\n";
  for (std::size_t i = 0; i < t.objective.size(); ++i) {
    out += std::to_string(i) + "," + format_double(t.objective[i]) + "\n";
  }
  return out;
}

std::vector<double> parse_vector(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    const auto doc = parse_json(text, "vector");
    const json& arr = doc.is_object() ? doc.contains("v") ? doc["v"] : json() : doc;
    if (!arr.is_array()) throw FormatError("vector: expected an array or an object with field 'v'");
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) throw FormatError("vector: entry " + std::to_string(i) + " is not a number");
      out.push_back(arr[i].get<double>());
    }
    return out;
  }
  std::vector<double> out;
  for (auto& row : parse_rows(text, false, nullptr)) out.insert(out.end(), row.begin(), row.end());
  return out;
}

RegressionData regression_data_from_json(const std::string& text) {
  const auto doc = parse_json(text, "regression data");
  RegressionData d;
  d.rows = field<std::size_t>(doc, "rows", "regression data");
  d.cols = field<std::size_t>(doc, "cols", "regression data");
  const auto features = field<std::vector<std::vector<double>>>(doc, "features", "regression data");
  const auto responses = field<std::vector<double>>(doc, "responses", "regression data");
  d.features.resize(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(d.dimension()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != d.dimension()) {
      throw FormatError("regression data: features[" + std::to_string(i) + "] has length " +
                        std::to_string(features[i].size()) + ", expected " +
                        std::to_string(d.dimension()));
    }
    for (std::size_t j = 0; j < d.dimension(); ++j) d.features(i, j) = features[i][j];
  }
  d.responses = Eigen::Map<const Eigen::VectorXd>(responses.data(), static_cast<Eigen::Index>(responses.size()));
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("regression data: ") + e.what());
  }
  return d;
}

std::string regression_data_to_json(const RegressionData& d) {
  json features = json::array();
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    std::vector<double> row(d.features.cols());
    for (Eigen::Index j = 0; j < d.features.cols(); ++j) row[j] = d.features(i, j);
    features.push_back(row);
  }
  std::vector<double> responses(d.responses.data(), d.responses.data() + d.responses.size());
  return json{{"rows", d.rows}, {"cols", d.cols}, {"features", features}, {"responses", responses}}.dump();
}

CrowdModel crowd_model_from_csv(const std::string& text, std::vector<double> priors) {
  const auto rows = parse_rows(text, false, nullptr);
  if (rows.empty()) throw FormatError("quality matrix: no rows");
  CrowdModel model;
  model.quality.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw FormatError("quality matrix: row " + std::to_string(i) + " has " +
                        std::to_string(rows[i].size()) + " entries, expected " +
                        std::to_string(rows[0].size()));
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) model.quality(i, j) = rows[i][j];
  }
  model.priors = priors.empty() ? std::vector<double>(rows[0].size(), 0.5) : std::move(priors);
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("quality matrix: ") + e.what());
  }
  return model;
}

GrnData grn_data_from_csv(const std::string& text) {
  std::vector<std::size_t> breaks;
  const auto rows = parse_rows(text, true, &breaks);
  if (rows.empty()) throw FormatError("time series: no rows");
  breaks.push_back(rows.size());
  GrnData data;
  const std::size_t n = rows[0].size();
  std::size_t begin = 0;
  for (std::size_t end : breaks) {
    if (end <= begin) continue;
    Eigen::MatrixXd s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(end - begin));
    for (std::size_t t = begin; t < end; ++t) {
      if (rows[t].size() != n) {
        throw FormatError("time series: row " + std::to_string(t) + " has " +
                          std::to_string(rows[t].size()) + " values, expected " + std::to_string(n));
      }
      for (std::size_t i = 0; i < n; ++i) s(i, t - begin) = rows[t][i];
    }
    data.series.push_back(std::move(s));
    begin = end;
  }
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("time series: ") + e.what());
  }
  return data;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tvcs
