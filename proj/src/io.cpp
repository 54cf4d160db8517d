#include "laborflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace laborflow::io {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& why) {
  throw InputError(path.string() + ":" + std::to_string(line) + ": " + why);
}

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file: " + path.string());
  return out;
}

double parse_double(const std::string& text, const std::filesystem::path& path,
                    std::size_t line) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) fail(path, line, "bad number '" + text + "'");
  return value;
}

std::int64_t parse_count(const std::string& text, const std::filesystem::path& path,
                         std::size_t line) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) fail(path, line, "bad count '" + text + "'");
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::vector<FlowRecord> read_flow_records(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<FlowRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "origin") continue;  // header
    if (fields.size() != 3 && fields.size() != 4)
      fail(path, line_no, "expected origin,destination,count[,group]");
    FlowRecord r;
    r.origin = fields[0];
    r.destination = fields[1];
    r.count = parse_count(fields[2], path, line_no);
    if (fields.size() == 4) r.group = fields[3];
    records.push_back(std::move(r));
  }
  return records;
}

FlowCounts read_flows_csv(const std::filesystem::path& path) {
  try {
    return ingest_counts(read_flow_records(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_flows_csv(const std::filesystem::path& path, const FlowCounts& counts) {
  std::ofstream out = open_output(path);
  out << "origin,destination,count\n";
  const std::size_t n = counts.size();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (counts.counts(i, j) > 0)
        out << counts.occupations[j].code << ',' << counts.occupations[i].code << ','
            << counts.counts(i, j) << '\n';
  for (std::size_t i = 0; i < n; ++i)
    if (counts.entry_counts[i] > 0)
      out << "ENTRY," << counts.occupations[i].code << ',' << counts.entry_counts[i]
          << '\n';
  for (std::size_t j = 0; j < n; ++j)
    if (counts.exit_counts[j] > 0)
      out << counts.occupations[j].code << ",EXIT," << counts.exit_counts[j] << '\n';
}

void write_matrix(const std::filesystem::path& csv_path,
                  const std::filesystem::path& meta_path,
                  const TransitionMatrix& matrix) {
  std::ofstream csv = open_output(csv_path);
  const std::size_t n = matrix.size();
  csv << "destination";
  for (std::size_t j = 0; j < n; ++j) csv << ',' << matrix.occupations[j].code;
  csv << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    csv << matrix.occupations[i].code;
    for (std::size_t j = 0; j < n; ++j) csv << ',' << format_double(matrix.probs(i, j));
    csv << '\n';
  }

  ordered_json meta;
  meta["occupations"] = ordered_json::array();
  for (const auto& o : matrix.occupations) meta["occupations"].push_back(o.code);
  meta["theta"] = matrix.theta;
  meta["self_loops"] = matrix.self_loops == SelfLoops::included ? "included" : "excluded";
  meta["dangling_policy"] = TransitionMatrix::dangling_policy;
  meta["dangling"] = matrix.dangling;
  meta["degenerate"] = matrix.degenerate;
  std::ofstream out = open_output(meta_path);
  out << meta.dump(2) << '\n';
}

TransitionMatrix read_matrix(const std::filesystem::path& csv_path,
                             const std::filesystem::path& meta_path) {
  std::ifstream meta_in = open_input(meta_path);
  ordered_json meta;
  try {
    meta = ordered_json::parse(meta_in);
  } catch (const std::exception& e) {
    throw InputError(meta_path.string() + ": " + e.what());
  }

  TransitionMatrix tm;
  for (const auto& code : meta.at("occupations"))
    tm.occupations.push_back({code.get<std::string>(), ""});
  tm.theta = meta.at("theta").get<double>();
  tm.self_loops = meta.at("self_loops").get<std::string>() == "excluded"
                      ? SelfLoops::excluded
                      : SelfLoops::included;
  for (const auto& d : meta.at("dangling")) tm.dangling.push_back(d.get<std::string>());
  for (const auto& d : meta.at("degenerate"))
    tm.degenerate.push_back(d.get<std::string>());

  const std::size_t n = tm.occupations.size();
  tm.probs = Matrix(n, n, 0.0);
  std::ifstream in = open_input(csv_path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(csv_path, 1, "missing header");
  ++line_no;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != n + 1) fail(csv_path, line_no, "wrong column count");
    if (row >= n) fail(csv_path, line_no, "more rows than occupations");
    if (fields[0] != tm.occupations[row].code)
      fail(csv_path, line_no, "row order does not match the sidecar occupations");
    for (std::size_t j = 0; j < n; ++j)
      tm.probs(row, j) = parse_double(fields[j + 1], csv_path, line_no);
    ++row;
  }
  if (row != n) fail(csv_path, line_no, "fewer rows than occupations");
  return tm;
}

void write_communities_csv(const std::filesystem::path& path,
                           const CommunityAssignment& communities) {
  std::ofstream out = open_output(path);
  out << "occupation,community\n";
  for (std::size_t v = 0; v < communities.occupations.size(); ++v)
    out << communities.occupations[v].code << ',' << communities.membership[v] << '\n';
}

CommunityAssignment read_communities_csv(const std::filesystem::path& path,
                                         const FlowCounts& flows) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  CommunityAssignment ca;
  ca.occupations = flows.occupations;
  ca.membership.assign(flows.size(), -1);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (line_no == 1 && fields.size() >= 1 && fields[0] == "occupation") continue;
    if (fields.size() != 2) fail(path, line_no, "expected occupation,community");
    const auto idx = flows.index_of(fields[0]);
    if (!idx) fail(path, line_no, "unknown occupation '" + fields[0] + "'");
    ca.membership[*idx] =
        static_cast<int>(parse_count(fields[1], path, line_no));
  }
  for (std::size_t v = 0; v < ca.membership.size(); ++v)
    if (ca.membership[v] < 0)
      throw InputError(path.string() + ": no community for occupation " +
                       flows.occupations[v].code);
  ca.n_communities =
      1 + *std::max_element(ca.membership.begin(), ca.membership.end());
  ca.modularity = barber_modularity(flows, ca.membership);
  return ca;
}

void write_scores_csv(const std::filesystem::path& path,
                      const AccessTransferScores& scores,
                      const TaxonomyLabels* labels) {
  std::ofstream out = open_output(path);
  out << "occupation,accessibility,transferability,label\n";
  for (std::size_t v = 0; v < scores.occupations.size(); ++v) {
    out << scores.occupations[v].code << ',';
    if (scores.accessibility[v]) out << format_double(*scores.accessibility[v]);
    out << ',';
    if (scores.transferability[v]) out << format_double(*scores.transferability[v]);
    out << ',';
    if (labels && labels->labels[v]) out << taxonomy_name(*labels->labels[v]);
    out << '\n';
  }
}

TaxonomyLabels read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::string, std::optional<Taxonomy>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (line_no == 1 && fields.size() >= 1 && fields[0] == "occupation") continue;
    if (fields.size() != 4) fail(path, line_no, "expected occupation,accessibility,transferability,label");
    std::optional<Taxonomy> label;
    if (!fields[3].empty()) {
      label = taxonomy_from_name(fields[3]);
      if (!label) fail(path, line_no, "unknown label '" + fields[3] + "'");
    }
    rows.emplace_back(fields[0], label);
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  TaxonomyLabels labels;
  for (const auto& [code, label] : rows) {
    labels.occupations.push_back({code, ""});
    labels.labels.push_back(label);
  }
  return labels;
}

SkillMatrix read_skills_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  struct Cell {
    std::string occupation, skill;
    double weight;
  };
  std::vector<Cell> cells;
  std::set<std::string> codes, skill_names;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (line_no == 1 && fields.size() >= 1 && fields[0] == "occupation") continue;
    if (fields.size() != 3) fail(path, line_no, "expected occupation,skill,weight");
    const double w = parse_double(fields[2], path, line_no);
    if (w < 0.0) fail(path, line_no, "negative weight");
    cells.push_back({fields[0], fields[1], w});
    codes.insert(fields[0]);
    skill_names.insert(fields[1]);
  }
  SkillMatrix skills;
  for (const auto& c : codes) skills.occupations.push_back({c, ""});
  skills.skills.assign(skill_names.begin(), skill_names.end());
  skills.weights = Matrix(skills.occupations.size(), skills.skills.size(), 0.0);
  for (const auto& cell : cells) {
    const auto row = skills.index_of(cell.occupation);
    const auto col = std::lower_bound(skills.skills.begin(), skills.skills.end(),
                                      cell.skill) -
                     skills.skills.begin();
    skills.weights(*row, static_cast<std::size_t>(col)) += cell.weight;
  }
  for (std::size_t v = 0; v < skills.occupations.size(); ++v) {
    double norm = 0.0;
    for (std::size_t k = 0; k < skills.skills.size(); ++k)
      norm += skills.weights(v, k);
    if (norm <= 0.0) skills.zero_rows.push_back(skills.occupations[v].code);
  }
  return skills;
}

std::vector<std::pair<std::string, std::string>> read_mapping_csv(
    const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::string, std::string>> mapping;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (line_no == 1 && fields.size() >= 1 && fields[0] == "source") continue;
    if (fields.size() != 2) fail(path, line_no, "expected source,target");
    mapping.emplace_back(fields[0], fields[1]);
  }
  return mapping;
}

std::vector<std::pair<std::string, double>> read_value_csv(
    const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::string, double>> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (line_no == 1 && fields.size() >= 1 && fields[0] == "occupation") continue;
    if (fields.size() != 2) fail(path, line_no, "expected occupation,value");
    values.emplace_back(fields[0], parse_double(fields[1], path, line_no));
  }
  return values;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out = open_output(path);
  out << content;
}

}  // namespace laborflow::io
