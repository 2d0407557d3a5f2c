#include "mnclust/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace mnclust {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
  if (!out) throw ParseError("write failed for " + path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Vec parse_vec(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(what + " entries must be numbers");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

Mat parse_mat(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + " must be a nested array");
  const int p = static_cast<int>(j.size());
  Mat m(p, p);
  for (int r = 0; r < p; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != p) {
      throw ParseError(what + " must be square (row " + std::to_string(r) + ")");
    }
    for (int c = 0; c < p; ++c) {
      if (!j[r][c].is_number()) throw ParseError(what + " entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(what + ": not a number: '" + s + "'");
  }
}

Dataset load_dataset_json(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("dimension") || !doc.contains("items")) {
    throw ParseError(path + ": expected fields 'dimension' and 'items'");
  }
  const int p = doc["dimension"].get<int>();
  if (p < 1) throw ParseError(path + ": dimension must be >= 1");
  if (!doc["items"].is_array()) throw ParseError(path + ": 'items' must be an array");

  std::vector<GaussianItem> items;
  items.reserve(doc["items"].size());
  for (const auto& entry : doc["items"]) {
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("mean")) {
      throw ParseError(path + ": each item needs 'id' and 'mean'");
    }
    std::string id = entry["id"].is_string()
                         ? entry["id"].get<std::string>()
                         : entry["id"].dump();
    Vec mean = parse_vec(entry["mean"], "item " + id + " mean");
    if (mean.size() != p) {
      throw DimensionMismatch(path + ": item " + id + " mean length != dimension");
    }
    const bool has_cov = entry.contains("covariance");
    const bool has_prec = entry.contains("precision");
    if (has_cov == has_prec) {
      throw ParseError(path + ": item " + id +
                       " needs exactly one of 'covariance' or 'precision'");
    }
    Mat m = parse_mat(entry[has_cov ? "covariance" : "precision"],
                      "item " + id + (has_cov ? " covariance" : " precision"));
    if (m.rows() != p) {
      throw DimensionMismatch(path + ": item " + id + " matrix size != dimension");
    }
    items.push_back(has_cov
                        ? GaussianItem::from_covariance(std::move(id), std::move(mean),
                                                        std::move(m))
                        : GaussianItem::from_precision(std::move(id), std::move(mean),
                                                       std::move(m)));
  }
  return Dataset(std::move(items));
}

Dataset load_dataset_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  // id, mean_1..p, cov_11..cov_pp: 1 + p + p^2 columns.
  int p = -1;
  for (int q = 1; q <= 256; ++q) {
    if (1 + q + q * q == static_cast<int>(header.size())) {
      p = q;
      break;
    }
  }
  if (p < 1 || header[0] != "id") {
    throw ParseError(path + ": header must be id,mean_1..p,cov_11..cov_pp");
  }

  std::vector<GaussianItem> items;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    const std::string where = path + ":" + std::to_string(line_no);
    Vec mean(p);
    for (int i = 0; i < p; ++i) mean(i) = parse_number(fields[1 + i], where);
    Mat cov(p, p);
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) {
        cov(r, c) = parse_number(fields[1 + p + r * p + c], where);
      }
    }
    items.push_back(GaussianItem::from_covariance(fields[0], std::move(mean),
                                                  std::move(cov)));
  }
  return Dataset(std::move(items));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Dataset load_dataset(const std::string& path) {
  return ends_with(path, ".csv") ? load_dataset_csv(path)
                                 : load_dataset_json(path);
}

void save_dataset_json(const std::string& path, const Dataset& data) {
  json items = json::array();
  for (const auto& item : data.items()) {
    Mat cov = item.covariance();
    json rows = json::array();
    for (int r = 0; r < cov.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < cov.cols(); ++c) row.push_back(cov(r, c));
      rows.push_back(std::move(row));
    }
    json mean = json::array();
    for (int i = 0; i < item.dim(); ++i) mean.push_back(item.mean(i));
    items.push_back({{"id", item.id}, {"mean", std::move(mean)},
                     {"covariance", std::move(rows)}});
  }
  json doc = {{"dimension", data.dim()}, {"items", std::move(items)}};
  write_file(path, doc.dump(2) + "\n");
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
  const int p = data.dim();
  std::ostringstream out;
  out << "id";
  for (int i = 1; i <= p; ++i) out << ",mean_" << i;
  for (int r = 1; r <= p; ++r) {
    for (int c = 1; c <= p; ++c) out << ",cov_" << r << c;
  }
  out << "\n";
  for (const auto& item : data.items()) {
    out << item.id;
    for (int i = 0; i < p; ++i) out << "," << format_double(item.mean(i));
    Mat cov = item.covariance();
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) out << "," << format_double(cov(r, c));
    }
    out << "\n";
  }
  write_file(path, out.str());
}

void save_assignment(const std::string& path, const Dataset& data,
                     const Partition& partition) {
  if (partition.size() != data.size()) {
    throw DimensionMismatch("save_assignment: partition size != dataset size");
  }
  Partition canonical = canonicalize(partition);
  std::ostringstream out;
  out << "id,cluster\n";
  for (int i = 0; i < data.size(); ++i) {
    out << data.item(i).id << "," << canonical.label(i) + 1 << "\n";
  }
  write_file(path, out.str());
}

Partition load_assignment(const std::string& path, const Dataset& data) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_csv_line(line) != std::vector<std::string>{"id", "cluster"}) {
    throw ParseError(path + ": header must be id,cluster");
  }
  std::vector<int> labels(data.size(), -1);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected id,cluster");
    }
    int index = data.index_of(fields[0]);  // throws UnknownId
    if (labels[index] != -1) {
      throw DuplicateId(path + ": id listed twice: " + fields[0]);
    }
    double raw = parse_number(fields[1], path + ":" + std::to_string(line_no));
    int label = static_cast<int>(raw);
    if (raw != label || label < 1) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": cluster must be a positive integer");
    }
    labels[index] = label;
  }
  for (int i = 0; i < data.size(); ++i) {
    if (labels[i] == -1) {
      throw MissingId(path + ": no assignment for id " + data.item(i).id);
    }
  }
  return Partition::compacted(labels);
}

void save_curve(const std::string& path, const SelectionReport& report) {
  std::ostringstream out;
  out << "k,neg_loglik_flat,neg_loglik_normal,chisq,dof,p_value\n";
  for (const auto& row : report.rows) {
    out << row.k << "," << format_double(-row.loglik_flat) << ",";
    if (row.loglik_normal) out << format_double(-*row.loglik_normal);
    out << "," << format_double(row.chisq) << "," << row.dof << ","
        << format_double(row.p_value) << "\n";
  }
  write_file(path, out.str());
}

void save_breakdown(const std::string& path, const LikelihoodBreakdown& b) {
  json doc = {{"data_term", b.data_term},
              {"prior_norm_term", b.prior_norm_term},
              {"complexity_term", b.complexity_term},
              {"fit_term", b.fit_term},
              {"shrink_term", b.shrink_term},
              {"total", b.total}};
  write_file(path, doc.dump(2) + "\n");
}

void save_manifest(const std::string& path, const RunManifest& manifest) {
  json config = json::object();
  if (!manifest.config.empty()) {
    try {
      config = json::parse(manifest.config);
    } catch (const json::parse_error&) {
      config = manifest.config;  // keep as opaque string
    }
  }
  json doc = {{"command", manifest.command},
              {"config", std::move(config)},
              {"seed", manifest.seed},
              {"input", manifest.input_path},
              {"output_dir", manifest.output_dir},
              {"artifact_version", manifest.artifact_version},
              {"duration_seconds", manifest.duration_seconds}};
  write_file(path, doc.dump(2) + "\n");
}

}  // namespace mnclust
