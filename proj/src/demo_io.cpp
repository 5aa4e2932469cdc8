#include "vic/demo_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vic/errors.hpp"

namespace vic {

namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_demo_csv(const DemoDataset& data) {
  if (data.rows.empty()) throw DataError("refusing to write an empty demo stream");
  data.validate(1);
  std::string out = "demo_id,t";
  for (const char* prefix : {"x_", "xd_", "f_"})
    for (const auto& a : data.axes) out += std::string(",") + prefix + a;
  out += '\n';
  for (const auto& r : data.rows) {
    out += std::to_string(r.demo_id);
    out += ',';
    out += format_double(r.t);
    for (const auto* v : {&r.x, &r.xd, &r.f})
      for (Eigen::Index j = 0; j < v->size(); ++j) {
        out += ',';
        out += format_double((*v)(j));
      }
    out += '\n';
  }
  return out;
}

DemoDataset parse_demo_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw DataError(source + ":" + std::to_string(line_no) + ": " + why);
  };

  if (!std::getline(in, line)) {
    line_no = 1;
    fail("missing header");
  }
  ++line_no;
  const auto header = split(trim(line), ',');
  if (header.size() < 5 || trim(header[0]) != "demo_id" || trim(header[1]) != "t")
    fail("header must start with demo_id,t");
  DemoDataset data;
  std::size_t col = 2;
  for (; col < header.size() && trim(header[col]).starts_with("x_"); ++col)
    data.axes.emplace_back(trim(header[col]).substr(2));
  const int m = data.task_dim();
  if (m < 1 || m > kMaxTaskDim) fail("expected 1..3 x_ columns");
  for (int group = 1; group <= 2; ++group) {
    const std::string prefix = group == 1 ? "xd_" : "f_";
    for (int j = 0; j < m; ++j, ++col) {
      if (col >= header.size() || trim(header[col]) != prefix + data.axes[j])
        fail("expected column " + prefix + data.axes[j]);
    }
  }
  if (col != header.size()) fail("unexpected trailing columns");
  const std::size_t n_cols = header.size();

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != n_cols)
      fail("expected " + std::to_string(n_cols) + " fields, got " + std::to_string(cells.size()));
    DemoRow row;
    if (!parse_number(cells[0], row.demo_id)) fail("bad demo_id '" + std::string(cells[0]) + "'");
    if (!parse_number(cells[1], row.t)) fail("bad t '" + std::string(cells[1]) + "'");
    row.x.resize(m);
    row.xd.resize(m);
    row.f.resize(m);
    Eigen::VectorXd* groups[] = {&row.x, &row.xd, &row.f};
    for (int g = 0; g < 3; ++g)
      for (int j = 0; j < m; ++j) {
        const auto& cell = cells[2 + g * m + j];
        if (!parse_number(cell, (*groups[g])(j))) fail("bad number '" + std::string(cell) + "'");
      }
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty()) throw DataError(source + ": no data rows");
  data.validate(1);
  return data;
}

void write_demo_csv(const std::filesystem::path& path, const DemoDataset& data) {
  write_text_file(path, format_demo_csv(data));
}

DemoDataset read_demo_csv(const std::filesystem::path& path) {
  return parse_demo_csv(read_text_file(path), path.string());
}

DemoDataset merge_datasets(const std::vector<DemoDataset>& parts) {
  if (parts.empty()) throw DataError("nothing to merge");
  DemoDataset out;
  out.axes = parts.front().axes;
  for (const auto& p : parts) {
    if (p.axes != out.axes) throw DataError("cannot merge demos with different axes");
    out.rows.insert(out.rows.end(), p.rows.begin(), p.rows.end());
  }
  return out;
}

std::string mixture_to_json(const GaussianMixture& model) {
  json j;
  j["format"] = "vic-gmm/1";
  j["axes"] = model.axes;
  j["input_dims"] = model.input_dims;
  j["output_dims"] = model.output_dims;
  j["input_support"] = {model.input_min, model.input_max};
  json comps = json::array();
  for (const auto& c : model.components) {
    std::vector<double> cov;
    for (Eigen::Index r = 0; r < c.covariance.rows(); ++r)
      for (Eigen::Index k = 0; k < c.covariance.cols(); ++k) cov.push_back(c.covariance(r, k));
    comps.push_back({{"weight", c.weight},
                     {"mean", std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size())},
                     {"covariance", cov}});
  }
  j["components"] = comps;
  return j.dump(1) + "\n";
}

GaussianMixture mixture_from_json(const std::string& text) {
  GaussianMixture model;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "vic-gmm/1") throw DataError("not a vic-gmm/1 model file");
    model.axes = j.at("axes").get<std::vector<std::string>>();
    model.input_dims = j.at("input_dims").get<std::vector<int>>();
    model.output_dims = j.at("output_dims").get<std::vector<int>>();
    const auto support = j.at("input_support").get<std::vector<double>>();
    if (support.size() != 2) throw DataError("input_support must have two entries");
    model.input_min = support[0];
    model.input_max = support[1];
    for (const auto& jc : j.at("components")) {
      GaussianComponent c;
      c.weight = jc.at("weight").get<double>();
      const auto mean = jc.at("mean").get<std::vector<double>>();
      const auto cov = jc.at("covariance").get<std::vector<double>>();
      const auto d = static_cast<Eigen::Index>(mean.size());
      if (static_cast<Eigen::Index>(cov.size()) != d * d) throw DataError("covariance size does not match mean");
      c.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
      c.covariance = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          cov.data(), d, d);
      model.components.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
  model.validate();
  return model;
}

void write_mixture(const std::filesystem::path& path, const GaussianMixture& model) {
  write_text_file(path, mixture_to_json(model));
}

GaussianMixture read_mixture(const std::filesystem::path& path) {
  try {
    return mixture_from_json(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace vic
