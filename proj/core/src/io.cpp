#include "gpmm/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gpmm {

namespace {

double parse_number(const std::string& token, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE)
    throw std::runtime_error("malformed number '" + token + "' in " + context);
  return value;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::string> split_comma(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void write_matrix(std::ostream& os, const std::string& name, const Matrix& m) {
  os << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << (j ? " " : "") << format_number(m(i, j));
    os << '\n';
  }
}

void write_vector(std::ostream& os, const std::string& name, const Vector& v) {
  os << "vector " << name << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << format_number(v[i]);
  os << '\n';
}

}  // namespace

std::vector<std::string> default_headers(const std::string& prefix, int count) {
  std::vector<std::string> headers;
  headers.reserve(count);
  for (int i = 1; i <= count; ++i) headers.push_back(prefix + std::to_string(i));
  return headers;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    table.data.resize(0, 0);
    return table;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.headers = split_comma(line);
  const size_t width = table.headers.size();

  std::vector<Vector> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_comma(line);
    if (fields.size() != width) {
      std::ostringstream os;
      os << path << ":" << line_no << ": expected " << width << " fields, got "
         << fields.size();
      throw std::runtime_error(os.str());
    }
    Vector row(width);
    for (size_t j = 0; j < width; ++j)
      row[Eigen::Index(j)] = parse_number(fields[j], path + ":" + std::to_string(line_no));
    rows.push_back(std::move(row));
  }

  table.data.resize(Eigen::Index(width), Eigen::Index(rows.size()));
  for (size_t t = 0; t < rows.size(); ++t) table.data.col(Eigen::Index(t)) = rows[t];
  return table;
}

void write_csv(const std::string& path, const Matrix& data,
               const std::vector<std::string>& headers) {
  if (Eigen::Index(headers.size()) != data.rows())
    throw std::invalid_argument("header count does not match variable count");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  for (size_t j = 0; j < headers.size(); ++j) out << (j ? "," : "") << headers[j];
  out << '\n';
  for (Eigen::Index t = 0; t < data.cols(); ++t) {
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      out << (i ? "," : "") << format_number(data(i, t));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_model(const std::string& path, const StoredModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << kModelFormatTag << '\n';
  out << "kind " << model.kind << '\n';
  out << "dims " << model.params.p() << ' ' << model.params.q() << ' '
      << model.params.r() << '\n';
  out << "tau " << model.tau << '\n';
  out << "converged " << (model.converged ? 1 : 0) << '\n';
  write_matrix(out, "U", model.params.u_mat);
  write_matrix(out, "V", model.params.v_mat);
  write_vector(out, "w", model.params.w_diag);
  write_vector(out, "lambda_eps", model.params.lambda_eps_diag);
  write_matrix(out, "Lambda_y", model.params.lambda_y);
  write_matrix(out, "Lambda_x", model.params.lambda_x);
  write_vector(out, "c_y", model.params.c_y);
  write_vector(out, "c_x", model.params.c_x);
  if (model.norm_x) {
    write_vector(out, "norm_x_mean", model.norm_x->mean);
    write_vector(out, "norm_x_std", model.norm_x->std_dev);
  }
  if (model.norm_y) {
    write_vector(out, "norm_y_mean", model.norm_y->mean);
    write_vector(out, "norm_y_std", model.norm_y->std_dev);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

StoredModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string tag;
  if (!(in >> tag) || tag != kModelFormatTag)
    throw std::runtime_error(path + ": not a " + std::string(kModelFormatTag) + " file");

  StoredModel model;
  int p = -1, q = -1, r = -1, converged = 1;
  std::map<std::string, Matrix> matrices;
  std::map<std::string, Vector> vectors;

  std::string key;
  while (in >> key) {
    if (key == "kind") {
      in >> model.kind;
    } else if (key == "dims") {
      in >> p >> q >> r;
    } else if (key == "tau") {
      in >> model.tau;
    } else if (key == "converged") {
      in >> converged;
    } else if (key == "matrix") {
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      in >> name >> rows >> cols;
      Matrix m(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) in >> m(i, j);
      matrices[name] = std::move(m);
    } else if (key == "vector") {
      std::string name;
      Eigen::Index n = 0;
      in >> name >> n;
      Vector v(n);
      for (Eigen::Index i = 0; i < n; ++i) in >> v[i];
      vectors[name] = std::move(v);
    } else {
      throw std::runtime_error(path + ": unexpected token '" + key + "'");
    }
    if (in.fail()) throw std::runtime_error(path + ": truncated or malformed model file");
  }
  model.converged = converged != 0;

  const auto need_matrix = [&](const char* name) -> Matrix& {
    auto it = matrices.find(name);
    if (it == matrices.end())
      throw std::runtime_error(path + ": missing field '" + name + "'");
    return it->second;
  };
  const auto need_vector = [&](const char* name) -> Vector& {
    auto it = vectors.find(name);
    if (it == vectors.end())
      throw std::runtime_error(path + ": missing field '" + name + "'");
    return it->second;
  };

  model.params.u_mat = std::move(need_matrix("U"));
  model.params.v_mat = std::move(need_matrix("V"));
  model.params.w_diag = std::move(need_vector("w"));
  model.params.lambda_eps_diag = std::move(need_vector("lambda_eps"));
  model.params.lambda_y = std::move(need_matrix("Lambda_y"));
  model.params.lambda_x = std::move(need_matrix("Lambda_x"));
  model.params.c_y = std::move(need_vector("c_y"));
  model.params.c_x = std::move(need_vector("c_x"));

  if (vectors.count("norm_x_mean")) {
    Normalization n;
    n.mean = std::move(need_vector("norm_x_mean"));
    n.std_dev = std::move(need_vector("norm_x_std"));
    model.norm_x = std::move(n);
  }
  if (vectors.count("norm_y_mean")) {
    Normalization n;
    n.mean = std::move(need_vector("norm_y_mean"));
    n.std_dev = std::move(need_vector("norm_y_std"));
    model.norm_y = std::move(n);
  }

  if (model.params.p() != p || model.params.q() != q || model.params.r() != r)
    throw std::runtime_error(path + ": stored dimensions disagree with matrix shapes");
  const auto issues = validate_params(model.params);
  if (!issues.empty())
    throw std::runtime_error(path + ": invalid model parameters: " + issues[0]);
  return model;
}

}  // namespace gpmm
