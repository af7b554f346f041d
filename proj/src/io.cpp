#include "sympflow/io.hpp"

#include <fstream>
#include <sstream>

#include "sympflow/errors.hpp"

namespace sympflow {

json matrix_to_json(const Mat& A) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      re_row.push_back(A(i, j).real());
      im_row.push_back(A(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return json{{"rows", A.rows()}, {"cols", A.cols()}, {"re", re}, {"im", im}};
}

Mat matrix_from_json(const json& j) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const json& re = j.at("re");
    const bool has_im = j.contains("im");
    if (rows < 0 || cols < 0 || re.size() != static_cast<std::size_t>(rows) ||
        (has_im && j.at("im").size() != static_cast<std::size_t>(rows))) {
      throw UsageError("matrix JSON: row count does not match \"rows\"");
    }
    Mat A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (re[i].size() != static_cast<std::size_t>(cols) ||
          (has_im && j["im"][i].size() != static_cast<std::size_t>(cols))) {
        throw UsageError("matrix JSON: column count does not match \"cols\"");
      }
      for (Eigen::Index k = 0; k < cols; ++k) {
        const double r = re[i][k].get<double>();
        const double m = has_im ? j["im"][i][k].get<double>() : 0.0;
        A(i, k) = cd(r, m);
      }
    }
    if (!A.real().allFinite() || !A.imag().allFinite()) {
      throw UsageError("matrix JSON: non-finite entry");
    }
    return A;
  } catch (const json::exception& e) {
    throw UsageError(std::string("matrix JSON: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw UsageError("cannot parse '" + path + "': " + e.what());
  }
}

}  // namespace sympflow
