#include "btd/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace btd {

namespace {

void put_f64(std::ostream& os, double v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  char buf[8];
  std::memcpy(buf, &v, 8);
  os.write(buf, 8);
}

double get_f64(std::istream& is) {
  char buf[8];
  if (!is.read(buf, 8)) throw ArgumentError("BTD1: truncated data");
  double v;
  std::memcpy(&v, buf, 8);
  return v;
}

struct Header {
  Field field;
  int I, J, K;
};

Header read_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("BTD1: missing header");
  std::istringstream hs(line);
  std::string magic, f;
  Header h{};
  if (!(hs >> magic >> f >> h.I >> h.J >> h.K) || magic != "BTD1")
    throw ArgumentError("BTD1: malformed header");
  if (f == "R")
    h.field = Field::real;
  else if (f == "C")
    h.field = Field::complex;
  else
    throw ArgumentError("BTD1: field tag must be R or C");
  if (h.I < 1 || h.J < 1 || h.K < 1) throw ArgumentError("BTD1: dimensions must be positive");
  return h;
}

}  // namespace

Field peek_btd1_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArgumentError("cannot open " + path);
  return read_header(is).field;
}

template <typename S>
void write_btd1(const std::string& path, const Tensor3<S>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "BTD1 " << (is_complex_v<S> ? "C" : "R") << ' ' << t.I << ' ' << t.J << ' ' << t.K << '\n';
  for (const S& v : t.values) {
    put_f64(os, std::real(v));
    if constexpr (is_complex_v<S>) put_f64(os, std::imag(v));
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

template <typename S>
Tensor3<S> read_btd1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArgumentError("cannot open " + path);
  Header h = read_header(is);
  if (h.field != field_of<S>()) throw ArgumentError("BTD1: field tag does not match requested scalar type");
  Tensor3<S> t(h.I, h.J, h.K);
  for (S& v : t.values) {
    double re = get_f64(is);
    if constexpr (is_complex_v<S>)
      v = cd(re, get_f64(is));
    else
      v = re;
  }
  if (!t.all_finite()) throw ArgumentError("BTD1: non-finite entries");
  return t;
}

template <typename S>
nlohmann::json matrix_to_json(const Mat<S>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if constexpr (is_complex_v<S>)
        row.push_back({m(i, j).real(), m(i, j).imag()});
      else
        row.push_back(m(i, j));
    }
    rows.push_back(row);
  }
  return rows;
}

template <typename S>
Mat<S> matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ArgumentError("matrix: expected nested arrays");
  const Eigen::Index rows = j.size();
  const Eigen::Index cols = rows ? j[0].size() : 0;
  Mat<S> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || Eigen::Index(j[i].size()) != cols) throw ArgumentError("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = j[i][c];
      if constexpr (is_complex_v<S>) {
        if (v.is_array() && v.size() == 2)
          m(i, c) = cd(v[0].get<double>(), v[1].get<double>());
        else if (v.is_number())
          m(i, c) = v.get<double>();
        else
          throw ArgumentError("matrix: bad complex entry");
      } else {
        if (!v.is_number()) throw ArgumentError("matrix: expected real entries");
        m(i, c) = v.get<double>();
      }
    }
  }
  return m;
}

template <typename S>
nlohmann::json decomposition_to_json(const BlockTermDecomposition<S>& d) {
  nlohmann::json j;
  j["field"] = is_complex_v<S> ? "complex" : "real";
  j["A"] = matrix_to_json(d.A);
  j["terms"] = nlohmann::json::array();
  for (int r = 0; r < d.R(); ++r)
    j["terms"].push_back({{"B", matrix_to_json(d.B[r])}, {"C", matrix_to_json(d.C[r])}});
  j["sizes"] = d.sizes();
  return j;
}

template <typename S>
BlockTermDecomposition<S> decomposition_from_json(const nlohmann::json& j) {
  if (!j.contains("A") || !j.contains("terms")) throw ArgumentError("decomposition: missing A or terms");
  BlockTermDecomposition<S> d;
  d.A = matrix_from_json<S>(j["A"]);
  for (const auto& term : j["terms"]) {
    d.B.push_back(matrix_from_json<S>(term.at("B")));
    d.C.push_back(matrix_from_json<S>(term.at("C")));
  }
  if (j.contains("sizes") && j["sizes"].get<std::vector<int>>() != d.sizes())
    throw ArgumentError("decomposition: sizes disagree with term shapes");
  d.validate();
  return d;
}

template <typename S>
std::string matrix_to_csv(const Mat<S>& m) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      if constexpr (is_complex_v<S>)
        os << m(i, j).real() << (m(i, j).imag() < 0 ? "" : "+") << m(i, j).imag() << 'i';
      else
        os << m(i, j);
    }
    os << '\n';
  }
  return os.str();
}

#define BTD_INST(S)                                                                   \
  template void write_btd1<S>(const std::string&, const Tensor3<S>&);                 \
  template Tensor3<S> read_btd1<S>(const std::string&);                               \
  template nlohmann::json matrix_to_json<S>(const Mat<S>&);                           \
  template Mat<S> matrix_from_json<S>(const nlohmann::json&);                         \
  template nlohmann::json decomposition_to_json<S>(const BlockTermDecomposition<S>&); \
  template BlockTermDecomposition<S> decomposition_from_json<S>(const nlohmann::json&); \
  template std::string matrix_to_csv<S>(const Mat<S>&);
BTD_INST(double)
BTD_INST(cd)
#undef BTD_INST

}  // namespace btd
