#include "conicsv/io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace conicsv {

ParseError::ParseError(const std::string& source, int line, int col, const std::string& message)
    : InvalidInput(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + message),
      line_(line),
      col_(col) {}

namespace {

struct Token {
  std::string text;
  int line = 0;
  int col = 0;
};

// Splits a stream into whitespace-separated tokens, remembering positions.
class Tokenizer {
 public:
  Tokenizer(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string text;
    int line = 0;
    while (std::getline(in, text)) {
      ++line;
      if (!text.empty() && text.back() == '\r') text.pop_back();
      std::vector<Token> row;
      std::size_t i = 0;
      while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size() || text[i] == '#') break;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        row.push_back({text.substr(start, i - start), line, static_cast<int>(start) + 1});
      }
      if (!row.empty()) lines_.push_back(std::move(row));
    }
    last_line_ = line;
  }

  bool done() const { return line_ >= lines_.size(); }

  // All tokens of the next nonblank line.
  std::vector<Token> next_line(const std::string& what) {
    if (done()) fail_eof(what);
    pos_ = 0;
    return lines_[line_++];
  }

  // Next token, crossing line breaks.
  Token next(const std::string& what) {
    while (line_ < lines_.size() && pos_ >= lines_[line_].size()) {
      ++line_;
      pos_ = 0;
    }
    if (line_ >= lines_.size()) fail_eof(what);
    return lines_[line_][pos_++];
  }

  // Moves to the start of the next line; complains about leftovers.
  void finish_line() {
    if (line_ < lines_.size() && pos_ > 0) {
      if (pos_ < lines_[line_].size()) fail(lines_[line_][pos_], "unexpected extra value");
      ++line_;
      pos_ = 0;
    }
  }

  void expect_end() {
    finish_line();
    if (line_ < lines_.size()) fail(lines_[line_][0], "unexpected trailing content");
  }

  [[noreturn]] void fail(const Token& t, const std::string& message) const {
    throw ParseError(source_, t.line, t.col, message);
  }
  [[noreturn]] void fail_eof(const std::string& what) const {
    throw ParseError(source_, last_line_ + 1, 1, "unexpected end of input, expected " + what);
  }

  double real(const Token& t) const {
    const char* begin = t.text.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') fail(t, "expected a real number, got '" + t.text + "'");
    if (errno == ERANGE && std::abs(v) > 1.0) fail(t, "number out of range");
    if (!std::isfinite(v)) fail(t, "non-finite value '" + t.text + "'");
    return v;
  }

  Index count(const Token& t) const {
    const char* begin = t.text.c_str();
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE)
      fail(t, "expected a nonnegative integer, got '" + t.text + "'");
    if (v < 0) fail(t, "expected a nonnegative integer, got '" + t.text + "'");
    return static_cast<Index>(v);
  }

  double next_real(const std::string& what) { return real(next(what)); }

  // Reads a full line of exactly `k` reals.
  Vector row(Index k, const std::string& what) {
    const auto tokens = next_line(what);
    if (static_cast<Index>(tokens.size()) != k) {
      const Token& at = static_cast<Index>(tokens.size()) > k ? tokens[static_cast<std::size_t>(k)]
                                                               : tokens.back();
      fail(at, what + ": expected " + std::to_string(k) + " values, found " +
                   std::to_string(tokens.size()));
    }
    Vector v(k);
    for (Index j = 0; j < k; ++j) v[j] = real(tokens[static_cast<std::size_t>(j)]);
    return v;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<std::vector<Token>> lines_;
  std::size_t line_ = 0;
  std::size_t pos_ = 0;
  int last_line_ = 0;
};

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return in;
}

}  // namespace

Matrix parse_matrix(std::istream& in, const std::string& source) {
  Tokenizer tok(in, source);
  const auto header = tok.next_line("matrix header 'd n'");
  if (header.size() != 2) tok.fail(header.front(), "matrix header must be 'd n'");
  const Index d = tok.count(header[0]);
  const Index n = tok.count(header[1]);
  if (d == 0 || n == 0) tok.fail(header[0], "matrix must have at least one row and column");
  Matrix A(d, n);
  for (Index i = 0; i < d; ++i) A.row(i) = tok.row(n, "matrix row " + std::to_string(i + 1)).transpose();
  tok.expect_end();
  return A;
}

ConeH parse_cone(std::istream& in, Index expected_n, const std::string& source) {
  Tokenizer tok(in, source);
  const auto header = tok.next_line("cone header 'n m r'");
  Index n = expected_n, m = 0, r = 0;
  if (header.size() == 3) {
    n = tok.count(header[0]);
    m = tok.count(header[1]);
    r = tok.count(header[2]);
    if (expected_n >= 0 && n != expected_n)
      tok.fail(header[0], "cone dimension " + std::to_string(n) + " does not match matrix columns " +
                              std::to_string(expected_n));
  } else if (header.size() == 2) {
    m = tok.count(header[0]);
    r = tok.count(header[1]);
    if (n < 0) tok.fail(header[0], "short header 'm r' needs the dimension from the matrix");
  } else {
    tok.fail(header.front(), "cone header must be 'n m r' (or 'm r')");
  }
  if (n == 0) tok.fail(header[0], "cone dimension must be positive");
  Matrix C(n, m), B(n, r);
  for (Index j = 0; j < m; ++j) C.col(j) = tok.row(n, "inequality normal " + std::to_string(j + 1));
  for (Index j = 0; j < r; ++j) B.col(j) = tok.row(n, "equality normal " + std::to_string(j + 1));
  tok.expect_end();
  return ConeH(C, B);
}

ConeG parse_generators(std::istream& in, const std::string& source) {
  Tokenizer tok(in, source);
  const auto header = tok.next_line("generator header 'n k'");
  if (header.size() != 2) tok.fail(header.front(), "generator header must be 'n k'");
  const Index n = tok.count(header[0]);
  const Index k = tok.count(header[1]);
  if (n == 0) tok.fail(header[0], "dimension must be positive");
  ConeG cone{Matrix(n, k)};
  for (Index j = 0; j < k; ++j) cone.gens.col(j) = tok.row(n, "generator " + std::to_string(j + 1));
  tok.expect_end();
  return cone;
}

Vector parse_vector(std::istream& in, const std::string& source) {
  Tokenizer tok(in, source);
  std::vector<double> values;
  while (true) {
    Token t;
    try {
      t = tok.next("a real number");
    } catch (const ParseError&) {
      break;
    }
    values.push_back(tok.real(t));
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

MeasurementModel parse_model(std::istream& in, const std::string& source) {
  Tokenizer tok(in, source);
  const auto header = tok.next_line("model header 'N L'");
  if (header.size() != 2) tok.fail(header.front(), "model header must be 'N L'");
  const Index N = tok.count(header[0]);
  const Index L = tok.count(header[1]);
  if (N == 0) tok.fail(header[0], "N must be positive");
  if (L == 0) tok.fail(header[1], "L must be positive");
  MeasurementModel model;
  for (Index l = 0; l < L; ++l) {
    ComplexMatrix H(N, N);
    for (Index i = 0; i < N; ++i) {
      const std::string what =
          "operator " + std::to_string(l + 1) + " row " + std::to_string(i + 1) + " (re im pairs)";
      const Vector v = tok.row(2 * N, what);
      for (Index j = 0; j < N; ++j) H(i, j) = {v[2 * j], v[2 * j + 1]};
    }
    model.h_list.push_back(std::move(H));
  }
  tok.expect_end();
  return model;
}

Matrix read_matrix_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_matrix(in, path);
}

ConeH read_cone_file(const std::string& path, Index expected_n) {
  auto in = open_or_throw(path);
  return parse_cone(in, expected_n, path);
}

Vector read_vector_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_vector(in, path);
}

MeasurementModel read_model_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_model(in, path);
}

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << (v == 0.0 ? 0.0 : v);
  return os.str();
}

const char* run_record_csv_header() {
  return "id,n,d,m,seed,sigma_min,gap,iters,converged,wall_time_seconds";
}

std::string to_csv_row(const RunRecord& r) {
  std::ostringstream os;
  os << r.id << ',' << r.n << ',' << r.d << ',' << r.m << ',' << r.seed << ','
     << format_real(r.sigma_min) << ',' << format_real(r.gap) << ',' << r.iters << ','
     << (r.converged ? "true" : "false") << ',' << format_real(r.wall_time_seconds);
  return os.str();
}

RunRecord parse_csv_row(const std::string& row, int line) {
  std::vector<std::string> cells;
  std::vector<int> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = row.find(',', start);
    cells.push_back(row.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    cols.push_back(static_cast<int>(start) + 1);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  const std::string source = "<csv>";
  if (cells.size() != 10)
    throw ParseError(source, line, 1, "expected 10 fields, found " + std::to_string(cells.size()));
  auto integer = [&](std::size_t k) -> unsigned long long {
    const char* b = cells[k].c_str();
    char* e = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(b, &e, 10);
    if (e == b || *e != '\0' || errno == ERANGE || cells[k][0] == '-')
      throw ParseError(source, line, cols[k], "expected an integer, got '" + cells[k] + "'");
    return v;
  };
  auto real = [&](std::size_t k) {
    const char* b = cells[k].c_str();
    char* e = nullptr;
    const double v = std::strtod(b, &e);
    if (e == b || *e != '\0')
      throw ParseError(source, line, cols[k], "expected a real, got '" + cells[k] + "'");
    return v;
  };
  RunRecord r;
  r.id = cells[0];
  r.n = static_cast<Index>(integer(1));
  r.d = static_cast<Index>(integer(2));
  r.m = static_cast<Index>(integer(3));
  r.seed = integer(4);
  r.sigma_min = real(5);
  r.gap = real(6);
  r.iters = static_cast<Index>(integer(7));
  if (cells[8] == "true") r.converged = true;
  else if (cells[8] == "false") r.converged = false;
  else throw ParseError(source, line, cols[8], "expected true or false, got '" + cells[8] + "'");
  r.wall_time_seconds = real(9);
  return r;
}

namespace {
void write_row(std::ostream& out, const Eigen::Ref<const Vector>& v) {
  for (Index j = 0; j < v.size(); ++j) out << (j ? " " : "") << format_real(v[j]);
  out << '\n';
}
}  // namespace

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i).transpose());
}

void write_cone(std::ostream& out, const ConeH& cone) {
  out << cone.dim() << ' ' << cone.num_ineq() << ' ' << cone.num_eq() << '\n';
  for (Index j = 0; j < cone.num_ineq(); ++j) write_row(out, cone.ineq.col(j));
  for (Index j = 0; j < cone.num_eq(); ++j) write_row(out, cone.eq.col(j));
}

void write_generators(std::ostream& out, const ConeG& cone) {
  out << cone.dim() << ' ' << cone.size() << '\n';
  for (Index j = 0; j < cone.size(); ++j) write_row(out, cone.gens.col(j));
}

void write_vector(std::ostream& out, const Vector& v) { write_row(out, v); }

void write_model(std::ostream& out, const MeasurementModel& model) {
  const Index N = model.num_buses();
  out << N << ' ' << model.num_measurements() << '\n';
  for (const ComplexMatrix& H : model.h_list)
    for (Index i = 0; i < N; ++i) {
      for (Index j = 0; j < N; ++j)
        out << (j ? " " : "") << format_real(H(i, j).real()) << ' ' << format_real(H(i, j).imag());
      out << '\n';
    }
}

}  // namespace conicsv
