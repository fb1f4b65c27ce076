#ifndef CONICSV_IO_HPP
#define CONICSV_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "conicsv/cones.hpp"
#include "conicsv/gridapp.hpp"

namespace conicsv {

// Malformed text input. what() reads "<source>:<line>:<col>: <message>".
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& source, int line, int col, const std::string& message);
  int line() const { return line_; }
  int column() const { return col_; }

 private:
  int line_;
  int col_;
};

// Matrix file: "d n", then d rows of n reals.
Matrix parse_matrix(std::istream& in, const std::string& source = "<matrix>");
Matrix read_matrix_file(const std::string& path);

// Cone file: "n m r", then m lines holding the columns of C and r lines
// holding the columns of B. A header of just "m r" leaves n to the caller
// (expected_n; pass -1 when unknown, which then requires the long header
// unless m = r = 0 and expected_n is given).
ConeH parse_cone(std::istream& in, Index expected_n = -1, const std::string& source = "<cone>");
ConeH read_cone_file(const std::string& path, Index expected_n = -1);

// Generator file: "n k", then k lines each holding one generator.
ConeG parse_generators(std::istream& in, const std::string& source = "<generators>");

// Whitespace-separated reals, any layout.
Vector parse_vector(std::istream& in, const std::string& source = "<vector>");
Vector read_vector_file(const std::string& path);

// Model file: "N L", then L blocks of N rows, each row N pairs "re im".
MeasurementModel parse_model(std::istream& in, const std::string& source = "<model>");
MeasurementModel read_model_file(const std::string& path);

// One benchmark or solve row. CSV columns follow the field order.
struct RunRecord {
  std::string id;
  Index n = 0;
  Index d = 0;
  Index m = 0;
  std::uint64_t seed = 0;
  double sigma_min = 0.0;
  double gap = 0.0;
  Index iters = 0;
  bool converged = false;
  double wall_time_seconds = 0.0;
};

const char* run_record_csv_header();
std::string to_csv_row(const RunRecord& r);
// Throws ParseError on malformed rows.
RunRecord parse_csv_row(const std::string& row, int line = 1);

// Shortest decimal text that round-trips a double (17 significant digits).
std::string format_real(double v);

void write_matrix(std::ostream& out, const Matrix& m);
void write_cone(std::ostream& out, const ConeH& cone);
void write_generators(std::ostream& out, const ConeG& cone);
void write_vector(std::ostream& out, const Vector& v);
void write_model(std::ostream& out, const MeasurementModel& model);

}  // namespace conicsv

#endif  // CONICSV_IO_HPP
