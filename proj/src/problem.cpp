#include "astar_pursuit/problem.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace astar_pursuit {

void ProblemInstance::validate() const {
  if (phi.rows() < 1 || phi.cols() < 1) throw DimensionError("problem: empty observation matrix");
  if (y.size() != phi.rows()) {
    throw DimensionError("problem: y has " + std::to_string(y.size()) + " entries, expected " +
                         std::to_string(phi.rows()));
  }
  if (x_true && x_true->size() != phi.cols()) {
    throw DimensionError("problem: x_true has " + std::to_string(x_true->size()) +
                         " entries, expected " + std::to_string(phi.cols()));
  }
  if (K < 1 || K > phi.rows()) throw std::invalid_argument("problem: K must satisfy 1 <= K <= M");
  require_finite(phi, "phi");
  require_finite(y, "y");
  if (x_true) require_finite(*x_true, "x_true");
}

namespace {

// Numbers from `in` with '#' comments removed.
class NumberReader {
 public:
  explicit NumberReader(std::istream& in) {
    std::string line;
    std::string body;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      body += line;
      body += '\n';
    }
    stream_.str(body);
  }

  double next(const char* what) {
    double v;
    if (!(stream_ >> v)) throw std::runtime_error(std::string("problem file: missing or bad ") + what);
    return v;
  }

  bool exhausted() {
    stream_ >> std::ws;
    return stream_.eof();
  }

 private:
  std::istringstream stream_;
};

Eigen::Index read_count(NumberReader& reader, const char* what) {
  const double v = reader.next(what);
  if (v < 0 || v != static_cast<double>(static_cast<long long>(v))) {
    throw std::runtime_error(std::string("problem file: ") + what + " must be a non-negative integer");
  }
  return static_cast<Eigen::Index>(v);
}

}  // namespace

ProblemInstance read_problem(std::istream& in) {
  NumberReader reader(in);
  const auto m = read_count(reader, "M");
  const auto n = read_count(reader, "N");
  const auto k = read_count(reader, "K");
  const auto has_truth = read_count(reader, "has_truth");
  if (m < 1 || n < 1) throw DimensionError("problem file: M and N must be positive");
  ProblemInstance p;
  p.K = static_cast<int>(k);
  p.phi.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) p.phi(i, j) = reader.next("phi entry");
  p.y.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) p.y[i] = reader.next("y entry");
  if (has_truth == 1) {
    Vector x(n);
    for (Eigen::Index j = 0; j < n; ++j) x[j] = reader.next("x_true entry");
    p.x_true = std::move(x);
  }
  if (!reader.exhausted()) throw std::runtime_error("problem file: trailing data");
  p.validate();
  return p;
}

void write_problem(std::ostream& out, const ProblemInstance& problem) {
  const auto old_precision = out.precision(17);
  out << problem.M() << ' ' << problem.N() << ' ' << problem.K << ' ' << (problem.x_true ? 1 : 0)
      << '\n';
  for (Eigen::Index i = 0; i < problem.M(); ++i) {
    for (Eigen::Index j = 0; j < problem.N(); ++j) out << (j ? " " : "") << problem.phi(i, j);
    out << '\n';
  }
  for (Eigen::Index i = 0; i < problem.M(); ++i) out << (i ? " " : "") << problem.y[i];
  out << '\n';
  if (problem.x_true) {
    for (Eigen::Index j = 0; j < problem.N(); ++j) out << (j ? " " : "") << (*problem.x_true)[j];
    out << '\n';
  }
  out.precision(old_precision);
}

Vector scatter(std::span<const AtomIndex> support, const Vector& coeffs, Eigen::Index n) {
  Vector x = Vector::Zero(n);
  for (std::size_t j = 0; j < support.size(); ++j) {
    x[support[j]] = coeffs[static_cast<Eigen::Index>(j)];
  }
  return x;
}

}  // namespace astar_pursuit
