#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tvmed {

typedef double Scalar;
typedef Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Matrix;
typedef Eigen::Matrix<Scalar, Eigen::Dynamic, 1> Vector;

// Every library failure derives from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MalformedInput : public Error {
public:
  using Error::Error;
};

// Precondition violated by the caller (bad index, bad configuration).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

class RankDeficient : public Error {
public:
  RankDeficient(Eigen::Index rank, Eigen::Index cols)
      : Error("design matrix rank " + std::to_string(rank) + " < " +
              std::to_string(cols)),
        rank_(rank) {}
  Eigen::Index rank() const { return rank_; }

private:
  Eigen::Index rank_;
};

class TooFewTimePoints : public Error {
public:
  using Error::Error;
};

class DegenerateNeighborhood : public Error {
public:
  DegenerateNeighborhood(double t, const std::string& what)
      : Error(what), at_(t) {}
  double at() const { return at_; }

private:
  double at_;
};

class TooManyFailures : public Error {
public:
  using Error::Error;
};

class ZeroRange : public Error {
public:
  using Error::Error;
};

}  // namespace tvmed
