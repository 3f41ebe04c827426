#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an edge's Dirichlet spectral function vanishes (within the pole
// tolerance) at the requested energy.
class PoleAtLambda : public Error {
 public:
  PoleAtLambda(double lambda, std::vector<std::size_t> edges);
  double lambda() const noexcept { return lambda_; }
  const std::vector<std::size_t>& edges() const noexcept { return edges_; }

 private:
  double lambda_;
  std::vector<std::size_t> edges_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroEvaluationPoint : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class SupportTooLarge : public Error {
 public:
  using Error::Error;
};

class InvalidPotential : public Error {
 public:
  using Error::Error;
};

class UnknownVertex : public Error {
 public:
  using Error::Error;
};

class UnknownEdge : public Error {
 public:
  using Error::Error;
};

class BoundaryT : public Error {
 public:
  using Error::Error;
};

class DirichletJoinPoint : public Error {
 public:
  using Error::Error;
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

class JoinIdentityViolation : public Error {
 public:
  using Error::Error;
};

class StructureNotFound : public Error {
 public:
  using Error::Error;
};

class SampleAtPole : public Error {
 public:
  using Error::Error;
};

class IsospectralityViolation : public Error {
 public:
  IsospectralityViolation(std::size_t layer, std::size_t edge, const std::string& detail);
  std::size_t layer() const noexcept { return layer_; }
  std::size_t edge() const noexcept { return edge_; }

 private:
  std::size_t layer_;
  std::size_t edge_;
};

// `where` is a JSON pointer (or "line:col" for syntax errors).
class ParseError : public Error {
 public:
  ParseError(std::string where, const std::string& what);
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace qg
