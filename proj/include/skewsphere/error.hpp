#pragma once

#include <stdexcept>
#include <string>

namespace skewsphere {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter or argument outside its mathematical domain.
class domain_error : public error {
 public:
  using error::error;
};

// A covariance matrix failed its Cholesky factorization.
class not_positive_definite : public error {
 public:
  using error::error;
};

// Pair whose latent X correlation is +-1 (e.g. a site paired with itself).
class degenerate_pair : public error {
 public:
  using error::error;
};

class shape_error : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

class numerical_error : public error {
 public:
  using error::error;
};

// Malformed or inconsistent configuration.
class config_error : public error {
 public:
  using error::error;
};

}  // namespace skewsphere
