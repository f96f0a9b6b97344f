#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace btd {

using cd = std::complex<double>;

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatR = Mat<double>;
using MatC = Mat<cd>;
using VecR = Vec<double>;
using VecC = Vec<cd>;

enum class Field { real, complex };

// Deterministic generator used everywhere a seed is accepted.
using Rng = std::mt19937_64;

template <typename S>
constexpr bool is_complex_v = std::is_same_v<S, cd>;

template <typename S>
constexpr Field field_of() {
  return is_complex_v<S> ? Field::complex : Field::real;
}

// Bad caller input: shapes, modes, malformed files.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical or assumption failure detected by a solver.
struct Diagnostic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Default relative singular-value threshold for numerical rank.
inline constexpr double kDefaultRankTol = 1e-10;

// Reads BTD_RANK_TOL if set, else the default.
double default_rank_tol();

// Casts a complex matrix to scalar type S (drops the imaginary part for S = double).
template <typename S>
Mat<S> from_complex(const MatC& m) {
  if constexpr (is_complex_v<S>)
    return m;
  else
    return m.real();
}

}  // namespace btd
