#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "btd/tensor.hpp"

namespace btd {

// BTD1: ASCII header "BTD1 <R|C> I J K\n", then little-endian float64 values in storage order.
Field peek_btd1_field(const std::string& path);

template <typename S>
void write_btd1(const std::string& path, const Tensor3<S>& t);
template <typename S>
Tensor3<S> read_btd1(const std::string& path);

// Complex entries serialize as [re, im].
template <typename S>
nlohmann::json matrix_to_json(const Mat<S>& m);
template <typename S>
Mat<S> matrix_from_json(const nlohmann::json& j);

template <typename S>
nlohmann::json decomposition_to_json(const BlockTermDecomposition<S>& d);
template <typename S>
BlockTermDecomposition<S> decomposition_from_json(const nlohmann::json& j);

// Row-major CSV with full precision (17 significant digits).
template <typename S>
std::string matrix_to_csv(const Mat<S>& m);

}  // namespace btd
