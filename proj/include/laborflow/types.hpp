#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace laborflow {

/// Malformed or inconsistent user input. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric procedure could not produce a usable result. CLI exit code 1.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reserved sentinel codes marking flows that cross the network boundary.
inline constexpr std::string_view kEntryCode = "ENTRY";
inline constexpr std::string_view kExitCode = "EXIT";

inline bool is_sentinel(std::string_view code) {
  return code == kEntryCode || code == kExitCode;
}

/// An occupation, identified by its code (e.g. a 4-digit PCS-style code).
/// Codes are unique within a dataset; ordering is lexicographic on code.
struct Occupation {
  std::string code;
  std::string label;  // optional display name, may be empty

  friend bool operator==(const Occupation& a, const Occupation& b) {
    return a.code == b.code;
  }
  friend bool operator<(const Occupation& a, const Occupation& b) {
    return a.code < b.code;
  }
};

/// Dense row-major grid. Matrices in this library are indexed
/// (destination row, origin column) unless stated otherwise.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = Grid<double>;
using CountGrid = Grid<std::int64_t>;
using BinaryGrid = Grid<std::uint8_t>;

/// Index of `code` in a code-sorted occupation list, if present.
std::optional<std::size_t> find_occupation(const std::vector<Occupation>& occupations,
                                           std::string_view code);

}  // namespace laborflow
