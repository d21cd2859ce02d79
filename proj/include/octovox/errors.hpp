// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace octovox {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A cell coordinate outside its grid box.
class index_error : public error {
public:
    using error::error;
};

// Grid shapes that do not line up (odd dims for pooling, pyramid dims off
// the doubling law, operand shape mismatch).
class dimension_error : public error {
public:
    using error::error;
};

// Invalid configuration values (ratios outside (0,1], weight ordering,
// mismatched list lengths, unmapped labels).
class config_error : public error {
public:
    using error::error;
};

// A split pyramid that violates parent-chain monotonicity or leaf coverage,
// or a sparse field whose leaf set disagrees with its structure.
class structure_error : public error {
public:
    using error::error;
};

// A split-probability provider returned the wrong count or an out-of-range
// probability.
class provider_error : public error {
public:
    using error::error;
};

// Failure to open, create, or atomically replace a file.
class io_error : public error {
public:
    using error::error;
};

enum class parse_fault {
    bad_magic,
    bad_version,
    truncated,
    bad_value,
    trailing_data,
};

// Malformed file content. Carries the byte offset at which parsing failed.
class parse_error : public error {
public:
    parse_error(parse_fault fault, std::size_t offset, const std::string& what)
        : error(what + " (byte " + std::to_string(offset) + ")"),
          fault_(fault),
          offset_(offset) {}

    parse_fault fault() const { return fault_; }
    std::size_t offset() const { return offset_; }

private:
    parse_fault fault_;
    std::size_t offset_;
};

}  // namespace octovox
