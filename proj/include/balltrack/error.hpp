#pragma once

#include <stdexcept>
#include <string>

namespace balltrack {

// File contents that do not match an expected on-disk format.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Failure to read from or write to the filesystem.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Color calibration could not produce a usable lookup table.
class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace balltrack
