#pragma once

#include <stdexcept>
#include <string>

namespace famarec {

/// Bad or inconsistent input: files, columns, dates, weights, configuration.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// The data are well formed but the requested computation is not defined on them.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace famarec
