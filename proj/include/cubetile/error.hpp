#pragma once

#include <stdexcept>
#include <string>

namespace cubetile {

// Bad input data or a violated data invariant (parse errors, missing table
// entries, non-monotone ladders, ...). The CLI maps these to exit code 2.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A broken internal assumption, e.g. the sigma scan hitting its safety cap.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace cubetile
