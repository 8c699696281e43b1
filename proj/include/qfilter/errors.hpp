#pragma once

#include <stdexcept>
#include <string>

namespace qfilter {

// Bad data: malformed records, violated invariants, unsatisfiable requests.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem and serialization failures.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qfilter
