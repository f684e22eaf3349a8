#pragma once

#include <stdexcept>
#include <string>

namespace renyi
{

// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// The digit of x = 1 is infinite.
class infinite_digit_error : public domain_error
{
public:
    infinite_digit_error() : domain_error("infinite digit: x = 1 has no finite first digit") {}
};

// A cylinder whose measure underflows, so ratios against it are meaningless.
class degenerate_cylinder_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Atom budget or similar resource limit exceeded.
class resource_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature did not reach its tolerance within budget.
class quadrature_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace renyi
