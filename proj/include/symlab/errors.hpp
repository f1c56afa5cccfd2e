#pragma once

#include <stdexcept>
#include <string>

namespace symlab {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or non-positive Fourier data.
class invalid_curve_error : public error {
public:
    using error::error;
};

// r(theta) <= 0 somewhere: the domain is not star-shaped about its center.
class star_shape_error : public error {
public:
    using error::error;
};

class meshing_error : public error {
public:
    using error::error;
};

class solver_error : public error {
public:
    using error::error;
};

class precondition_error : public error {
public:
    using error::error;
};

// Invalid parameters for closed-form evaluators (e.g. p outside (1,N)).
class param_error : public error {
public:
    using error::error;
};

class config_error : public error {
public:
    using error::error;
};

} // namespace symlab
