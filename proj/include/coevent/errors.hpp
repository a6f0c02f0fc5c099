#ifndef COEVENT_ERRORS_HPP
#define COEVENT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coevent {

// Base for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two events/co-events/matrices from different stages (or sizes) were combined.
class StageMismatchError : public Error {
public:
    using Error::Error;
};

// Restriction requested at stage 0.
class NoPredecessorError : public Error {
public:
    using Error::Error;
};

// Parent map between two stages is not total or not surjective.
class InvalidLinkError : public Error {
public:
    using Error::Error;
};

// A configured size or work budget would be exceeded.
class BudgetError : public Error {
public:
    using Error::Error;
};

// Must-affirm and must-deny events overlap (previous co-event not preclusive).
class InconsistentConstraintsError : public Error {
public:
    using Error::Error;
};

// Forced traces on a candidate support conflict.
class InvalidSupportError : public Error {
public:
    using Error::Error;
};

// A scheme was applied outside its domain (e.g. classical scheme on a quantum measure).
class SchemeMisuseError : public Error {
public:
    using Error::Error;
};

// Brute-force oracle asked to run above its hard size limit.
class OracleScaleError : public Error {
public:
    using Error::Error;
};

// Input data (system spec, matrices) failed validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace coevent

#endif
